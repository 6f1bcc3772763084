#include "turkann/codec.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "turkann/unicode.hpp"

namespace turkann {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::size_t kDatasetColumns = 2 + kLanguageCount;

constexpr std::array<std::string_view, 6> kRecordKeys{
    "annotator_id", "entry_id", "language", "lexeme_index", "code", "timestamp",
};

// Splits on '\n'. A single trailing newline does not produce an extra line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view text, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, end - start));
    start = end + sep.size();
  }
}

Lexeme parse_lexeme(std::string_view token, std::size_t line_no, LanguageId language) {
  const std::string where = std::string(language_name(language)) + " cell";
  if (token.empty())
    throw CodecError(CodecErrorKind::InvalidForm, line_no, "empty lexeme in " + where);
  Script script = Script::OfficialLatin;
  if (token.size() >= 2 && token.front() == '(' && token.back() == ')') {
    token = token.substr(1, token.size() - 2);
    script = Script::Transliteration;
  }
  try {
    return Lexeme::create(token, script);
  } catch (const LexiconError& e) {
    auto kind = e.kind() == LexiconErrorKind::UnbalancedParentheses
                    ? CodecErrorKind::UnbalancedParentheses
                    : CodecErrorKind::InvalidForm;
    throw CodecError(kind, line_no, where + ": " + e.what());
  }
}

bool valid_entry_id(std::string_view id) {
  if (id.empty()) return false;
  for (unsigned char c : id) {
    if (c <= 0x20 || c == 0x7f) return false;
  }
  return true;
}

std::string format_cell(const std::vector<Lexeme>& lexemes) {
  std::string cell;
  for (std::size_t i = 0; i < lexemes.size(); ++i) {
    if (i > 0) cell += kLexemeSeparator;
    if (lexemes[i].script() == Script::Transliteration) {
      cell += '(' + lexemes[i].form() + ')';
    } else {
      cell += lexemes[i].form();
    }
  }
  return cell;
}

bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::string_view to_string(CodecErrorKind kind) {
  switch (kind) {
    case CodecErrorKind::InvalidUtf8: return "InvalidUtf8";
    case CodecErrorKind::BadHeader: return "BadHeader";
    case CodecErrorKind::BadColumnCount: return "BadColumnCount";
    case CodecErrorKind::UnbalancedParentheses: return "UnbalancedParentheses";
    case CodecErrorKind::InvalidForm: return "InvalidForm";
    case CodecErrorKind::EmptyEntry: return "EmptyEntry";
    case CodecErrorKind::BadEntryId: return "BadEntryId";
    case CodecErrorKind::DuplicateEntryId: return "DuplicateEntryId";
    case CodecErrorKind::MalformedLine: return "MalformedLine";
    case CodecErrorKind::UnknownKey: return "UnknownKey";
    case CodecErrorKind::MissingKey: return "MissingKey";
    case CodecErrorKind::UnknownLanguage: return "UnknownLanguage";
    case CodecErrorKind::BadLexemeIndex: return "BadLexemeIndex";
    case CodecErrorKind::BadCode: return "BadCode";
    case CodecErrorKind::BadTimestamp: return "BadTimestamp";
  }
  return "?";
}

CodecError::CodecError(CodecErrorKind kind, std::size_t line, const std::string& message,
                       std::optional<CodeErrorKind> code_error)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " +
                                        std::string(to_string(kind)) + ": " + message
                                  : std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      line_(line),
      message_(message),
      code_error_(code_error) {}

std::string slugify(std::string_view gloss) {
  std::string out;
  bool pending_dash = false;
  for (unsigned char c : gloss) {
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      if (pending_dash && !out.empty()) out += '-';
      pending_dash = false;
      out += static_cast<char>(c);
    } else {
      pending_dash = true;
    }
  }
  return out.empty() ? "entry" : out;
}

std::vector<DictionaryEntry> parse_dataset(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw CodecError(CodecErrorKind::BadHeader, 1, "missing header line");
  if (lines[0] != kDatasetHeader)
    throw CodecError(CodecErrorKind::BadHeader, 1,
                     "expected header '" + std::string(kDatasetHeader) + "'");

  std::vector<DictionaryEntry> entries;
  std::vector<bool> auto_id;
  std::unordered_set<std::string> explicit_ids;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = lines[i];
    if (!unicode::is_valid_utf8(line))
      throw CodecError(CodecErrorKind::InvalidUtf8, line_no, "line is not valid UTF-8");
    const auto cells = split(line, "\t");
    if (cells.size() != kDatasetColumns)
      throw CodecError(CodecErrorKind::BadColumnCount, line_no,
                       "expected " + std::to_string(kDatasetColumns) + " tab-separated columns, got " +
                           std::to_string(cells.size()));

    DictionaryEntry entry;
    entry.gloss = unicode::to_nfc(cells[1]);
    if (!cells[0].empty()) {
      if (!valid_entry_id(cells[0]))
        throw CodecError(CodecErrorKind::BadEntryId, line_no,
                         "entry id '" + std::string(cells[0]) + "' contains whitespace or control characters");
      entry.entry_id = unicode::to_nfc(cells[0]);
      if (!explicit_ids.insert(entry.entry_id).second)
        throw CodecError(CodecErrorKind::DuplicateEntryId, line_no,
                         "entry id '" + entry.entry_id + "' already used");
    }
    for (LanguageId lang : kLanguages) {
      const std::string_view cell = cells[2 + language_index(lang)];
      if (cell.empty()) continue;
      for (std::string_view token : split(cell, kLexemeSeparator))
        entry.lexemes(lang).push_back(parse_lexeme(token, line_no, lang));
    }
    if (entry.slot_count() == 0)
      throw CodecError(CodecErrorKind::EmptyEntry, line_no,
                       "entry has no translation in any language");
    auto_id.push_back(cells[0].empty());
    entries.push_back(std::move(entry));
  }

  // Ids for rows without one: slug, then slug-2, slug-3, ... skipping any id
  // already taken.
  std::unordered_set<std::string> taken = explicit_ids;
  std::unordered_map<std::string, int> occurrences;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!auto_id[i]) continue;
    const std::string base = slugify(entries[i].gloss);
    int& n = occurrences[base];
    std::string id;
    do {
      ++n;
      id = n == 1 ? base : base + "-" + std::to_string(n);
    } while (taken.count(id));
    taken.insert(id);
    entries[i].entry_id = std::move(id);
  }
  return entries;
}

std::string serialize_dataset(std::span<const DictionaryEntry> entries) {
  std::string out(kDatasetHeader);
  out += '\n';
  for (const auto& entry : entries) {
    out += entry.entry_id;
    out += '\t';
    out += entry.gloss;
    for (LanguageId lang : kLanguages) {
      out += '\t';
      out += format_cell(entry.lexemes(lang));
    }
    out += '\n';
  }
  return out;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss<milliseconds> hms{t - day};
  char buf[40];
  const long ms = static_cast<long>(hms.subseconds().count());
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(hms.hours().count()),
                  static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()), ms);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(hms.hours().count()),
                  static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
  }
  return buf;
}

Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  auto bad = [&]() {
    return std::invalid_argument("'" + std::string(s) + "' is not an RFC 3339 UTC timestamp");
  };
  int y, mo, d, h, mi, sec;
  if (!parse_fixed(s, 0, 4, y) || s.size() < 20 || s[4] != '-' || !parse_fixed(s, 5, 2, mo) ||
      s[7] != '-' || !parse_fixed(s, 8, 2, d) || s[10] != 'T' || !parse_fixed(s, 11, 2, h) ||
      s[13] != ':' || !parse_fixed(s, 14, 2, mi) || s[16] != ':' || !parse_fixed(s, 17, 2, sec))
    throw bad();
  std::size_t pos = 19;
  long ms = 0;
  if (s[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 3) ms = ms * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) throw bad();
    for (std::size_t k = digits; k < 3; ++k) ms *= 10;
  }
  const std::string_view zone = s.substr(pos);
  if (zone != "Z" && zone != "+00:00") throw bad();
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) throw bad();
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{ms};
}

AnnotationRecord parse_annotation_line(std::string_view line, std::size_t line_no,
                                       const RecordParseOptions& options) {
  if (!unicode::is_valid_utf8(line))
    throw CodecError(CodecErrorKind::InvalidUtf8, line_no, "line is not valid UTF-8");
  const ojson j = ojson::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw CodecError(CodecErrorKind::MalformedLine, line_no, "expected one JSON object per line");

  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view k : kRecordKeys) known = known || key == k;
    if (!known) throw CodecError(CodecErrorKind::UnknownKey, line_no, "unknown key '" + key + "'");
  }
  for (std::string_view k : kRecordKeys) {
    if (k == "timestamp" && !options.require_timestamp) continue;
    if (!j.contains(k))
      throw CodecError(CodecErrorKind::MissingKey, line_no, "missing key '" + std::string(k) + "'");
  }

  auto string_field = [&](const char* key) -> std::string {
    const auto& v = j.at(key);
    if (!v.is_string() || v.get_ref<const std::string&>().empty())
      throw CodecError(CodecErrorKind::MalformedLine, line_no,
                       std::string("'") + key + "' must be a non-empty string");
    return v.get<std::string>();
  };

  AnnotationRecord r{};
  r.annotator_id = string_field("annotator_id");
  r.entry_id = string_field("entry_id");

  const std::string language = string_field("language");
  const auto lang = language_from_string(language);
  if (!lang)
    throw CodecError(CodecErrorKind::UnknownLanguage, line_no, "unknown language '" + language + "'");
  r.language = *lang;

  const auto& index = j.at("lexeme_index");
  if (!index.is_number_integer() || (index.is_number_integer() && index.get<long long>() < 0))
    throw CodecError(CodecErrorKind::BadLexemeIndex, line_no,
                     "'lexeme_index' must be a non-negative integer");
  r.lexeme_index = index.get<std::size_t>();

  const auto& code = j.at("code");
  if (!code.is_string())
    throw CodecError(CodecErrorKind::BadCode, line_no, "'code' must be a string",
                     CodeErrorKind::BadLength);
  try {
    r.code = parse_code(code.get_ref<const std::string&>());
  } catch (const CodeError& e) {
    throw CodecError(CodecErrorKind::BadCode, line_no, std::string(to_string(e.kind())) + ": " + e.what(),
                     e.kind());
  }

  if (j.contains("timestamp")) {
    const auto& ts = j.at("timestamp");
    if (!ts.is_string())
      throw CodecError(CodecErrorKind::BadTimestamp, line_no, "'timestamp' must be a string");
    try {
      r.timestamp = parse_timestamp(ts.get_ref<const std::string&>());
    } catch (const std::invalid_argument& e) {
      throw CodecError(CodecErrorKind::BadTimestamp, line_no, e.what());
    }
  }
  return r;
}

std::string serialize_annotation(const AnnotationRecord& r) {
  ojson j;
  j["annotator_id"] = r.annotator_id;
  j["entry_id"] = r.entry_id;
  j["language"] = language_name(r.language);
  j["lexeme_index"] = r.lexeme_index;
  j["code"] = r.code.str();
  j["timestamp"] = format_timestamp(r.timestamp);
  return j.dump();
}

std::vector<AnnotationRecord> parse_annotations(std::string_view text) {
  std::vector<AnnotationRecord> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i)
    out.push_back(parse_annotation_line(lines[i], i + 1));
  return out;
}

std::string serialize_annotations(std::span<const AnnotationRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += serialize_annotation(r);
    out += '\n';
  }
  return out;
}

AnnotationLogRead read_annotation_log(std::string_view text) {
  AnnotationLogRead out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.records.push_back(parse_annotation_line(lines[i], i + 1));
      out.line_numbers.push_back(i + 1);
    } catch (const CodecError& e) {
      out.errors.push_back(e);
    }
  }
  return out;
}

std::vector<AnnotationRecord> resolve_newest_wins(std::span<const AnnotationRecord> records) {
  using Key = std::tuple<std::string_view, std::string_view, Slot>;
  std::map<Key, std::size_t> last;
  for (std::size_t i = 0; i < records.size(); ++i)
    last[Key{records[i].annotator_id, records[i].entry_id, records[i].slot()}] = i;
  std::vector<bool> keep(records.size(), false);
  for (const auto& [key, i] : last) keep[i] = true;
  std::vector<AnnotationRecord> out;
  out.reserve(last.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(records[i]);
  }
  return out;
}

std::vector<EntryAnnotation> group_by_entry(std::span<const AnnotationRecord> records) {
  std::map<std::pair<std::string_view, std::string_view>, std::size_t> position;
  std::vector<EntryAnnotation> out;
  for (const auto& r : records) {
    auto [it, inserted] = position.emplace(std::pair{std::string_view(r.annotator_id),
                                                     std::string_view(r.entry_id)},
                                           out.size());
    if (inserted) out.push_back(EntryAnnotation{r.entry_id, r.annotator_id, {}});
    out[it->second].codes[r.slot()] = r.code;
  }
  return out;
}

}  // namespace turkann
