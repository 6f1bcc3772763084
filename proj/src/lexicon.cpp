#include "turkann/lexicon.hpp"

#include <algorithm>
#include <set>

#include "turkann/unicode.hpp"

namespace turkann {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

// U+00A0 and U+3000 are the only non-ASCII spaces we expect to meet in
// pasted dictionary data.
bool has_surrounding_space(std::string_view s) {
  auto starts = [&](std::string_view p) { return s.substr(0, p.size()) == p; };
  auto ends = [&](std::string_view p) {
    return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
  };
  if (is_space(s.front()) || is_space(s.back())) return true;
  for (std::string_view p : {std::string_view("\xC2\xA0"), std::string_view("\xE3\x80\x80")}) {
    if (starts(p) || ends(p)) return true;
  }
  return false;
}

bool balanced(std::string_view s) {
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) return false;
  }
  return depth == 0;
}

}  // namespace

std::string_view to_string(LexiconErrorKind kind) {
  switch (kind) {
    case LexiconErrorKind::EmptyForm: return "EmptyForm";
    case LexiconErrorKind::SurroundingWhitespace: return "SurroundingWhitespace";
    case LexiconErrorKind::UnbalancedParentheses: return "UnbalancedParentheses";
    case LexiconErrorKind::ForbiddenCharacter: return "ForbiddenCharacter";
    case LexiconErrorKind::AmbiguousParentheses: return "AmbiguousParentheses";
    case LexiconErrorKind::InvalidUtf8: return "InvalidUtf8";
  }
  return "?";
}

Lexeme Lexeme::create(std::string_view form, Script script) {
  if (!unicode::is_valid_utf8(form))
    throw LexiconError(LexiconErrorKind::InvalidUtf8, "form is not valid UTF-8");
  if (form.empty()) throw LexiconError(LexiconErrorKind::EmptyForm, "empty form");
  if (has_surrounding_space(form))
    throw LexiconError(LexiconErrorKind::SurroundingWhitespace,
                       "form '" + std::string(form) + "' has leading or trailing whitespace");
  if (form.find_first_of("\t\n\r;") != std::string_view::npos)
    throw LexiconError(LexiconErrorKind::ForbiddenCharacter,
                       "form '" + std::string(form) + "' contains a tab, newline or ';'");
  if (!balanced(form))
    throw LexiconError(LexiconErrorKind::UnbalancedParentheses,
                       "form '" + std::string(form) + "' has unbalanced parentheses");
  if (script == Script::OfficialLatin && form.front() == '(' && form.back() == ')')
    throw LexiconError(LexiconErrorKind::AmbiguousParentheses,
                       "Latin form '" + std::string(form) + "' is wrapped in parentheses");
  return Lexeme(unicode::to_nfc(form), script);
}

std::string to_string(const Slot& slot) {
  return std::string(language_name(slot.language)) + "[" + std::to_string(slot.lexeme_index) + "]";
}

std::vector<Slot> DictionaryEntry::slots() const {
  std::vector<Slot> out;
  for (LanguageId id : kLanguages) {
    for (std::size_t i = 0; i < lexemes(id).size(); ++i) out.push_back({id, i});
  }
  return out;
}

std::size_t DictionaryEntry::slot_count() const {
  std::size_t n = 0;
  for (const auto& list : translations) n += list.size();
  return n;
}

std::optional<Etymology> etymology_from_char(char c) {
  for (Etymology e : kEtymologyAlphabet) {
    if (to_char(e) == c) return e;
  }
  return std::nullopt;
}

std::string_view describe(Etymology e) {
  switch (e) {
    case Etymology::Turkic: return "Turkic origin";
    case Etymology::Arabic: return "Arabic origin, including via Persian";
    case Etymology::Persian: return "Persian origin";
    case Etymology::Russian: return "borrowed from Russian, including ultimately French words";
    case Etymology::French: return "French origin, not via Russian";
    case Etymology::English: return "English origin";
    case Etymology::Italian: return "Italian origin";
    case Etymology::Greek: return "Greek origin";
    case Etymology::Chinese: return "Chinese origin";
    case Etymology::Unknown: return "unknown or inconclusive origin";
    case Etymology::MixedCompound: return "compound of constituents from different origins";
    case Etymology::ForeignBaseVerb: return "non-Turkic base with Turkic auxiliary verb or denominal affix";
    case Etymology::ForeignBaseNominal: return "non-Turkic base bearing Turkic affixes";
  }
  return "?";
}

std::string AnnotationCode::str() const {
  std::string s;
  s.push_back(static_cast<char>('0' + cognate_class));
  s.push_back(to_char(etymology));
  return s;
}

std::string_view to_string(CodeErrorKind kind) {
  switch (kind) {
    case CodeErrorKind::BadLength: return "BadLength";
    case CodeErrorKind::ClassOutOfRange: return "ClassOutOfRange";
    case CodeErrorKind::UnknownEtymologyLetter: return "UnknownEtymologyLetter";
  }
  return "?";
}

std::optional<CodeErrorKind> check_code(std::string_view text) {
  if (text.size() != 2) return CodeErrorKind::BadLength;
  if (text[0] < '1' || text[0] > '0' + kMaxCognateClass) return CodeErrorKind::ClassOutOfRange;
  if (!etymology_from_char(text[1])) return CodeErrorKind::UnknownEtymologyLetter;
  return std::nullopt;
}

AnnotationCode parse_code(std::string_view text) {
  if (auto error = check_code(text)) {
    std::string what = "invalid code '" + std::string(text) + "': ";
    switch (*error) {
      case CodeErrorKind::BadLength:
        what += "expected exactly two characters";
        break;
      case CodeErrorKind::ClassOutOfRange:
        what += "cognate class must be a digit from 1 to 8";
        break;
      case CodeErrorKind::UnknownEtymologyLetter:
        what += "etymology letter must be one of TAPRFEIGCQXVN";
        break;
    }
    throw CodeError(*error, what);
  }
  return AnnotationCode{text[0] - '0', *etymology_from_char(text[1])};
}

CognatePartition::CognatePartition(std::vector<std::vector<Slot>> blocks) {
  std::set<Slot> seen;
  for (auto& block : blocks) {
    if (block.empty()) throw std::invalid_argument("partition block is empty");
    std::sort(block.begin(), block.end());
    for (const Slot& s : block) {
      if (!seen.insert(s).second)
        throw std::invalid_argument("slot " + to_string(s) + " appears in two blocks");
    }
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  blocks_ = std::move(blocks);
}

std::vector<Slot> CognatePartition::slots() const {
  std::vector<Slot> out;
  for (const auto& block : blocks_) out.insert(out.end(), block.begin(), block.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t CognatePartition::size() const {
  std::size_t n = 0;
  for (const auto& block : blocks_) n += block.size();
  return n;
}

std::map<Slot, std::size_t> CognatePartition::block_index() const {
  std::map<Slot, std::size_t> out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (const Slot& s : blocks_[b]) out.emplace(s, b);
  }
  return out;
}

EntryAnnotation canonicalize(const EntryAnnotation& ann) {
  EntryAnnotation out = ann;
  std::map<int, int> relabel;
  // std::map iteration is already canonical slot order.
  for (auto& [slot, code] : out.codes) {
    auto [it, inserted] =
        relabel.emplace(code.cognate_class, static_cast<int>(relabel.size()) + 1);
    code.cognate_class = it->second;
  }
  return out;
}

EntryAnnotation canonicalize(const EntryAnnotation& ann, const DictionaryEntry& entry) {
  for (const auto& [slot, code] : ann.codes) {
    if (!entry.has_slot(slot))
      throw DanglingSlotError(slot, "slot " + to_string(slot) + " does not exist in entry '" +
                                        entry.entry_id + "'");
  }
  return canonicalize(ann);
}

CognatePartition partition_of(const EntryAnnotation& ann) {
  std::map<int, std::vector<Slot>> by_class;
  for (const auto& [slot, code] : ann.codes) by_class[code.cognate_class].push_back(slot);
  std::vector<std::vector<Slot>> blocks;
  blocks.reserve(by_class.size());
  for (auto& [cls, block] : by_class) blocks.push_back(std::move(block));
  return CognatePartition(std::move(blocks));
}

EntryAnnotation annotation_from_partition(const CognatePartition& partition,
                                          std::string entry_id, std::string annotator_id,
                                          Etymology etymology) {
  EntryAnnotation out{std::move(entry_id), std::move(annotator_id), {}};
  const auto& blocks = partition.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (const Slot& s : blocks[b])
      out.codes.emplace(s, AnnotationCode{static_cast<int>(b) + 1, etymology});
  }
  // Blocks are ordered by first slot, so this labeling is already canonical
  // unless there are more than eight blocks.
  return out;
}

std::string_view to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::EntryMismatch: return "EntryMismatch";
    case DiagnosticKind::DanglingSlot: return "DanglingSlot";
    case DiagnosticKind::BadCode: return "BadCode";
    case DiagnosticKind::ClassExceedsSlots: return "ClassExceedsSlots";
    case DiagnosticKind::TooManySlots: return "TooManySlots";
    case DiagnosticKind::NonCanonicalNumbering: return "NonCanonicalNumbering";
    case DiagnosticKind::MixedEtymologyInBlock: return "MixedEtymologyInBlock";
  }
  return "?";
}

std::vector<Diagnostic> validate_entry_annotation(const DictionaryEntry& entry,
                                                  const EntryAnnotation& ann,
                                                  const ValidationOptions& options) {
  std::vector<Diagnostic> out;
  auto error = [&](DiagnosticKind kind, std::optional<Slot> slot, std::string message) {
    out.push_back({Severity::Error, kind, slot, std::move(message)});
  };
  auto warning = [&](DiagnosticKind kind, std::optional<Slot> slot, std::string message) {
    out.push_back({Severity::Warning, kind, slot, std::move(message)});
  };

  if (ann.entry_id != entry.entry_id)
    error(DiagnosticKind::EntryMismatch, std::nullopt,
          "annotation is for entry '" + ann.entry_id + "' but was checked against '" +
              entry.entry_id + "'");

  const std::size_t slot_count = entry.slot_count();
  if (slot_count > static_cast<std::size_t>(kMaxCognateClass))
    error(DiagnosticKind::TooManySlots, std::nullopt,
          "entry '" + entry.entry_id + "' has " + std::to_string(slot_count) +
              " lexemes but cognate classes only go up to 8");

  bool codes_ok = true;
  for (const auto& [slot, code] : ann.codes) {
    if (!entry.has_slot(slot)) {
      error(DiagnosticKind::DanglingSlot, slot,
            "slot " + to_string(slot) + " does not exist in entry '" + entry.entry_id + "'");
      codes_ok = false;
    }
    if (code.cognate_class < 1 || code.cognate_class > kMaxCognateClass ||
        !etymology_from_char(to_char(code.etymology))) {
      error(DiagnosticKind::BadCode, slot, "slot " + to_string(slot) + " has an invalid code");
      codes_ok = false;
      continue;
    }
    // k classes need at least k slots, so a digit above the slot count can
    // never be part of a valid labeling.
    if (static_cast<std::size_t>(code.cognate_class) > slot_count) {
      error(DiagnosticKind::ClassExceedsSlots, slot,
            "class " + std::to_string(code.cognate_class) + " at " + to_string(slot) +
                " exceeds the entry's " + std::to_string(slot_count) + " lexemes");
    }
  }
  if (!codes_ok) return out;

  if (canonicalize(ann) != ann)
    warning(DiagnosticKind::NonCanonicalNumbering, std::nullopt,
            "cognate classes are not numbered 1..k in column order");

  if (options.lint_mixed_etymology) {
    std::map<int, std::set<char>> letters;
    for (const auto& [slot, code] : ann.codes)
      letters[code.cognate_class].insert(to_char(code.etymology));
    for (const auto& [cls, set] : letters) {
      if (set.size() > 1)
        warning(DiagnosticKind::MixedEtymologyInBlock, std::nullopt,
                "cognate class " + std::to_string(cls) + " mixes etymology letters " +
                    std::string(set.begin(), set.end()));
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace turkann
