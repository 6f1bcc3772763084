#include "doctest.h"
#include "support.hpp"
#include "turkann/codec.hpp"

using namespace turkann;
using namespace turkann::test;

namespace {

const std::string kHeader = std::string(kDatasetHeader) + "\n";

CodecErrorKind dataset_error(const std::string& text) {
  try {
    parse_dataset(text);
  } catch (const CodecError& e) {
    return e.kind();
  }
  FAIL("no error for: " << text);
  return CodecErrorKind::MalformedLine;
}

CodecErrorKind record_error(const std::string& line) {
  try {
    parse_annotation_line(line, 7);
  } catch (const CodecError& e) {
    CHECK(e.line() == 7);
    return e.kind();
  }
  FAIL("no error for: " << line);
  return CodecErrorKind::MalformedLine;
}

const std::string kRecord =
    R"({"annotator_id":"ann1","entry_id":"chair","language":"Azerbaijani","lexeme_index":0,"code":"1R","timestamp":"2024-01-15T10:00:00Z"})";

}  // namespace

TEST_CASE("the alive row parses to its entry") {
  const auto entries = parse_dataset(
      kHeader + "alive\talive\tcanlı\t(tiri)\t(türüü)\t(janlı)\tcanlı\tdiri\t(tirik)\ttirik\n");
  REQUIRE(entries.size() == 1);
  const auto& e = entries[0];
  CHECK(e.entry_id == "alive");
  CHECK(e.gloss == "alive");
  const auto& kk = e.lexemes(LanguageId::Kazakh);
  REQUIRE(kk.size() == 1);
  CHECK(kk[0].form() == "tiri");
  CHECK(kk[0].script() == Script::Transliteration);
  CHECK(e.lexemes(LanguageId::Azerbaijani)[0].script() == Script::OfficialLatin);
  CHECK(e.slot_count() == 8);
  CHECK(serialize_dataset(entries) ==
        kHeader + "alive\talive\tcanlı\t(tiri)\t(türüü)\t(janlı)\tcanlı\tdiri\t(tirik)\ttirik\n");
}

TEST_CASE("example fixtures parse to the documented entries") {
  const auto entries = example_entries();
  REQUIRE(entries.size() == 10);

  struct Row {
    const char* id;
    std::array<const char*, 8> forms;  // parenthesized = transliteration, "" = empty
  };
  const Row rows[] = {
      {"alive", {"canlı", "(tiri)", "(türüü)", "(janlı)", "canlı", "diri", "(tirik)", "tirik"}},
      {"one", {"bir", "(bir)", "(bir)", "(ber)", "bir", "bir", "(bir)", "bir"}},
      {"book", {"kitab", "(kitap)", "(kitep)", "(kitap)", "kitap", "kitap", "(kitab)", "kitob"}},
      {"ballet", {"balet", "(balet)", "(balet)", "(balet)", "bale", "balet", "(balet)", "balet"}},
      {"benefit", {"fayda", "(payda)", "(payda)", "(fayda)", "fayda", "peýda", "(payda)", "foyda"}},
      {"chair",
       {"stul", "(orındıq)", "(orunduk)", "(urındık)", "sandalye", "stul", "(orunduq)", "kursi"}},
      {"manager", {"", "", "", "", "", "ýolbaşçy", "", ""}},
      {"truck", {"", "", "", "(yök mashinası)", "", "", "", ""}},
      {"thunder", {"", "", "", "", "gök gürlemesi", "", "", ""}},
      {"baker", {"", "(nawbayshı)", "", "", "", "çörekçi", "", ""}},
  };
  for (const auto& row : rows) {
    const auto& e = find_entry(entries, row.id);
    CHECK(e.gloss == row.id);
    for (std::size_t l = 0; l < 8; ++l) {
      const std::string expected = row.forms[l];
      const auto& lexemes = e.translations[l];
      if (expected.empty()) {
        CHECK(lexemes.empty());
        continue;
      }
      REQUIRE(lexemes.size() == 1);
      const bool translit = expected.front() == '(';
      CHECK(lexemes[0].script() == (translit ? Script::Transliteration : Script::OfficialLatin));
      CHECK(lexemes[0].form() == (translit ? expected.substr(1, expected.size() - 2) : expected));
    }
  }
}

TEST_CASE("example gold log carries the documented codes") {
  auto codes_of = [](const std::string& id) {
    std::string out;
    const auto ann = gold_annotation(id);
    for (const auto& [slot, code] : ann.codes) out += (out.empty() ? "" : " ") + code.str();
    return out;
  };
  CHECK(codes_of("alive") == "1T 2T 2T 1T 1T 2T 2T 2T");
  CHECK(codes_of("one") == "1T 1T 1T 1T 1T 1T 1T 1T");
  CHECK(codes_of("book") == "1A 1A 1A 1A 1A 1A 1A 1A");
  CHECK(codes_of("ballet") == "1R 1R 1R 1R 1F 1R 1R 1R");
  CHECK(codes_of("benefit") == "1A 1A 1A 1A 1A 1A 1A 1A");
  CHECK(codes_of("chair") == "1R 2T 2T 2T 3A 1R 2T 4A");
  CHECK(codes_of("manager") == "1T");
  CHECK(codes_of("truck") == "1X");
  CHECK(codes_of("thunder") == "1T");
  CHECK(codes_of("baker") == "1N 2T");
}

TEST_CASE("fixtures round-trip byte for byte") {
  for (const char* path : {"examples/examples.tsv", "pilot/pilot.tsv"}) {
    const std::string text = read_text(fixture(path));
    CHECK(serialize_dataset(parse_dataset(text)) == text);
  }
  for (const char* path : {"examples/annotations/examples/gold.jsonl",
                           "pilot/annotations/pilot/annotator1.jsonl",
                           "pilot/annotations/pilot/annotator2.jsonl"}) {
    const std::string text = read_text(fixture(path));
    CHECK(serialize_annotations(parse_annotations(text)) == text);
  }
}

TEST_CASE("cells with several lexemes") {
  const auto entries = parse_dataset(kHeader + "x\tx\ta; (b)\t\t\t\t\t\t\tc\n");
  const auto& az = entries[0].lexemes(LanguageId::Azerbaijani);
  REQUIRE(az.size() == 2);
  CHECK(az[1].script() == Script::Transliteration);
  CHECK(entries[0].slot_count() == 3);
  CHECK(dataset_error(kHeader + "x\tx\ta;b\t\t\t\t\t\t\t\n") == CodecErrorKind::InvalidForm);
  CHECK(dataset_error(kHeader + "x\tx\ta; \t\t\t\t\t\t\t\n") == CodecErrorKind::InvalidForm);
  CHECK(dataset_error(kHeader + "x\tx\ta;  b\t\t\t\t\t\t\t\n") == CodecErrorKind::InvalidForm);
}

TEST_CASE("missing entry ids come from the gloss") {
  CHECK(slugify("Alive!") == "alive");
  CHECK(slugify("  to  repeat ") == "to-repeat");
  CHECK(slugify("") == "entry");
  const auto entries = parse_dataset(kHeader + "\tTo go\ta\t\t\t\t\t\t\t\n" +
                                     "\tto go\tb\t\t\t\t\t\t\t\n" + "to-go-3\tx\tc\t\t\t\t\t\t\t\n" +
                                     "\tto go\td\t\t\t\t\t\t\t\n");
  REQUIRE(entries.size() == 4);
  CHECK(entries[0].entry_id == "to-go");
  CHECK(entries[1].entry_id == "to-go-2");
  CHECK(entries[2].entry_id == "to-go-3");
  CHECK(entries[3].entry_id == "to-go-4");
}

TEST_CASE("CRLF line endings and decomposed text are accepted") {
  const auto entries = parse_dataset(std::string(kDatasetHeader) + "\r\nx\tx\tgo\xCC\x88k\t\t\t\t\t\t\t\r\n");
  CHECK(entries[0].lexemes(LanguageId::Azerbaijani)[0].form() == "gök");
}

TEST_CASE("dataset errors") {
  CHECK(dataset_error("entry_id\tgloss\n") == CodecErrorKind::BadHeader);
  CHECK(dataset_error(kHeader + "x\tx\ta\n") == CodecErrorKind::BadColumnCount);
  CHECK(dataset_error(kHeader + "x\tx\t(a\t\t\t\t\t\t\t\n") == CodecErrorKind::UnbalancedParentheses);
  CHECK(dataset_error(kHeader + "x\tx\t\t\t\t\t\t\t\t\n") == CodecErrorKind::EmptyEntry);
  CHECK(dataset_error(kHeader + "x y\tx\ta\t\t\t\t\t\t\t\n") == CodecErrorKind::BadEntryId);
  CHECK(dataset_error(kHeader + "x\tx\ta\t\t\t\t\t\t\t\nx\ty\tb\t\t\t\t\t\t\t\n") ==
        CodecErrorKind::DuplicateEntryId);
  CHECK(dataset_error(kHeader + "x\tx\t\xFF\t\t\t\t\t\t\t\n") == CodecErrorKind::InvalidUtf8);
}

TEST_CASE("dataset errors carry line numbers") {
  try {
    parse_dataset(kHeader + "a\ta\tx\t\t\t\t\t\t\t\nb\tb\t\t\t\n");
    FAIL("expected an error");
  } catch (const CodecError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("annotation records") {
  const auto r = parse_annotation_line(kRecord, 1);
  CHECK(r.annotator_id == "ann1");
  CHECK(r.entry_id == "chair");
  CHECK(r.language == LanguageId::Azerbaijani);
  CHECK(r.lexeme_index == 0);
  CHECK(r.code == AnnotationCode{1, Etymology::Russian});
  CHECK(format_timestamp(r.timestamp) == "2024-01-15T10:00:00Z");
  CHECK(serialize_annotation(r) == kRecord);

  std::string tagged = kRecord;
  tagged.replace(tagged.find("Azerbaijani"), 11, "az");
  CHECK(parse_annotation_line(tagged, 1) == r);
}

TEST_CASE("annotation record errors") {
  auto with = [](const std::string& from, const std::string& to) {
    std::string s = kRecord;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK(record_error("not json") == CodecErrorKind::MalformedLine);
  CHECK(record_error("[1,2]") == CodecErrorKind::MalformedLine);
  CHECK(record_error(with("\"code\"", "\"kode\"")) == CodecErrorKind::UnknownKey);
  CHECK(record_error(with(R"(,"code":"1R")", "")) == CodecErrorKind::MissingKey);
  CHECK(record_error(with("Azerbaijani", "Martian")) == CodecErrorKind::UnknownLanguage);
  CHECK(record_error(with(R"("lexeme_index":0)", R"("lexeme_index":-1)")) == CodecErrorKind::BadLexemeIndex);
  CHECK(record_error(with(R"("lexeme_index":0)", R"("lexeme_index":"0")")) == CodecErrorKind::BadLexemeIndex);
  CHECK(record_error(with("\"1R\"", "\"1Z\"")) == CodecErrorKind::BadCode);
  CHECK(record_error(with("2024-01-15T10:00:00Z", "yesterday")) == CodecErrorKind::BadTimestamp);
  CHECK(record_error(with(R"(,"timestamp":"2024-01-15T10:00:00Z")", "")) == CodecErrorKind::MissingKey);

  try {
    parse_annotation_line(with("\"1R\"", "\"9R\""), 3);
  } catch (const CodecError& e) {
    CHECK(e.code_error() == CodeErrorKind::ClassOutOfRange);
  }
}

TEST_CASE("timestamps may be omitted when allowed") {
  const std::string line = R"({"annotator_id":"a","entry_id":"x","language":"Kazakh","lexeme_index":1,"code":"2T"})";
  const auto r = parse_annotation_line(line, 1, {.require_timestamp = false});
  CHECK(r.timestamp == Timestamp{});
}

TEST_CASE("timestamp formats") {
  const Timestamp t = parse_timestamp("2024-03-01T09:00:15.250Z");
  CHECK(format_timestamp(t) == "2024-03-01T09:00:15.250Z");
  CHECK(parse_timestamp("2024-03-01T09:00:15.250+00:00") == t);
  CHECK(parse_timestamp("2024-03-01T09:00:15.2509Z") == t);
  CHECK(format_timestamp(parse_timestamp("1999-12-31T23:59:59Z")) == "1999-12-31T23:59:59Z");
  CHECK_THROWS_AS(parse_timestamp("2024-03-01 09:00:15Z"), std::invalid_argument);
  CHECK_THROWS_AS(parse_timestamp("2024-03-01T09:00:15+02:00"), std::invalid_argument);
  CHECK_THROWS_AS(parse_timestamp("2024-02-30T09:00:15Z"), std::invalid_argument);
}

TEST_CASE("newest record in log order wins") {
  auto rec = [](const char* code, const char* stamp) {
    return AnnotationRecord{"a", "chair", LanguageId::Kazakh, 0, parse_code(code), parse_timestamp(stamp)};
  };
  // The later line wins even with an earlier timestamp.
  const std::vector<AnnotationRecord> log{rec("1T", "2024-01-02T00:00:00Z"),
                                          rec("2T", "2024-01-01T00:00:00Z")};
  const auto resolved = resolve_newest_wins(log);
  REQUIRE(resolved.size() == 1);
  CHECK(resolved[0].code.str() == "2T");
}

TEST_CASE("lenient log reading reports each bad line") {
  const std::string text = kRecord + "\nbroken\n" + kRecord + "\n{}\n";
  const auto read = read_annotation_log(text);
  CHECK(read.records.size() == 2);
  CHECK(read.line_numbers == std::vector<std::size_t>{1, 3});
  REQUIRE(read.errors.size() == 2);
  CHECK(read.errors[0].line() == 2);
  CHECK(read.errors[1].line() == 4);
}

TEST_CASE("strict log parsing rejects blank lines") {
  CHECK_THROWS_AS(parse_annotations(kRecord + "\n\n" + kRecord + "\n"), CodecError);
  CHECK(parse_annotations("").empty());
  CHECK(parse_annotations(kRecord).size() == 1);
}
