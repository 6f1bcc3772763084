#pragma once

// File formats.
//
// Dataset: UTF-8 TSV, LF line endings, header
//   entry_id \t gloss \t az \t kk \t ky \t tt \t tr \t tk \t ug \t uz
// one entry per line. A cell holds zero or more lexemes joined by "; ";
// a lexeme written "(form)" is a dictionary transliteration. An empty
// entry_id cell is filled with the slugified gloss (plus "-2", "-3", ...
// for repeated glosses).
//
// Annotation log: UTF-8, one JSON object per line with exactly the keys
// annotator_id, entry_id, language, lexeme_index, code, timestamp.
// Records are events; for a given (annotator, entry, slot) the last record
// in log order wins.

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "turkann/lexicon.hpp"

namespace turkann {

inline constexpr std::string_view kDatasetHeader =
    "entry_id\tgloss\taz\tkk\tky\ttt\ttr\ttk\tug\tuz";
inline constexpr std::string_view kLexemeSeparator = "; ";

enum class CodecErrorKind {
  InvalidUtf8,
  BadHeader,
  BadColumnCount,
  UnbalancedParentheses,
  InvalidForm,
  EmptyEntry,
  BadEntryId,
  DuplicateEntryId,
  MalformedLine,
  UnknownKey,
  MissingKey,
  UnknownLanguage,
  BadLexemeIndex,
  BadCode,
  BadTimestamp,
};

std::string_view to_string(CodecErrorKind kind);

class CodecError : public std::runtime_error {
 public:
  CodecError(CodecErrorKind kind, std::size_t line, const std::string& message,
             std::optional<CodeErrorKind> code_error = std::nullopt);

  CodecErrorKind kind() const noexcept { return kind_; }
  /// 1-based; 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }
  /// Set for BadCode.
  std::optional<CodeErrorKind> code_error() const noexcept { return code_error_; }

 private:
  CodecErrorKind kind_;
  std::size_t line_;
  std::string message_;
  std::optional<CodeErrorKind> code_error_;
};

/// Lowercase ASCII slug of a gloss: runs of anything other than [a-z0-9]
/// become a single '-', trimmed at both ends. Empty input yields "entry".
std::string slugify(std::string_view gloss);

/// Throws CodecError. Text is NFC-normalized on the way in.
std::vector<DictionaryEntry> parse_dataset(std::string_view text);

std::string serialize_dataset(std::span<const DictionaryEntry> entries);

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// RFC 3339 UTC, "YYYY-MM-DDTHH:MM:SS[.mmm]Z"; milliseconds are written only
/// when non-zero.
std::string format_timestamp(Timestamp t);

/// Accepts "Z" or "+00:00"; fractional digits beyond milliseconds are
/// truncated. Throws std::invalid_argument.
Timestamp parse_timestamp(std::string_view text);

struct AnnotationRecord {
  std::string annotator_id;
  std::string entry_id;
  LanguageId language;
  std::size_t lexeme_index;
  AnnotationCode code;
  Timestamp timestamp;

  Slot slot() const { return {language, lexeme_index}; }

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct RecordParseOptions {
  // The service stamps records that arrive without a timestamp.
  bool require_timestamp = true;
};

/// Parses one log line. Throws CodecError tagged with `line_no`.
AnnotationRecord parse_annotation_line(std::string_view line, std::size_t line_no,
                                       const RecordParseOptions& options = {});

/// One compact JSON object, keys in canonical order, no trailing newline.
std::string serialize_annotation(const AnnotationRecord& record);

/// Throws on the first malformed line. Blank lines are not allowed except
/// for the final newline.
std::vector<AnnotationRecord> parse_annotations(std::string_view text);

std::string serialize_annotations(std::span<const AnnotationRecord> records);

/// Non-throwing variant collecting one error per bad line.
struct AnnotationLogRead {
  std::vector<AnnotationRecord> records;
  std::vector<std::size_t> line_numbers;  // parallel to records
  std::vector<CodecError> errors;
};

AnnotationLogRead read_annotation_log(std::string_view text);

/// Newest-wins resolution per (annotator, entry, slot). The surviving
/// records keep their relative log order.
std::vector<AnnotationRecord> resolve_newest_wins(std::span<const AnnotationRecord> records);

/// Groups records into per-(annotator, entry) annotations, in order of
/// first appearance. Records should already be resolved; if not, later
/// records overwrite earlier ones.
std::vector<EntryAnnotation> group_by_entry(std::span<const AnnotationRecord> records);

}  // namespace turkann
