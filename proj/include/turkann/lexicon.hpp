#pragma once

// Core domain types for cognate/etymology annotation of eight-way Turkic
// dictionary entries.
//
// Every lexeme in an entry is annotated with a two-character code: a
// cognate-class digit (1-8; equal digits within one entry mark mutually
// cognate words) followed by an etymology letter.

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "turkann/language.hpp"

namespace turkann {

enum class Script {
  OfficialLatin,
  // Dictionary romanization; written parenthesized in source tables.
  Transliteration,
};

enum class LexiconErrorKind {
  EmptyForm,
  SurroundingWhitespace,
  UnbalancedParentheses,
  ForbiddenCharacter,
  AmbiguousParentheses,
  InvalidUtf8,
};

std::string_view to_string(LexiconErrorKind kind);

class LexiconError : public std::invalid_argument {
 public:
  LexiconError(LexiconErrorKind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}
  LexiconErrorKind kind() const noexcept { return kind_; }

 private:
  LexiconErrorKind kind_;
};

/// A surface form. Construction validates the form and normalizes it to NFC.
class Lexeme {
 public:
  /// Throws LexiconError. Forms may not contain tabs, newlines or ';' (the
  /// dataset cell separator), and an OfficialLatin form may not be wrapped in
  /// a single pair of parentheses (it would read back as a transliteration).
  static Lexeme create(std::string_view form, Script script);

  const std::string& form() const noexcept { return form_; }
  Script script() const noexcept { return script_; }

  friend bool operator==(const Lexeme&, const Lexeme&) = default;

 private:
  Lexeme(std::string form, Script script) : form_(std::move(form)), script_(script) {}

  std::string form_;
  Script script_;
};

/// (language, lexeme index) identifies one annotatable word in an entry.
/// Ordering is canonical: language column order, then lexeme index.
struct Slot {
  LanguageId language;
  std::size_t lexeme_index;

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

std::string to_string(const Slot& slot);

struct DictionaryEntry {
  std::string entry_id;
  std::string gloss;
  std::array<std::vector<Lexeme>, kLanguageCount> translations;

  std::vector<Lexeme>& lexemes(LanguageId id) { return translations[language_index(id)]; }
  const std::vector<Lexeme>& lexemes(LanguageId id) const {
    return translations[language_index(id)];
  }

  bool has_slot(const Slot& slot) const {
    return slot.lexeme_index < lexemes(slot.language).size();
  }
  const Lexeme& lexeme(const Slot& slot) const {
    return lexemes(slot.language).at(slot.lexeme_index);
  }

  /// All slots in canonical order.
  std::vector<Slot> slots() const;
  std::size_t slot_count() const;

  friend bool operator==(const DictionaryEntry&, const DictionaryEntry&) = default;
};

enum class Etymology : char {
  Turkic = 'T',
  Arabic = 'A',
  Persian = 'P',
  Russian = 'R',
  French = 'F',
  English = 'E',
  Italian = 'I',
  Greek = 'G',
  Chinese = 'C',
  Unknown = 'Q',
  // Multi-language exceptions.
  MixedCompound = 'X',
  ForeignBaseVerb = 'V',
  ForeignBaseNominal = 'N',
};

/// The closed alphabet, single-origin letters first, then the exceptions.
inline constexpr std::array<Etymology, 13> kEtymologyAlphabet{
    Etymology::Turkic,        Etymology::Arabic,          Etymology::Persian,
    Etymology::Russian,       Etymology::French,          Etymology::English,
    Etymology::Italian,       Etymology::Greek,           Etymology::Chinese,
    Etymology::Unknown,       Etymology::MixedCompound,   Etymology::ForeignBaseVerb,
    Etymology::ForeignBaseNominal,
};

/// Q, X, V and N: inconclusive origin or a multi-language exception.
inline constexpr std::array<Etymology, 4> kHardEtymologies{
    Etymology::Unknown, Etymology::MixedCompound, Etymology::ForeignBaseVerb,
    Etymology::ForeignBaseNominal,
};

constexpr char to_char(Etymology e) { return static_cast<char>(e); }
std::optional<Etymology> etymology_from_char(char c);
std::string_view describe(Etymology e);

inline constexpr int kMaxCognateClass = 8;

struct AnnotationCode {
  int cognate_class;
  Etymology etymology;

  std::string str() const;

  friend bool operator==(const AnnotationCode&, const AnnotationCode&) = default;
};

enum class CodeErrorKind { BadLength, ClassOutOfRange, UnknownEtymologyLetter };

std::string_view to_string(CodeErrorKind kind);

class CodeError : public std::invalid_argument {
 public:
  CodeError(CodeErrorKind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}
  CodeErrorKind kind() const noexcept { return kind_; }

 private:
  CodeErrorKind kind_;
};

/// Returns the failure reason, or nullopt if `text` is a valid code.
std::optional<CodeErrorKind> check_code(std::string_view text);

/// Accepts exactly a digit 1-8 followed by an uppercase alphabet letter.
/// Throws CodeError.
AnnotationCode parse_code(std::string_view text);

struct EntryAnnotation {
  std::string entry_id;
  std::string annotator_id;
  std::map<Slot, AnnotationCode> codes;

  friend bool operator==(const EntryAnnotation&, const EntryAnnotation&) = default;
};

/// Blocks of mutually cognate slots. Held in normal form: every block is
/// sorted and blocks are ordered by their first slot, so equal partitions
/// compare equal regardless of labels.
class CognatePartition {
 public:
  CognatePartition() = default;
  /// Normalizes. Throws std::invalid_argument on empty or overlapping blocks.
  explicit CognatePartition(std::vector<std::vector<Slot>> blocks);

  const std::vector<std::vector<Slot>>& blocks() const noexcept { return blocks_; }
  std::vector<Slot> slots() const;
  std::size_t size() const;

  /// Block index per slot, in canonical slot order.
  std::map<Slot, std::size_t> block_index() const;

  friend bool operator==(const CognatePartition&, const CognatePartition&) = default;

 private:
  std::vector<std::vector<Slot>> blocks_;
};

class DanglingSlotError : public std::invalid_argument {
 public:
  DanglingSlotError(Slot slot, const std::string& what)
      : std::invalid_argument(what), slot_(slot) {}
  Slot slot() const noexcept { return slot_; }

 private:
  Slot slot_;
};

/// Renumbers cognate classes 1..k in order of first occurrence over the
/// canonical slot order. Etymology letters are untouched; idempotent.
EntryAnnotation canonicalize(const EntryAnnotation& ann);

/// As above, but first checks every slot exists in `entry`
/// (throws DanglingSlotError).
EntryAnnotation canonicalize(const EntryAnnotation& ann, const DictionaryEntry& entry);

CognatePartition partition_of(const EntryAnnotation& ann);

/// Labels a partition with canonical classes (1..k by first slot) and the
/// given etymology letter on every slot.
EntryAnnotation annotation_from_partition(const CognatePartition& partition,
                                          std::string entry_id, std::string annotator_id,
                                          Etymology etymology);

enum class Severity { Error, Warning };

enum class DiagnosticKind {
  EntryMismatch,
  DanglingSlot,
  BadCode,
  ClassExceedsSlots,
  TooManySlots,
  NonCanonicalNumbering,
  MixedEtymologyInBlock,
};

std::string_view to_string(Severity severity);
std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  Severity severity;
  DiagnosticKind kind;
  std::optional<Slot> slot;
  std::string message;
};

struct ValidationOptions {
  // Advisory lint: a block mixing etymology letters is legal (loans of one
  // origin that arrived through different languages), so only a warning.
  bool lint_mixed_etymology = true;
};

/// Errors: entry id mismatch, codes on slots missing from the entry, codes
/// out of range, a class number larger than the entry's slot count, and
/// entries with more slots than there are class digits. Warnings:
/// non-canonical numbering and (optionally) mixed letters within a block.
std::vector<Diagnostic> validate_entry_annotation(const DictionaryEntry& entry,
                                                  const EntryAnnotation& ann,
                                                  const ValidationOptions& options = {});

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace turkann
