#pragma once

// Form-similarity baseline for cognate suggestions: fold each lexeme to a
// plain lowercase Latin skeleton, link pairs whose similarity reaches a
// threshold, and propose the connected components as cognate blocks.
// Proposals are never persisted; they pre-fill the annotator's view.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "turkann/agreement.hpp"
#include "turkann/lexicon.hpp"

namespace turkann {

enum class SimilarityMetric { NormalizedLevenshtein, Lcsr };

std::string_view to_string(SimilarityMetric metric);
std::optional<SimilarityMetric> metric_from_string(std::string_view text);

struct SimilarityConfig {
  double threshold = 0.6;
  SimilarityMetric metric = SimilarityMetric::NormalizedLevenshtein;

  /// Throws std::invalid_argument unless 0 <= threshold <= 1.
  void validate() const;
};

struct NormalizedForm {
  std::string text;  // only [a-z], ' ' and '-'
  Slot source;
};

/// Strip parentheses, lowercase, fold diacritics and Turkic-specific
/// letters to ASCII (see docs/folding.md), drop anything else, collapse
/// spaces. Idempotent.
std::string fold_form(std::string_view form);

NormalizedForm normalize_form(const Lexeme& lexeme, Slot source);

/// Unit-cost edit distance over code points.
std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b);
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

/// 1 - dist / max(|a|, |b|) or |LCS| / max(|a|, |b|); two empty strings
/// score 1.
double similarity(std::string_view a, std::string_view b, SimilarityMetric metric);
double similarity(const NormalizedForm& a, const NormalizedForm& b, SimilarityMetric metric);

/// Connected components of the graph linking slots whose folded forms
/// score at least cfg.threshold.
CognatePartition propose_partition(const DictionaryEntry& entry, const SimilarityConfig& cfg = {});

class MissingGold : public std::runtime_error {
 public:
  explicit MissingGold(std::string entry_id)
      : std::runtime_error("no gold annotation covering every slot of entry '" + entry_id + "'"),
        entry_id_(std::move(entry_id)) {}
  const std::string& entry_id() const noexcept { return entry_id_; }

 private:
  std::string entry_id_;
};

struct EntryEvaluation {
  std::string entry_id;
  CognatePartition proposed;
  CognatePartition gold;
  PartitionAgreement metrics;
};

struct SuggestionReport {
  SimilarityConfig config;
  std::vector<EntryEvaluation> entries;
  // Micro-average: pair counts summed over entries.
  PartitionAgreement aggregate;
};

struct EvaluationOptions {
  // Skip entries without complete gold instead of throwing MissingGold.
  bool skip_missing = false;
};

/// Compares proposals against gold partitions entry by entry. Gold is
/// matched by entry_id and must cover every slot of the entry.
SuggestionReport evaluate_suggestions(std::span<const DictionaryEntry> entries,
                                      std::span<const EntryAnnotation> gold,
                                      const SimilarityConfig& cfg,
                                      const EvaluationOptions& options = {});

std::vector<SuggestionReport> sweep_thresholds(std::span<const DictionaryEntry> entries,
                                               std::span<const EntryAnnotation> gold,
                                               std::span<const double> thresholds,
                                               SimilarityMetric metric,
                                               const EvaluationOptions& options = {});

}  // namespace turkann
