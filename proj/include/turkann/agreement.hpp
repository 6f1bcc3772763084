#pragma once

// Two-annotator agreement on etymology letters (Cohen's kappa over a
// contingency matrix) and on cognate partitions (pair-counting metrics).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "turkann/codec.hpp"
#include "turkann/lexicon.hpp"

namespace turkann {

/// Square matrix of paired labels. Rows are the second annotator's labels
/// (vertical axis), columns the first annotator's (horizontal axis):
/// at(i, j) counts slots the second annotator labeled categories()[i] and
/// the first labeled categories()[j].
class ContingencyMatrix {
 public:
  ContingencyMatrix() = default;
  explicit ContingencyMatrix(std::vector<Etymology> categories);
  /// Throws std::invalid_argument unless `rows` is square and matches the
  /// category count, or categories repeat.
  ContingencyMatrix(std::vector<Etymology> categories,
                    const std::vector<std::vector<std::uint64_t>>& rows);

  const std::vector<Etymology>& categories() const noexcept { return categories_; }
  std::size_t size() const noexcept { return categories_.size(); }
  std::optional<std::size_t> index_of(Etymology e) const;

  std::uint64_t at(std::size_t row, std::size_t col) const { return counts_[row * size() + col]; }
  std::uint64_t& at(std::size_t row, std::size_t col) { return counts_[row * size() + col]; }

  std::uint64_t n() const;
  std::uint64_t trace() const;
  std::uint64_t row_total(std::size_t row) const;
  std::uint64_t col_total(std::size_t col) const;

  ContingencyMatrix transposed() const;
  /// Drops categories whose row and column are both all-zero.
  ContingencyMatrix without_empty_categories() const;
  /// Keeps only the listed categories, in the listed order. Throws if one
  /// is missing.
  ContingencyMatrix select(std::span<const Etymology> keep) const;

  friend bool operator==(const ContingencyMatrix&, const ContingencyMatrix&) = default;

 private:
  std::vector<Etymology> categories_;
  std::vector<std::uint64_t> counts_;
};

struct ContingencyResult {
  ContingencyMatrix matrix;
  // Slots annotated by one annotator only.
  std::size_t only_first = 0;
  std::size_t only_second = 0;
  // Shared slots dropped because a label is not a matrix category.
  std::size_t outside_categories = 0;
  // Shared slots dropped because either annotator used an excluded letter.
  std::size_t excluded = 0;

  bool empty_intersection() const { return matrix.n() == 0; }
};

/// Pairs the effective (newest-wins) codes of two annotators by
/// (entry, slot). `first` is the horizontal annotator. Slots where either
/// label is in `excluded` are dropped and the excluded letters are removed
/// from the category list.
ContingencyResult build_contingency(std::span<const AnnotationRecord> first,
                                    std::span<const AnnotationRecord> second,
                                    std::span<const Etymology> categories,
                                    std::span<const Etymology> excluded = {});

enum class CiMethod {
  // sqrt(p_o (1 - p_o) / (n (1 - p_e)^2))
  LargeSample,
  // Fleiss, Cohen & Everitt (1969) asymptotic variance.
  FleissCohenEveritt,
};

std::string_view to_string(CiMethod method);
std::optional<CiMethod> ci_method_from_string(std::string_view text);

struct KappaOptions {
  CiMethod ci_method = CiMethod::LargeSample;
  double z = 1.96;
};

struct KappaResult {
  double kappa = 0;
  double p_o = 0;
  double p_e = 0;
  std::uint64_t n = 0;
  // p_o = agreements / n, p_e = chance_products / n^2.
  std::uint64_t agreements = 0;
  std::uint64_t chance_products = 0;
  double se = 0;
  std::pair<double, double> ci95{0, 0};
  CiMethod ci_method = CiMethod::LargeSample;
  // p_e == 1: all mass in one row and column, kappa undefined (NaN).
  bool degenerate = false;
};

/// Throws std::invalid_argument when the matrix is empty.
KappaResult cohen_kappa(const ContingencyMatrix& m, const KappaOptions& options = {});

struct AgreementResult {
  ContingencyResult contingency;
  std::optional<KappaResult> kappa;  // nullopt on an empty intersection
};

/// build_contingency + cohen_kappa. With the default exclusion set this is
/// kappa over the slots where neither annotator used Q, X, V or N.
AgreementResult restricted_kappa(std::span<const AnnotationRecord> first,
                                 std::span<const AnnotationRecord> second,
                                 std::span<const Etymology> excluded = kHardEtymologies,
                                 std::span<const Etymology> categories = kEtymologyAlphabet,
                                 const KappaOptions& options = {});

// Pair counting over unordered slot pairs.
struct PairCounts {
  std::uint64_t together_both = 0;
  std::uint64_t together_first_only = 0;
  std::uint64_t together_second_only = 0;
  std::uint64_t apart_both = 0;

  std::uint64_t total() const {
    return together_both + together_first_only + together_second_only + apart_both;
  }
  PairCounts& operator+=(const PairCounts& o);
  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

struct PartitionAgreement {
  PairCounts pairs;
  double pair_precision = 1;
  double pair_recall = 1;
  double pair_f1 = 1;
  double rand_index = 1;
  double adjusted_rand = 1;
};

class SlotSetMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// `reference` plays the gold role: precision is measured against the
/// candidate's co-clustered pairs, recall against the reference's.
/// Throws SlotSetMismatch when the partitions cover different slots.
PairCounts count_pairs(const CognatePartition& reference, const CognatePartition& candidate);

/// Metrics from pair counts. A ratio with an empty denominator is 1 when
/// the two sides agree on every pair and 0 otherwise.
PartitionAgreement agreement_from_pairs(const PairCounts& pairs);

PartitionAgreement partition_agreement(const CognatePartition& reference,
                                       const CognatePartition& candidate);

/// Micro-averaged cognate agreement between two annotators: entries both
/// annotated, restricted to the slots both annotated, pair counts summed.
struct CognateAgreement {
  PartitionAgreement metrics;
  std::size_t entries = 0;
};

CognateAgreement cognate_agreement(std::span<const AnnotationRecord> first,
                                   std::span<const AnnotationRecord> second);

struct AgreementReport {
  std::string first_annotator;
  std::string second_annotator;
  bool restricted = false;
  std::vector<Etymology> excluded;
  AgreementResult etymology;
  CognateAgreement cognates;
};

struct AgreementReportOptions {
  bool restricted = false;
  std::vector<Etymology> categories{kEtymologyAlphabet.begin(), kEtymologyAlphabet.end()};
  // Drop all-zero categories from the reported matrix.
  bool compact = true;
  KappaOptions kappa;
};

AgreementReport make_agreement_report(std::string first_annotator,
                                      std::span<const AnnotationRecord> first,
                                      std::string second_annotator,
                                      std::span<const AnnotationRecord> second,
                                      const AgreementReportOptions& options = {});

}  // namespace turkann
