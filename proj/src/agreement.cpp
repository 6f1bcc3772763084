#include "turkann/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

namespace turkann {
namespace {

using i128 = __int128;

i128 abs128(i128 v) { return v < 0 ? -v : v; }

i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Reduced before dividing so equal rationals always give the same double.
double ratio(i128 num, i128 den) {
  const i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

std::uint64_t choose2(std::uint64_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

bool contains(std::span<const Etymology> set, Etymology e) {
  return std::find(set.begin(), set.end(), e) != set.end();
}

using SlotKey = std::pair<std::string, Slot>;

std::map<SlotKey, AnnotationCode> effective_codes(std::span<const AnnotationRecord> records) {
  std::map<SlotKey, AnnotationCode> out;
  for (const auto& r : records) out[SlotKey{r.entry_id, r.slot()}] = r.code;
  return out;
}

}  // namespace

ContingencyMatrix::ContingencyMatrix(std::vector<Etymology> categories)
    : categories_(std::move(categories)), counts_(categories_.size() * categories_.size(), 0) {
  std::set<Etymology> unique(categories_.begin(), categories_.end());
  if (unique.size() != categories_.size())
    throw std::invalid_argument("contingency categories must be distinct");
}

ContingencyMatrix::ContingencyMatrix(std::vector<Etymology> categories,
                                     const std::vector<std::vector<std::uint64_t>>& rows)
    : ContingencyMatrix(std::move(categories)) {
  if (rows.size() != size()) throw std::invalid_argument("row count does not match categories");
  for (std::size_t i = 0; i < size(); ++i) {
    if (rows[i].size() != size()) throw std::invalid_argument("contingency matrix must be square");
    for (std::size_t j = 0; j < size(); ++j) at(i, j) = rows[i][j];
  }
}

std::optional<std::size_t> ContingencyMatrix::index_of(Etymology e) const {
  auto it = std::find(categories_.begin(), categories_.end(), e);
  if (it == categories_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - categories_.begin());
}

std::uint64_t ContingencyMatrix::n() const {
  std::uint64_t total = 0;
  for (auto c : counts_) total += c;
  return total;
}

std::uint64_t ContingencyMatrix::trace() const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < size(); ++i) total += at(i, i);
  return total;
}

std::uint64_t ContingencyMatrix::row_total(std::size_t row) const {
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < size(); ++j) total += at(row, j);
  return total;
}

std::uint64_t ContingencyMatrix::col_total(std::size_t col) const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < size(); ++i) total += at(i, col);
  return total;
}

ContingencyMatrix ContingencyMatrix::transposed() const {
  ContingencyMatrix out(categories_);
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) out.at(j, i) = at(i, j);
  return out;
}

ContingencyMatrix ContingencyMatrix::without_empty_categories() const {
  std::vector<Etymology> keep;
  for (std::size_t i = 0; i < size(); ++i) {
    if (row_total(i) != 0 || col_total(i) != 0) keep.push_back(categories_[i]);
  }
  return select(keep);
}

ContingencyMatrix ContingencyMatrix::select(std::span<const Etymology> keep) const {
  std::vector<std::size_t> idx;
  for (Etymology e : keep) {
    auto i = index_of(e);
    if (!i) throw std::invalid_argument(std::string("category ") + to_char(e) + " not in matrix");
    idx.push_back(*i);
  }
  ContingencyMatrix out(std::vector<Etymology>(keep.begin(), keep.end()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out.at(i, j) = at(idx[i], idx[j]);
  return out;
}

ContingencyResult build_contingency(std::span<const AnnotationRecord> first,
                                    std::span<const AnnotationRecord> second,
                                    std::span<const Etymology> categories,
                                    std::span<const Etymology> excluded) {
  std::vector<Etymology> kept;
  for (Etymology e : categories) {
    if (!contains(excluded, e)) kept.push_back(e);
  }
  ContingencyResult result{ContingencyMatrix(std::move(kept))};

  const auto a = effective_codes(first);
  const auto b = effective_codes(second);
  for (const auto& [key, code_a] : a) {
    auto it = b.find(key);
    if (it == b.end()) {
      ++result.only_first;
      continue;
    }
    const Etymology label_a = code_a.etymology;
    const Etymology label_b = it->second.etymology;
    if (contains(excluded, label_a) || contains(excluded, label_b)) {
      ++result.excluded;
      continue;
    }
    const auto col = result.matrix.index_of(label_a);
    const auto row = result.matrix.index_of(label_b);
    if (!row || !col) {
      ++result.outside_categories;
      continue;
    }
    ++result.matrix.at(*row, *col);
  }
  for (const auto& [key, code_b] : b) {
    if (!a.count(key)) ++result.only_second;
  }
  return result;
}

std::string_view to_string(CiMethod method) {
  return method == CiMethod::LargeSample ? "large-sample" : "fleiss-cohen-everitt";
}

std::optional<CiMethod> ci_method_from_string(std::string_view text) {
  if (text == "large-sample") return CiMethod::LargeSample;
  if (text == "fleiss-cohen-everitt") return CiMethod::FleissCohenEveritt;
  return std::nullopt;
}

KappaResult cohen_kappa(const ContingencyMatrix& m, const KappaOptions& options) {
  KappaResult r;
  r.ci_method = options.ci_method;
  r.n = m.n();
  if (r.n == 0) throw std::invalid_argument("cohen_kappa: empty contingency matrix");
  r.agreements = m.trace();

  std::vector<std::uint64_t> rows(m.size()), cols(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    rows[i] = m.row_total(i);
    cols[i] = m.col_total(i);
  }
  i128 chance = 0;
  for (std::size_t i = 0; i < m.size(); ++i) chance += static_cast<i128>(rows[i]) * cols[i];
  r.chance_products = static_cast<std::uint64_t>(chance);

  const i128 n = r.n;
  const i128 n2 = n * n;
  r.p_o = ratio(r.agreements, n);
  r.p_e = ratio(chance, n2);

  if (chance == n2) {
    r.degenerate = true;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.kappa = r.se = nan;
    r.ci95 = {nan, nan};
    return r;
  }
  // (p_o - p_e) / (1 - p_e) with the common n^2 cleared.
  r.kappa = ratio(n * static_cast<i128>(r.agreements) - chance, n2 - chance);

  const double dn = static_cast<double>(r.n);
  double variance = 0;
  if (options.ci_method == CiMethod::LargeSample) {
    variance = r.p_o * (1 - r.p_o) / (dn * (1 - r.p_e) * (1 - r.p_e));
  } else {
    const double k = r.kappa;
    double diag = 0, off = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double pi = rows[i] / dn;  // second annotator's marginal
      const double qi = cols[i] / dn;  // first annotator's marginal
      for (std::size_t j = 0; j < m.size(); ++j) {
        const double p = m.at(i, j) / dn;
        if (p == 0) continue;
        if (i == j) {
          const double t = 1 - (pi + qi) * (1 - k);
          diag += p * t * t;
        } else {
          const double t = cols[i] / dn + rows[j] / dn;
          off += p * t * t;
        }
      }
    }
    const double c = k - r.p_e * (1 - k);
    const double num = diag + (1 - k) * (1 - k) * off - c * c;
    variance = std::max(0.0, num) / (dn * (1 - r.p_e) * (1 - r.p_e));
  }
  r.se = std::sqrt(variance);
  r.ci95 = {std::clamp(r.kappa - options.z * r.se, -1.0, 1.0),
            std::clamp(r.kappa + options.z * r.se, -1.0, 1.0)};
  return r;
}

AgreementResult restricted_kappa(std::span<const AnnotationRecord> first,
                                 std::span<const AnnotationRecord> second,
                                 std::span<const Etymology> excluded,
                                 std::span<const Etymology> categories,
                                 const KappaOptions& options) {
  AgreementResult out{build_contingency(first, second, categories, excluded), std::nullopt};
  if (!out.contingency.empty_intersection())
    out.kappa = cohen_kappa(out.contingency.matrix, options);
  return out;
}

PairCounts& PairCounts::operator+=(const PairCounts& o) {
  together_both += o.together_both;
  together_first_only += o.together_first_only;
  together_second_only += o.together_second_only;
  apart_both += o.apart_both;
  return *this;
}

PairCounts count_pairs(const CognatePartition& reference, const CognatePartition& candidate) {
  const auto ref = reference.block_index();
  const auto cand = candidate.block_index();
  if (ref.size() != cand.size())
    throw SlotSetMismatch("partitions cover " + std::to_string(ref.size()) + " and " +
                          std::to_string(cand.size()) + " slots");
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> overlap;
  for (const auto& [slot, block] : ref) {
    auto it = cand.find(slot);
    if (it == cand.end())
      throw SlotSetMismatch("slot " + to_string(slot) + " missing from the candidate partition");
    ++overlap[{block, it->second}];
  }
  std::uint64_t both = 0;
  for (const auto& [key, count] : overlap) both += choose2(count);
  std::uint64_t ref_pairs = 0, cand_pairs = 0;
  for (const auto& block : reference.blocks()) ref_pairs += choose2(block.size());
  for (const auto& block : candidate.blocks()) cand_pairs += choose2(block.size());

  PairCounts out;
  out.together_both = both;
  out.together_first_only = ref_pairs - both;
  out.together_second_only = cand_pairs - both;
  out.apart_both = choose2(ref.size()) - ref_pairs - cand_pairs + both;
  return out;
}

PartitionAgreement agreement_from_pairs(const PairCounts& pairs) {
  const i128 a = pairs.together_both;
  const i128 b = pairs.together_first_only;
  const i128 c = pairs.together_second_only;
  const i128 d = pairs.apart_both;
  const bool consistent = b == 0 && c == 0;

  PartitionAgreement out;
  out.pairs = pairs;
  out.pair_precision = a + c > 0 ? ratio(a, a + c) : (b == 0 ? 1.0 : 0.0);
  out.pair_recall = a + b > 0 ? ratio(a, a + b) : (c == 0 ? 1.0 : 0.0);
  out.pair_f1 = 2 * a + b + c > 0 ? ratio(2 * a, 2 * a + b + c) : 1.0;
  const i128 total = a + b + c + d;
  out.rand_index = total > 0 ? ratio(a + d, total) : 1.0;
  // Pair-counting form of the Hubert-Arabie adjusted Rand index.
  const i128 den = (a + b) * (b + d) + (a + c) * (c + d);
  out.adjusted_rand = den != 0 ? ratio(2 * (a * d - b * c), den) : (consistent ? 1.0 : 0.0);
  return out;
}

PartitionAgreement partition_agreement(const CognatePartition& reference,
                                       const CognatePartition& candidate) {
  return agreement_from_pairs(count_pairs(reference, candidate));
}

CognateAgreement cognate_agreement(std::span<const AnnotationRecord> first,
                                   std::span<const AnnotationRecord> second) {
  const auto a = effective_codes(first);
  const auto b = effective_codes(second);

  // entry -> slot -> (class in first, class in second)
  std::map<std::string, std::map<Slot, std::pair<int, int>>> shared;
  for (const auto& [key, code_a] : a) {
    auto it = b.find(key);
    if (it != b.end())
      shared[key.first][key.second] = {code_a.cognate_class, it->second.cognate_class};
  }

  PairCounts total;
  for (const auto& [entry, slots] : shared) {
    std::map<int, std::vector<Slot>> blocks_a, blocks_b;
    for (const auto& [slot, classes] : slots) {
      blocks_a[classes.first].push_back(slot);
      blocks_b[classes.second].push_back(slot);
    }
    auto to_partition = [](std::map<int, std::vector<Slot>>& blocks) {
      std::vector<std::vector<Slot>> out;
      for (auto& [cls, block] : blocks) out.push_back(std::move(block));
      return CognatePartition(std::move(out));
    };
    total += count_pairs(to_partition(blocks_a), to_partition(blocks_b));
  }
  return CognateAgreement{agreement_from_pairs(total), shared.size()};
}

AgreementReport make_agreement_report(std::string first_annotator,
                                      std::span<const AnnotationRecord> first,
                                      std::string second_annotator,
                                      std::span<const AnnotationRecord> second,
                                      const AgreementReportOptions& options) {
  AgreementReport report;
  report.first_annotator = std::move(first_annotator);
  report.second_annotator = std::move(second_annotator);
  report.restricted = options.restricted;
  if (options.restricted)
    report.excluded.assign(kHardEtymologies.begin(), kHardEtymologies.end());

  auto& result = report.etymology;
  result.contingency = build_contingency(first, second, options.categories, report.excluded);
  if (options.compact)
    result.contingency.matrix = result.contingency.matrix.without_empty_categories();
  if (!result.contingency.empty_intersection())
    result.kappa = cohen_kappa(result.contingency.matrix, options.kappa);
  report.cognates = cognate_agreement(first, second);
  return report;
}

}  // namespace turkann
