#include "turkann/suggest.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "turkann/unicode.hpp"

namespace turkann {
namespace {

// Letters that carry no combining mark after NFD but still need an ASCII
// stand-in. Everything else outside [a-z] is dropped.
char32_t fold_letter(char32_t cp) {
  switch (cp) {
    case U'ı': return U'i';  // dotless i
    case U'ə': return U'e';  // schwa (Azerbaijani)
    case U'ɵ':               // barred o (Kazakh romanizations)
    case U'ø': return U'o';
    case U'ŋ': return U'n';  // eng
    case U'đ': return U'd';
    case U'ł': return U'l';
    case U'ħ': return U'h';
    default: return cp;
  }
}

bool is_space_cp(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == 0x00A0 || cp == 0x3000;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::string_view to_string(SimilarityMetric metric) {
  return metric == SimilarityMetric::NormalizedLevenshtein ? "normalized-levenshtein" : "lcsr";
}

std::optional<SimilarityMetric> metric_from_string(std::string_view text) {
  if (text == "normalized-levenshtein") return SimilarityMetric::NormalizedLevenshtein;
  if (text == "lcsr") return SimilarityMetric::Lcsr;
  return std::nullopt;
}

void SimilarityConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("similarity threshold must lie in [0, 1]");
}

std::string fold_form(std::string_view form) {
  const std::u32string decomposed = unicode::decode(unicode::to_nfd(unicode::to_lower(form)));
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : decomposed) {
    if (unicode::is_combining_mark(cp)) continue;
    cp = fold_letter(cp);
    if (is_space_cp(cp)) {
      pending_space = true;
      continue;
    }
    if ((cp >= U'a' && cp <= U'z') || cp == U'-') {
      if (pending_space && !out.empty()) out.push_back(U' ');
      pending_space = false;
      out.push_back(cp);
    }
  }
  return unicode::encode(out);
}

NormalizedForm normalize_form(const Lexeme& lexeme, Slot source) {
  // Lexeme forms never carry the transliteration parentheses, but stray
  // ones inside a form are dropped by folding as well.
  return NormalizedForm{fold_form(lexeme.form()), source};
}

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diagonal + 1 : std::max(row[j], row[j - 1]);
      diagonal = above;
    }
  }
  return row[b.size()];
}

double similarity(std::string_view a, std::string_view b, SimilarityMetric metric) {
  const std::u32string ua = unicode::decode(a);
  const std::u32string ub = unicode::decode(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  // A single integer division, so equal ratios compare equal to thresholds
  // written as the same decimal.
  const std::size_t matched = metric == SimilarityMetric::NormalizedLevenshtein
                                  ? longest - levenshtein_distance(ua, ub)
                                  : lcs_length(ua, ub);
  return static_cast<double>(matched) / static_cast<double>(longest);
}

double similarity(const NormalizedForm& a, const NormalizedForm& b, SimilarityMetric metric) {
  return similarity(a.text, b.text, metric);
}

CognatePartition propose_partition(const DictionaryEntry& entry, const SimilarityConfig& cfg) {
  cfg.validate();
  const auto slots = entry.slots();
  std::vector<NormalizedForm> forms;
  forms.reserve(slots.size());
  for (const Slot& s : slots) forms.push_back(normalize_form(entry.lexeme(s), s));

  DisjointSets sets(slots.size());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    for (std::size_t j = i + 1; j < forms.size(); ++j) {
      if (similarity(forms[i], forms[j], cfg.metric) >= cfg.threshold) sets.unite(i, j);
    }
  }
  std::map<std::size_t, std::vector<Slot>> components;
  for (std::size_t i = 0; i < slots.size(); ++i) components[sets.find(i)].push_back(slots[i]);
  std::vector<std::vector<Slot>> blocks;
  for (auto& [root, block] : components) blocks.push_back(std::move(block));
  return CognatePartition(std::move(blocks));
}

SuggestionReport evaluate_suggestions(std::span<const DictionaryEntry> entries,
                                      std::span<const EntryAnnotation> gold,
                                      const SimilarityConfig& cfg,
                                      const EvaluationOptions& options) {
  cfg.validate();
  std::map<std::string_view, const EntryAnnotation*> by_entry;
  for (const auto& g : gold) by_entry[g.entry_id] = &g;

  SuggestionReport report;
  report.config = cfg;
  PairCounts total;
  for (const auto& entry : entries) {
    auto it = by_entry.find(entry.entry_id);
    bool complete = it != by_entry.end() && it->second->codes.size() == entry.slot_count();
    if (complete) {
      for (const auto& [slot, code] : it->second->codes) complete = complete && entry.has_slot(slot);
    }
    if (!complete) {
      if (options.skip_missing) continue;
      throw MissingGold(entry.entry_id);
    }
    EntryEvaluation eval;
    eval.entry_id = entry.entry_id;
    eval.gold = partition_of(*it->second);
    eval.proposed = propose_partition(entry, cfg);
    const PairCounts pairs = count_pairs(eval.gold, eval.proposed);
    eval.metrics = agreement_from_pairs(pairs);
    total += pairs;
    report.entries.push_back(std::move(eval));
  }
  report.aggregate = agreement_from_pairs(total);
  return report;
}

std::vector<SuggestionReport> sweep_thresholds(std::span<const DictionaryEntry> entries,
                                               std::span<const EntryAnnotation> gold,
                                               std::span<const double> thresholds,
                                               SimilarityMetric metric,
                                               const EvaluationOptions& options) {
  std::vector<SuggestionReport> out;
  out.reserve(thresholds.size());
  for (double t : thresholds)
    out.push_back(evaluate_suggestions(entries, gold, SimilarityConfig{t, metric}, options));
  return out;
}

}  // namespace turkann
