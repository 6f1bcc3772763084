#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "turkann/agreement.hpp"

using namespace turkann;
using namespace turkann::test;

namespace {

using Rows = std::vector<std::vector<std::uint64_t>>;

std::vector<Etymology> first_categories(std::size_t k) {
  return {kEtymologyAlphabet.begin(), kEtymologyAlphabet.begin() + static_cast<long>(k)};
}

Rows random_rows(std::mt19937_64& rng, std::size_t k) {
  std::uniform_int_distribution<int> sparse(0, 3);
  std::uniform_int_distribution<std::uint64_t> count(1, 60);
  Rows rows(k, std::vector<std::uint64_t>(k, 0));
  for (auto& row : rows)
    for (auto& c : row) c = sparse(rng) == 0 ? 0 : count(rng);
  rows[0][0] += 1;
  return rows;
}

std::vector<AnnotationRecord> pilot_log(const char* name) {
  return parse_annotations(read_text(fixture(std::string("pilot/annotations/pilot/") + name)));
}

}  // namespace

TEST_CASE("pilot table statistics") {
  const auto m = pilot_matrix();
  CHECK(m.n() == 392);
  CHECK(m.trace() == 302);
  const auto k = cohen_kappa(m);
  CHECK(k.agreements == 302);
  CHECK(k.chance_products == 41697);
  CHECK(k.p_o == doctest::Approx(302.0 / 392).epsilon(1e-15));
  CHECK(k.p_e == doctest::Approx(41697.0 / 153664).epsilon(1e-15));
  CHECK(k.kappa == doctest::Approx(0.6849071601454).epsilon(1e-12));
  CHECK(std::abs(k.kappa - 0.6849) <= 0.0005);
  CHECK_FALSE(k.degenerate);
  // Large-sample standard error, z = 1.96.
  CHECK(k.se == doctest::Approx(0.029152628455329472).epsilon(1e-12));
  CHECK(k.ci95.first == doctest::Approx(0.6277680083729542).epsilon(1e-12));
  CHECK(k.ci95.second == doctest::Approx(0.7420463119178458).epsilon(1e-12));
}

TEST_CASE("restricted pilot statistics") {
  const std::vector<Etymology> easy{Etymology::Turkic, Etymology::Arabic, Etymology::Persian,
                                    Etymology::Russian, Etymology::French};
  const auto sub = pilot_matrix().select(easy);
  CHECK(sub.n() == 303);
  CHECK(sub.trace() == 284);
  const auto k = cohen_kappa(sub);
  CHECK(k.chance_products == 33665);
  CHECK(k.kappa == doctest::Approx(0.9009872041827188).epsilon(1e-12));
  CHECK(std::abs(k.kappa - 0.9010) <= 0.0005);
  CHECK(k.se == doctest::Approx(0.02199137473986155).epsilon(1e-12));
}

TEST_CASE("Fleiss-Cohen-Everitt standard error matches statsmodels") {
  const KappaOptions fce{.ci_method = CiMethod::FleissCohenEveritt};
  CHECK(cohen_kappa(pilot_matrix(), fce).se == doctest::Approx(0.027525598357010465).epsilon(1e-12));
  const std::vector<Etymology> easy{Etymology::Turkic, Etymology::Arabic, Etymology::Persian,
                                    Etymology::Russian, Etymology::French};
  CHECK(cohen_kappa(pilot_matrix().select(easy), fce).se ==
        doctest::Approx(0.02177145889187203).epsilon(1e-12));

  const ContingencyMatrix small(first_categories(2), Rows{{45, 15}, {25, 15}});
  const auto k = cohen_kappa(small, fce);
  CHECK(k.kappa == doctest::Approx(0.13043478260869554).epsilon(1e-12));
  CHECK(k.se == doctest::Approx(0.0986615376234396).epsilon(1e-12));
}

TEST_CASE("small hand-checked kappas") {
  // p_o = 35/50, p_e = (25*30 + 25*20)/2500 = 0.5.
  const ContingencyMatrix m(first_categories(2), Rows{{20, 5}, {10, 15}});
  CHECK(cohen_kappa(m).kappa == doctest::Approx(0.4).epsilon(1e-15));
  const ContingencyMatrix perfect(first_categories(3), Rows{{3, 0, 0}, {0, 4, 0}, {0, 0, 5}});
  CHECK(cohen_kappa(perfect).kappa == 1.0);
}

TEST_CASE("degenerate and empty matrices") {
  const ContingencyMatrix one_cell(first_categories(2), Rows{{7, 0}, {0, 0}});
  const auto k = cohen_kappa(one_cell);
  CHECK(k.degenerate);
  CHECK(std::isnan(k.kappa));
  CHECK_THROWS_AS(cohen_kappa(ContingencyMatrix(first_categories(3))), std::invalid_argument);
  CHECK_THROWS_AS(ContingencyMatrix(first_categories(2), Rows{{1, 2}}), std::invalid_argument);
}

TEST_CASE("kappa is invariant under relabelings and rescaling") {
  std::mt19937_64 rng(20240301);
  std::size_t checked = 0;
  for (int round = 0; round < 1500; ++round) {
    const std::size_t k = 2 + rng() % 12;
    const auto cats = first_categories(k);
    const auto rows = random_rows(rng, k);
    const ContingencyMatrix m(cats, rows);
    const auto base = cohen_kappa(m);
    if (base.degenerate) continue;
    ++checked;

    CHECK(cohen_kappa(m.transposed()).kappa == base.kappa);

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Rows permuted(k, std::vector<std::uint64_t>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) permuted[i][j] = rows[perm[i]][perm[j]];
    CHECK(cohen_kappa(ContingencyMatrix(cats, permuted)).kappa == base.kappa);

    const std::uint64_t c = 1 + rng() % 9;
    Rows scaled = rows;
    for (auto& row : scaled)
      for (auto& x : row) x *= c;
    const auto s = cohen_kappa(ContingencyMatrix(cats, scaled));
    CHECK(s.kappa == base.kappa);
    CHECK(s.p_o == base.p_o);
    CHECK(s.p_e == base.p_e);

    if (k < kEtymologyAlphabet.size()) {
      Rows padded = rows;
      for (auto& row : padded) row.push_back(0);
      padded.emplace_back(k + 1, 0);
      const auto p = cohen_kappa(ContingencyMatrix(first_categories(k + 1), padded));
      CHECK(p.kappa == base.kappa);
      CHECK(p.p_o == base.p_o);
      CHECK(p.p_e == base.p_e);
      CHECK(cohen_kappa(ContingencyMatrix(first_categories(k + 1), padded).without_empty_categories())
                .kappa == base.kappa);
    }
  }
  CHECK(checked >= 1000);
}

TEST_CASE("perfect agreement gives one and independence gives zero") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::uint64_t> count(0, 30);
  std::size_t diagonal = 0;
  std::size_t outer = 0;
  for (int round = 0; round < 1500; ++round) {
    const std::size_t k = 2 + rng() % 12;
    const auto cats = first_categories(k);

    Rows d(k, std::vector<std::uint64_t>(k, 0));
    for (std::size_t i = 0; i < k; ++i) d[i][i] = count(rng);
    d[0][0] += 1;
    d[1][1] += 1;
    CHECK(cohen_kappa(ContingencyMatrix(cats, d)).kappa == 1.0);
    ++diagonal;

    std::vector<std::uint64_t> r(k), c(k);
    for (auto& x : r) x = count(rng);
    for (auto& x : c) x = count(rng);
    r[0] += 1;
    c[0] += 1;
    c[1] += 1;
    Rows o(k, std::vector<std::uint64_t>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) o[i][j] = r[i] * c[j];
    const auto ko = cohen_kappa(ContingencyMatrix(cats, o));
    if (ko.degenerate) continue;
    CHECK(ko.kappa == 0.0);
    ++outer;
  }
  CHECK(diagonal >= 1000);
  CHECK(outer >= 1000);
}

TEST_CASE("contingency from the generated pilot logs") {
  const auto a = pilot_log("annotator1.jsonl");
  const auto b = pilot_log("annotator2.jsonl");
  const auto c = build_contingency(a, b, kPilotCategories);
  CHECK(c.matrix == pilot_matrix());
  CHECK(c.only_first == 0);
  CHECK(c.only_second == 0);

  const auto swapped = build_contingency(b, a, kPilotCategories);
  CHECK(swapped.matrix == pilot_matrix().transposed());

  const auto r = restricted_kappa(a, b);
  REQUIRE(r.kappa);
  CHECK(r.contingency.matrix.n() == 303);
  CHECK(r.contingency.matrix.trace() == 284);
  CHECK(r.contingency.excluded == 89);
  CHECK(r.kappa->kappa == doctest::Approx(0.9009872041827188).epsilon(1e-12));
}

TEST_CASE("identical logs agree perfectly") {
  const auto a = pilot_log("annotator1.jsonl");
  const auto r = restricted_kappa(a, a, {});
  REQUIRE(r.kappa);
  CHECK(r.kappa->kappa == 1.0);
}

TEST_CASE("pairing uses the newest code and reports unmatched slots") {
  auto rec = [](const char* annotator, const char* entry, LanguageId lang, const char* code) {
    return AnnotationRecord{annotator, entry, lang, 0, parse_code(code), Timestamp{}};
  };
  const std::vector<AnnotationRecord> a{rec("a", "x", LanguageId::Kazakh, "1T"),
                                        rec("a", "x", LanguageId::Kazakh, "1A"),
                                        rec("a", "x", LanguageId::Tatar, "1T")};
  const std::vector<AnnotationRecord> b{rec("b", "x", LanguageId::Kazakh, "1A"),
                                        rec("b", "y", LanguageId::Kazakh, "1A")};
  const auto c = build_contingency(a, b, kEtymologyAlphabet);
  CHECK(c.matrix.n() == 1);
  CHECK(c.matrix.trace() == 1);
  CHECK(c.only_first == 1);
  CHECK(c.only_second == 1);

  const auto none = build_contingency(a, std::vector<AnnotationRecord>{}, kEtymologyAlphabet);
  CHECK(none.empty_intersection());
  const auto r = restricted_kappa(a, std::vector<AnnotationRecord>{});
  CHECK_FALSE(r.kappa);
}

TEST_CASE("agreement report for the pilot") {
  const auto a = pilot_log("annotator1.jsonl");
  const auto b = pilot_log("annotator2.jsonl");
  const auto full = make_agreement_report("annotator1", a, "annotator2", b);
  REQUIRE(full.etymology.kappa);
  CHECK(full.etymology.contingency.matrix.categories() == kPilotCategories);
  CHECK(full.etymology.kappa->kappa == doctest::Approx(0.6849071601454).epsilon(1e-12));
  CHECK(full.cognates.entries == 49);
  CHECK(full.cognates.metrics.adjusted_rand == 1.0);

  AgreementReportOptions restricted;
  restricted.restricted = true;
  const auto r = make_agreement_report("annotator1", a, "annotator2", b, restricted);
  REQUIRE(r.etymology.kappa);
  CHECK(r.etymology.contingency.matrix.size() == 5);
  CHECK(r.etymology.kappa->kappa == doctest::Approx(0.9009872041827188).epsilon(1e-12));
}
