#pragma once

// Machine-readable (JSON) and plain-text renderings of agreement and
// suggestion reports. JSON keys match the C++ field names.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "turkann/agreement.hpp"
#include "turkann/suggest.hpp"

namespace turkann {

using Json = nlohmann::ordered_json;

/// Previously published statistics for a dataset, shown next to the
/// recomputed values. Loaded from a small JSON file:
///   {"kappa": 0.5927, "ci95": [0.5192, 0.6662], "restricted_kappa": 0.9216,
///    "note": "..."}
struct ReportedValues {
  std::optional<double> kappa;
  std::optional<std::pair<double, double>> ci95;
  std::optional<double> restricted_kappa;
  std::string note;
};

/// Throws std::invalid_argument on malformed input or unknown keys.
ReportedValues parse_reported_values(std::string_view json_text);

// Values closer than this to the recomputed statistic count as reproduced.
inline constexpr double kReproductionTolerance = 0.0005;

struct Discrepancy {
  std::string what;  // "kappa", "ci95.lo", ...
  double reported;
  double computed;
  bool reproduced;
};

std::vector<Discrepancy> compare_reported(const AgreementReport& report,
                                          const ReportedValues& reported);

Json to_json(const ContingencyMatrix& m);
Json to_json(const KappaResult& k);
Json to_json(const PartitionAgreement& p);
Json to_json(const CognatePartition& p);
Json to_json(const Diagnostic& d);
Json to_json(const DictionaryEntry& e);
/// Same object as one annotation log line.
Json to_json(const AnnotationRecord& r);
Json to_json(const AgreementReport& report, const ReportedValues* reported = nullptr);
Json to_json(const SuggestionReport& report);

/// Table layout: first annotator across the top, second down the side.
std::string render_matrix(const ContingencyMatrix& m);
std::string render_text(const AgreementReport& report, const ReportedValues* reported = nullptr);
std::string render_text(const SuggestionReport& report);
std::string render_text(const CognatePartition& p, const DictionaryEntry& entry);

}  // namespace turkann
