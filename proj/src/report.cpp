#include "turkann/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace turkann {
namespace {

Json number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "undefined";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string letters(const std::vector<Etymology>& es) {
  std::string out;
  for (Etymology e : es) {
    if (!out.empty()) out += ',';
    out += to_char(e);
  }
  return out;
}

}  // namespace

ReportedValues parse_reported_values(std::string_view json_text) {
  const Json j = Json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::invalid_argument("reported values must be a JSON object");
  ReportedValues out;
  for (const auto& [key, value] : j.items()) {
    if (key == "kappa" && value.is_number()) {
      out.kappa = value.get<double>();
    } else if (key == "restricted_kappa" && value.is_number()) {
      out.restricted_kappa = value.get<double>();
    } else if (key == "ci95" && value.is_array() && value.size() == 2 && value[0].is_number() &&
               value[1].is_number()) {
      out.ci95 = std::pair{value[0].get<double>(), value[1].get<double>()};
    } else if (key == "note" && value.is_string()) {
      out.note = value.get<std::string>();
    } else {
      throw std::invalid_argument("unexpected key or value type for '" + key + "'");
    }
  }
  return out;
}

std::vector<Discrepancy> compare_reported(const AgreementReport& report,
                                          const ReportedValues& reported) {
  std::vector<Discrepancy> out;
  const auto& k = report.etymology.kappa;
  if (!k || k->degenerate) return out;
  auto add = [&](std::string what, double r, double c) {
    out.push_back({std::move(what), r, c, std::fabs(r - c) <= kReproductionTolerance});
  };
  if (report.restricted) {
    if (reported.restricted_kappa) add("restricted_kappa", *reported.restricted_kappa, k->kappa);
  } else {
    if (reported.kappa) add("kappa", *reported.kappa, k->kappa);
    if (reported.ci95) {
      add("ci95.lo", reported.ci95->first, k->ci95.first);
      add("ci95.hi", reported.ci95->second, k->ci95.second);
    }
  }
  return out;
}

Json to_json(const ContingencyMatrix& m) {
  Json j;
  Json cats = Json::array();
  for (Etymology e : m.categories()) cats.push_back(std::string(1, to_char(e)));
  j["categories"] = cats;
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.size(); ++c) row.push_back(m.at(i, c));
    rows.push_back(row);
  }
  j["counts"] = rows;
  j["n"] = m.n();
  j["orientation"] = "rows: second annotator; columns: first annotator";
  return j;
}

Json to_json(const KappaResult& k) {
  Json j;
  j["kappa"] = number(k.kappa);
  j["p_o"] = k.p_o;
  j["p_e"] = k.p_e;
  j["n"] = k.n;
  j["agreements"] = k.agreements;
  j["chance_products"] = k.chance_products;
  j["se"] = number(k.se);
  j["ci95"] = Json::array({number(k.ci95.first), number(k.ci95.second)});
  j["ci_method"] = to_string(k.ci_method);
  j["degenerate"] = k.degenerate;
  return j;
}

Json to_json(const PartitionAgreement& p) {
  Json j;
  j["pair_precision"] = p.pair_precision;
  j["pair_recall"] = p.pair_recall;
  j["pair_f1"] = p.pair_f1;
  j["rand_index"] = p.rand_index;
  j["adjusted_rand"] = p.adjusted_rand;
  j["pairs"] = {
      {"together_both", p.pairs.together_both},
      {"together_first_only", p.pairs.together_first_only},
      {"together_second_only", p.pairs.together_second_only},
      {"apart_both", p.pairs.apart_both},
  };
  return j;
}

Json to_json(const CognatePartition& p) {
  Json blocks = Json::array();
  for (const auto& block : p.blocks()) {
    Json b = Json::array();
    for (const Slot& s : block)
      b.push_back({{"language", language_name(s.language)}, {"lexeme_index", s.lexeme_index}});
    blocks.push_back(b);
  }
  return Json{{"blocks", blocks}};
}

Json to_json(const Diagnostic& d) {
  Json j;
  j["severity"] = to_string(d.severity);
  j["kind"] = to_string(d.kind);
  if (d.slot) {
    j["language"] = language_name(d.slot->language);
    j["lexeme_index"] = d.slot->lexeme_index;
  }
  j["message"] = d.message;
  return j;
}

Json to_json(const DictionaryEntry& e) {
  Json j;
  j["entry_id"] = e.entry_id;
  j["gloss"] = e.gloss;
  Json translations = Json::object();
  for (LanguageId lang : kLanguages) {
    Json list = Json::array();
    for (const Lexeme& lex : e.lexemes(lang)) {
      list.push_back({{"form", lex.form()},
                      {"script", lex.script() == Script::Transliteration ? "transliteration"
                                                                        : "official-latin"}});
    }
    translations[std::string(language_tag(lang))] = list;
  }
  j["translations"] = translations;
  return j;
}

Json to_json(const AnnotationRecord& r) { return Json::parse(serialize_annotation(r)); }

Json to_json(const AgreementReport& report, const ReportedValues* reported) {
  const auto& c = report.etymology.contingency;
  Json j;
  j["first_annotator"] = report.first_annotator;
  j["second_annotator"] = report.second_annotator;
  j["restricted"] = report.restricted;
  Json excluded = Json::array();
  for (Etymology e : report.excluded) excluded.push_back(std::string(1, to_char(e)));
  j["excluded"] = excluded;
  j["matrix"] = to_json(c.matrix);
  j["kappa"] = report.etymology.kappa ? to_json(*report.etymology.kappa) : Json(nullptr);
  j["empty_intersection"] = c.empty_intersection();
  j["unmatched"] = {{"only_first", c.only_first}, {"only_second", c.only_second}};
  j["excluded_slots"] = c.excluded;
  j["outside_categories"] = c.outside_categories;
  j["cognates"] = to_json(report.cognates.metrics);
  j["cognates"]["entries"] = report.cognates.entries;
  if (reported) {
    Json r = Json::array();
    for (const auto& d : compare_reported(report, *reported)) {
      r.push_back({{"what", d.what},
                   {"reported", d.reported},
                   {"computed", d.computed},
                   {"difference", d.computed - d.reported},
                   {"reproduced", d.reproduced}});
    }
    j["reported"] = r;
    if (!reported->note.empty()) j["reported_note"] = reported->note;
  }
  return j;
}

Json to_json(const SuggestionReport& report) {
  Json j;
  j["threshold"] = report.config.threshold;
  j["metric"] = to_string(report.config.metric);
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    Json x;
    x["entry_id"] = e.entry_id;
    x["proposed"] = to_json(e.proposed);
    x["gold"] = to_json(e.gold);
    x["metrics"] = to_json(e.metrics);
    entries.push_back(x);
  }
  j["entries"] = entries;
  j["aggregate"] = to_json(report.aggregate);
  return j;
}

std::string render_matrix(const ContingencyMatrix& m) {
  std::vector<std::string> header{""};
  for (Etymology e : m.categories()) header.emplace_back(1, to_char(e));
  header.emplace_back("total");
  std::vector<std::vector<std::string>> rows{header};
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<std::string> row{std::string(1, to_char(m.categories()[i]))};
    for (std::size_t c = 0; c < m.size(); ++c) row.push_back(std::to_string(m.at(i, c)));
    row.push_back(std::to_string(m.row_total(i)));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> totals{"total"};
  for (std::size_t c = 0; c < m.size(); ++c) totals.push_back(std::to_string(m.col_total(c)));
  totals.push_back(std::to_string(m.n()));
  rows.push_back(std::move(totals));

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += "  ";
      out += c == 0 ? row[c] + std::string(width[c] - row[c].size(), ' ') : pad_left(row[c], width[c]);
    }
    out += '\n';
  }
  return out;
}

std::string render_text(const AgreementReport& report, const ReportedValues* reported) {
  const auto& c = report.etymology.contingency;
  std::ostringstream out;
  out << "Etymology agreement: " << report.first_annotator << " (columns) vs "
      << report.second_annotator << " (rows)";
  if (report.restricted) out << ", excluding slots labeled " << letters(report.excluded);
  out << "\n\n";
  if (c.empty_intersection()) {
    out << "No shared slots: empty intersection.\n";
  } else {
    out << render_matrix(c.matrix) << '\n';
  }
  if (const auto& k = report.etymology.kappa) {
    out << "n = " << k->n << ", agreements = " << k->agreements << '\n';
    out << "p_o = " << k->agreements << "/" << k->n << " = " << fixed(k->p_o) << '\n';
    out << "p_e = " << k->chance_products << "/" << k->n * k->n << " = " << fixed(k->p_e) << '\n';
    if (k->degenerate) {
      out << "kappa undefined: chance agreement is 1\n";
    } else {
      out << "kappa = " << fixed(k->kappa) << " (95% CI " << fixed(k->ci95.first) << " to "
          << fixed(k->ci95.second) << ", se " << fixed(k->se) << ", " << to_string(k->ci_method)
          << ")\n";
    }
  }
  out << "unmatched slots: only " << report.first_annotator << " = " << c.only_first << ", only "
      << report.second_annotator << " = " << c.only_second << '\n';
  if (report.restricted) out << "excluded slots: " << c.excluded << '\n';
  if (c.outside_categories > 0) out << "slots outside categories: " << c.outside_categories << '\n';

  const auto& p = report.cognates.metrics;
  out << "\nCognate agreement over " << report.cognates.entries << " entries: pair precision "
      << fixed(p.pair_precision) << ", recall " << fixed(p.pair_recall) << ", F1 "
      << fixed(p.pair_f1) << ", Rand " << fixed(p.rand_index) << ", adjusted Rand "
      << fixed(p.adjusted_rand) << '\n';

  if (reported) {
    const auto discrepancies = compare_reported(report, *reported);
    if (!discrepancies.empty()) out << '\n';
    for (const auto& d : discrepancies) {
      out << "reported " << d.what << " = " << fixed(d.reported) << ", computed " << fixed(d.computed);
      if (d.reproduced) {
        out << ": reproduced\n";
      } else {
        out << " (difference " << fixed(d.computed - d.reported)
            << "): NOT reproduced; the reported value does not follow from these counts under "
               "the standard formula\n";
      }
    }
    if (!reported->note.empty()) out << "note: " << reported->note << '\n';
  }
  return out.str();
}

std::string render_text(const SuggestionReport& report) {
  std::ostringstream out;
  out << "threshold " << fixed(report.config.threshold, 2) << ", metric "
      << to_string(report.config.metric) << '\n';
  for (const auto& e : report.entries) {
    out << "  " << e.entry_id << ": blocks proposed " << e.proposed.blocks().size() << ", gold "
        << e.gold.blocks().size() << ", precision " << fixed(e.metrics.pair_precision)
        << ", recall " << fixed(e.metrics.pair_recall) << ", ARI "
        << fixed(e.metrics.adjusted_rand) << '\n';
  }
  const auto& a = report.aggregate;
  out << "  aggregate: precision " << fixed(a.pair_precision) << ", recall "
      << fixed(a.pair_recall) << ", F1 " << fixed(a.pair_f1) << ", Rand " << fixed(a.rand_index)
      << ", adjusted Rand " << fixed(a.adjusted_rand) << '\n';
  return out.str();
}

std::string render_text(const CognatePartition& p, const DictionaryEntry& entry) {
  std::ostringstream out;
  out << entry.entry_id << " (" << entry.gloss << ")\n";
  const auto& blocks = p.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    out << "  " << b + 1 << ":";
    for (const Slot& s : blocks[b]) {
      out << ' ' << language_tag(s.language) << '=';
      const Lexeme& lex = entry.lexeme(s);
      out << (lex.script() == Script::Transliteration ? "(" + lex.form() + ")" : lex.form());
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace turkann
