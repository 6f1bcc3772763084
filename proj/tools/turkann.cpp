// turkann: batch workflows over dictionary datasets and annotation logs.
//
// Exit status: 0 success, 1 validation errors (or no shared slots for
// `agree`), 2 usage or I/O error.

#include <algorithm>
#include <cctype>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "turkann/codec.hpp"
#include "turkann/http.hpp"
#include "turkann/report.hpp"
#include "turkann/service.hpp"
#include "turkann/suggest.hpp"

namespace fs = std::filesystem;
using namespace turkann;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;

// Unreadable input or unwritable output.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input that parsed as far as the error; reported with exit status 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path);
}

std::string located(const std::string& path, std::size_t line, std::string_view message) {
  std::ostringstream out;
  out << path;
  if (line > 0) out << ':' << line;
  out << ": " << message;
  return out.str();
}

std::vector<DictionaryEntry> load_dataset(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_dataset(text);
  } catch (const CodecError& e) {
    throw InputError(located(path, e.line(), "error: " + std::string(to_string(e.kind())) + ": " +
                                                 e.message()));
  }
}

std::vector<AnnotationRecord> load_log(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_annotations(text);
  } catch (const CodecError& e) {
    throw InputError(located(path, e.line(), "error: " + std::string(to_string(e.kind())) + ": " +
                                                 e.message()));
  }
}

// The annotator named in a log; a log holds exactly one annotator.
std::string annotator_of(const std::vector<AnnotationRecord>& records, const std::string& path) {
  if (records.empty()) return fs::path(path).stem().string();
  for (const auto& r : records) {
    if (r.annotator_id != records.front().annotator_id)
      throw InputError(path + ": error: log mixes annotators '" + records.front().annotator_id +
                       "' and '" + r.annotator_id + "'");
  }
  return records.front().annotator_id;
}

// Rejects records pointing outside the dataset.
void check_against_dataset(const std::vector<AnnotationRecord>& records,
                           const std::vector<DictionaryEntry>& entries, const std::string& path) {
  std::map<std::string_view, const DictionaryEntry*> index;
  for (const auto& e : entries) index.emplace(e.entry_id, &e);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto it = index.find(r.entry_id);
    if (it == index.end())
      throw InputError(located(path, i + 1, "error: unknown entry '" + r.entry_id + "'"));
    if (!it->second->has_slot(r.slot()))
      throw InputError(located(path, i + 1,
                               "error: entry '" + r.entry_id + "' has no slot " + to_string(r.slot())));
  }
}

enum class Format { Text, Json };

const std::map<std::string, Format> kFormats{{"text", Format::Text}, {"json", Format::Json}};

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string dataset;
  std::vector<std::string> logs;
  bool no_lint = false;
};

int cmd_validate(const ValidateArgs& args) {
  std::size_t errors = 0;
  std::size_t warnings = 0;
  std::vector<DictionaryEntry> entries;
  try {
    entries = load_dataset(args.dataset);
  } catch (const InputError& e) {
    std::cout << e.what() << '\n';
    return kInvalid;
  }
  std::map<std::string_view, const DictionaryEntry*> index;
  for (const auto& e : entries) index.emplace(e.entry_id, &e);
  const ValidationOptions options{.lint_mixed_etymology = !args.no_lint};

  for (const auto& path : args.logs) {
    const auto read = read_annotation_log(read_file(path));
    for (const auto& e : read.errors) {
      std::cout << located(path, e.line(), "error: " + std::string(to_string(e.kind())) + ": " +
                                               e.message())
                << '\n';
      ++errors;
    }

    // Line of the effective record per (annotator, entry, slot), and of the
    // first record per (annotator, entry).
    std::map<std::tuple<std::string, std::string, Slot>, std::size_t> slot_line;
    std::map<std::pair<std::string, std::string>, std::size_t> entry_line;
    for (std::size_t i = 0; i < read.records.size(); ++i) {
      const auto& r = read.records[i];
      slot_line[{r.annotator_id, r.entry_id, r.slot()}] = read.line_numbers[i];
      entry_line.emplace(std::pair{r.annotator_id, r.entry_id}, read.line_numbers[i]);
    }

    const auto resolved = resolve_newest_wins(read.records);
    for (const auto& ann : group_by_entry(resolved)) {
      const std::size_t first_line = entry_line.at({ann.annotator_id, ann.entry_id});
      auto it = index.find(ann.entry_id);
      if (it == index.end()) {
        std::cout << located(path, first_line,
                             "error: EntryMismatch: unknown entry '" + ann.entry_id + "'")
                  << '\n';
        ++errors;
        continue;
      }
      for (const auto& d : validate_entry_annotation(*it->second, ann, options)) {
        const std::size_t line =
            d.slot ? slot_line.at({ann.annotator_id, ann.entry_id, *d.slot}) : first_line;
        std::cout << located(path, line,
                             std::string(to_string(d.severity)) + ": " +
                                 std::string(to_string(d.kind)) + ": " + d.message)
                  << '\n';
        (d.severity == Severity::Error ? errors : warnings) += 1;
      }
    }
  }
  std::cout << errors << " error(s), " << warnings << " warning(s)\n";
  return errors > 0 ? kInvalid : kOk;
}

// ---------------------------------------------------------------- agree

struct AgreeArgs {
  std::string dataset;
  std::string first;
  std::string second;
  bool restricted = false;
  Format format = Format::Text;
  std::string reference;
  std::string ci = "large-sample";
};

int cmd_agree(const AgreeArgs& args) {
  const auto entries = load_dataset(args.dataset);
  const auto a = load_log(args.first);
  const auto b = load_log(args.second);
  check_against_dataset(a, entries, args.first);
  check_against_dataset(b, entries, args.second);

  AgreementReportOptions options;
  options.restricted = args.restricted;
  options.kappa.ci_method = *ci_method_from_string(args.ci);
  const auto report =
      make_agreement_report(annotator_of(a, args.first), a, annotator_of(b, args.second), b, options);

  std::optional<ReportedValues> reported;
  if (!args.reference.empty()) {
    try {
      reported = parse_reported_values(read_file(args.reference));
    } catch (const std::invalid_argument& e) {
      throw InputError(args.reference + ": error: " + e.what());
    }
  }
  const ReportedValues* ref = reported ? &*reported : nullptr;
  if (args.format == Format::Json) {
    std::cout << to_json(report, ref).dump(2) << '\n';
  } else {
    std::cout << render_text(report, ref);
  }
  return report.etymology.contingency.empty_intersection() ? kInvalid : kOk;
}

// ---------------------------------------------------------------- suggest

struct SuggestArgs {
  std::string dataset;
  std::vector<std::string> entry_ids;
  double tau = 0.6;
  std::string metric = "normalized-levenshtein";
  std::string gold;
  std::vector<double> sweep;
  bool skip_missing = false;
  Format format = Format::Text;
};

int cmd_suggest(const SuggestArgs& args) {
  const auto all = load_dataset(args.dataset);
  std::vector<DictionaryEntry> entries;
  if (args.entry_ids.empty()) {
    entries = all;
  } else {
    for (const auto& id : args.entry_ids) {
      auto it = std::find_if(all.begin(), all.end(), [&](const auto& e) { return e.entry_id == id; });
      if (it == all.end()) throw InputError(args.dataset + ": error: unknown entry '" + id + "'");
      entries.push_back(*it);
    }
  }
  SimilarityConfig cfg{args.tau, *metric_from_string(args.metric)};

  if (args.gold.empty()) {
    if (!args.sweep.empty()) throw std::invalid_argument("--sweep requires --gold");
    Json out = Json::array();
    for (const auto& e : entries) {
      const auto p = propose_partition(e, cfg);
      if (args.format == Format::Json) {
        out.push_back({{"entry_id", e.entry_id}, {"proposed", to_json(p)}});
      } else {
        std::cout << render_text(p, e);
      }
    }
    if (args.format == Format::Json)
      std::cout << Json{{"threshold", cfg.threshold},
                        {"metric", to_string(cfg.metric)},
                        {"entries", out}}
                       .dump(2)
                << '\n';
    return kOk;
  }

  const auto gold_records = load_log(args.gold);
  check_against_dataset(gold_records, all, args.gold);
  annotator_of(gold_records, args.gold);
  const auto gold = group_by_entry(resolve_newest_wins(gold_records));
  const EvaluationOptions options{.skip_missing = args.skip_missing};
  try {
    std::vector<SuggestionReport> reports;
    if (args.sweep.empty()) {
      reports.push_back(evaluate_suggestions(entries, gold, cfg, options));
    } else {
      reports = sweep_thresholds(entries, gold, args.sweep, cfg.metric, options);
    }
    if (args.format == Format::Json) {
      if (args.sweep.empty()) {
        std::cout << to_json(reports.front()).dump(2) << '\n';
      } else {
        Json out = Json::array();
        for (const auto& r : reports) out.push_back(to_json(r));
        std::cout << out.dump(2) << '\n';
      }
    } else {
      for (const auto& r : reports) std::cout << render_text(r);
    }
  } catch (const MissingGold& e) {
    std::cout << args.gold << ": error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}

// ---------------------------------------------------------------- merge

struct MergeArgs {
  std::vector<std::string> logs;
  std::string output;
  bool resolve = false;
};

// Stable merge by timestamp; records with equal timestamps keep input
// order (file order, then line order).
int cmd_merge(const MergeArgs& args) {
  std::vector<AnnotationRecord> all;
  for (const auto& path : args.logs) {
    auto records = load_log(path);
    all.insert(all.end(), records.begin(), records.end());
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& x, const auto& y) { return x.timestamp < y.timestamp; });
  if (args.resolve) all = resolve_newest_wins(all);
  const std::string text = serialize_annotations(all);
  if (args.output.empty() || args.output == "-") {
    std::cout << text;
  } else {
    write_file(args.output, text);
  }
  return kOk;
}

// ---------------------------------------------------------------- import

struct ImportArgs {
  std::string input;
  std::string output;
};

// Normalizes a dataset file: NFC, LF endings, entry ids filled in.
int cmd_import(const ImportArgs& args) {
  const auto entries = load_dataset(args.input);
  const std::string text = serialize_dataset(entries);
  if (args.output.empty() || args.output == "-") {
    std::cout << text;
  } else {
    write_file(args.output, text);
  }
  std::cerr << entries.size() << " entries\n";
  return kOk;
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
  std::string dir;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int cmd_serve(const ServeArgs& args) {
  // Block termination signals in every thread; one thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  if (!fs::is_directory(args.dir)) throw IoError("not a directory: " + args.dir);
  AnnotationService service(args.dir);
  HttpServer server(service);
  const int port = server.bind(args.host, args.port);
  std::cout << "listening on http://" << args.host << ':' << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  if (waiter.joinable()) {
    // listen() can also return on its own; wake the waiter.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognate and etymology annotation tools for eight-way Turkic dictionaries"};
  app.require_subcommand(1);
  auto format_option = [](CLI::App* cmd, Format& target) {
    cmd->add_option_function<std::string>(
           "--format", [&target](std::string v) {
             for (char& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
             target = kFormats.at(v);
           },
           "Output format (text or json)")
        ->check(CLI::IsMember({"text", "json"}, CLI::ignore_case))
        ->option_text("text|json");
  };

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "Check a dataset and annotation logs");
  v->add_option("dataset", validate.dataset, "Dataset TSV")->required();
  v->add_option("logs", validate.logs, "Annotation logs (JSONL)");
  v->add_flag("--no-lint", validate.no_lint, "Skip the mixed-etymology lint");

  AgreeArgs agree;
  auto* a = app.add_subcommand("agree", "Inter-annotator agreement between two logs");
  a->add_option("dataset", agree.dataset, "Dataset TSV")->required();
  a->add_option("first", agree.first, "Log of the first (column) annotator")->required();
  a->add_option("second", agree.second, "Log of the second (row) annotator")->required();
  a->add_flag("--restricted", agree.restricted, "Drop slots where either annotator used Q, X, V or N");
  a->add_option("--reference", agree.reference, "Previously reported values (JSON) to compare against");
  a->add_option("--ci", agree.ci, "Confidence interval method")
      ->check(CLI::IsMember({"large-sample", "fleiss-cohen-everitt"}));
  format_option(a, agree.format);

  SuggestArgs suggest;
  auto* s = app.add_subcommand("suggest", "Propose cognate blocks from form similarity");
  s->add_option("dataset", suggest.dataset, "Dataset TSV")->required();
  s->add_option("--entry", suggest.entry_ids, "Restrict to these entry ids");
  s->add_option("--tau", suggest.tau, "Similarity threshold")->check(CLI::Range(0.0, 1.0));
  s->add_option("--metric", suggest.metric, "Similarity metric")
      ->check(CLI::IsMember({"normalized-levenshtein", "lcsr"}));
  s->add_option("--gold", suggest.gold, "Gold annotation log; evaluates proposals against it");
  s->add_option("--sweep", suggest.sweep, "Thresholds to evaluate (with --gold)")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  s->add_flag("--skip-missing", suggest.skip_missing, "Skip entries without complete gold");
  format_option(s, suggest.format);

  MergeArgs merge;
  auto* m = app.add_subcommand("merge", "Merge annotation logs in timestamp order");
  m->add_option("logs", merge.logs, "Logs to merge")->required();
  m->add_option("-o,--output", merge.output, "Output file (default stdout)");
  m->add_flag("--resolve", merge.resolve, "Keep only the newest record per slot");

  ImportArgs import;
  auto* i = app.add_subcommand("import", "Normalize a dataset TSV");
  i->add_option("input", import.input, "Dataset TSV")->required();
  i->add_option("-o,--output", import.output, "Output file (default stdout)");

  ServeArgs serve;
  if (const char* env = std::getenv("TURKANN_DATA_DIR")) serve.dir = env;
  auto* sv = app.add_subcommand("serve", "Run the annotation service");
  auto* dir_opt = sv->add_option("dir", serve.dir, "Data directory (default $TURKANN_DATA_DIR)");
  if (serve.dir.empty()) dir_opt->required();
  sv->add_option("--host", serve.host, "Address to bind");
  sv->add_option("--port", serve.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (v->parsed()) return cmd_validate(validate);
    if (a->parsed()) return cmd_agree(agree);
    if (s->parsed()) return cmd_suggest(suggest);
    if (m->parsed()) return cmd_merge(merge);
    if (i->parsed()) return cmd_import(import);
    if (sv->parsed()) return cmd_serve(serve);
  } catch (const InputError& e) {
    std::cout << e.what() << '\n';
    return kInvalid;
  } catch (const IoError& e) {
    std::cerr << "turkann: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "turkann: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
