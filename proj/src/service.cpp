#include "turkann/service.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace turkann {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Timestamp now_utc() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

}  // namespace

std::string_view to_string(ServiceErrorKind kind) {
  switch (kind) {
    case ServiceErrorKind::UnknownDataset: return "UnknownDataset";
    case ServiceErrorKind::UnknownEntry: return "UnknownEntry";
    case ServiceErrorKind::UnknownSlot: return "UnknownSlot";
    case ServiceErrorKind::ValidationFailed: return "ValidationFailed";
    case ServiceErrorKind::BadRequest: return "BadRequest";
  }
  return "?";
}

AnnotationService::AnnotationService(std::filesystem::path data_dir)
    : data_dir_(std::move(data_dir)), store_(data_dir_) {
  if (!std::filesystem::is_directory(data_dir_))
    throw std::runtime_error("data directory " + data_dir_.string() + " does not exist");
  for (const auto& file : std::filesystem::directory_iterator(data_dir_)) {
    if (!file.is_regular_file() || file.path().extension() != ".tsv") continue;
    const std::string id = file.path().stem().string();
    if (!is_valid_identifier(id)) continue;
    Dataset ds;
    ds.id = id;
    try {
      ds.entries = parse_dataset(read_file(file.path()));
    } catch (const CodecError& e) {
      throw CodecError(e.kind(), e.line(), file.path().string() + ": " + e.message());
    }
    for (std::size_t i = 0; i < ds.entries.size(); ++i) ds.index.emplace(ds.entries[i].entry_id, i);
    const auto reported = data_dir_ / (id + ".reported.json");
    if (std::filesystem::exists(reported)) ds.reported = parse_reported_values(read_file(reported));
    datasets_.emplace(id, std::move(ds));
  }
}

std::vector<DatasetInfo> AnnotationService::list_datasets() const {
  std::vector<DatasetInfo> out;
  for (const auto& [id, ds] : datasets_) out.push_back({id, ds.entries.size()});
  return out;
}

const std::string& AnnotationService::resolve_dataset(
    const std::optional<std::string>& dataset_id) const {
  if (dataset_id) return dataset(*dataset_id).id;
  if (datasets_.size() == 1) return datasets_.begin()->first;
  throw ServiceError(ServiceErrorKind::BadRequest,
                     "a dataset parameter is required when several datasets are loaded");
}

const AnnotationService::Dataset& AnnotationService::dataset(const std::string& id) const {
  auto it = datasets_.find(id);
  if (it == datasets_.end())
    throw ServiceError(ServiceErrorKind::UnknownDataset, "unknown dataset '" + id + "'");
  return it->second;
}

const std::vector<DictionaryEntry>& AnnotationService::entries(const std::string& dataset_id) const {
  return dataset(dataset_id).entries;
}

const DictionaryEntry& AnnotationService::entry(const std::string& dataset_id,
                                                const std::string& entry_id) const {
  const Dataset& ds = dataset(dataset_id);
  auto it = ds.index.find(entry_id);
  if (it == ds.index.end())
    throw ServiceError(ServiceErrorKind::UnknownEntry,
                       "unknown entry '" + entry_id + "' in dataset '" + dataset_id + "'");
  return ds.entries[it->second];
}

const ReportedValues* AnnotationService::reported_values(const std::string& dataset_id) const {
  const Dataset& ds = dataset(dataset_id);
  return ds.reported ? &*ds.reported : nullptr;
}

std::vector<AnnotationRecord> AnnotationService::effective_records(
    const std::string& dataset_id, const std::string& annotator_id) const {
  dataset(dataset_id);
  return resolve_newest_wins(store_.records(dataset_id, annotator_id));
}

std::vector<bool> AnnotationService::completion(const Dataset& ds,
                                                const std::string& annotator_id) const {
  std::map<std::string_view, std::set<Slot>> annotated;
  const auto records = store_.records(ds.id, annotator_id);
  for (const auto& r : records) annotated[r.entry_id].insert(r.slot());
  std::vector<bool> out(ds.entries.size(), false);
  for (std::size_t i = 0; i < ds.entries.size(); ++i) {
    auto it = annotated.find(ds.entries[i].entry_id);
    if (it == annotated.end()) continue;
    bool all = true;
    for (const Slot& s : ds.entries[i].slots()) all = all && it->second.count(s) > 0;
    out[i] = all;
  }
  return out;
}

EntryPage AnnotationService::list_entries(const std::string& dataset_id, std::size_t page,
                                          std::size_t page_size, const EntryFilter& filter) const {
  const Dataset& ds = dataset(dataset_id);
  if (page_size == 0 || page_size > kMaxPageSize)
    throw ServiceError(ServiceErrorKind::BadRequest,
                       "page_size must be between 1 and " + std::to_string(kMaxPageSize));
  if (filter.unannotated_by && !is_valid_identifier(*filter.unannotated_by))
    throw ServiceError(ServiceErrorKind::BadRequest, "invalid annotator id");

  std::map<std::string, std::vector<bool>> done;
  for (const auto& annotator : store_.annotators(ds.id)) done[annotator] = completion(ds, annotator);
  if (filter.unannotated_by && !done.count(*filter.unannotated_by))
    done[*filter.unannotated_by] = std::vector<bool>(ds.entries.size(), false);

  std::vector<std::size_t> matching;
  for (std::size_t i = 0; i < ds.entries.size(); ++i) {
    if (filter.unannotated_by && done[*filter.unannotated_by][i]) continue;
    matching.push_back(i);
  }

  EntryPage out;
  out.dataset_id = ds.id;
  out.page = page;
  out.page_size = page_size;
  out.total = matching.size();
  const std::size_t begin = std::min(matching.size(), page * page_size);
  const std::size_t end = std::min(matching.size(), begin + page_size);
  for (std::size_t k = begin; k < end; ++k) {
    EntryStatus status;
    status.entry = &ds.entries[matching[k]];
    for (const auto& [annotator, flags] : done) status.complete[annotator] = flags[matching[k]];
    out.entries.push_back(std::move(status));
  }
  return out;
}

SubmitResult AnnotationService::submit_annotation(const std::string& dataset_id,
                                                  AnnotationRecord record) {
  dataset(dataset_id);
  if (!is_valid_identifier(record.annotator_id))
    throw ServiceError(ServiceErrorKind::BadRequest,
                       "annotator_id must match [A-Za-z0-9._-]+ (at most 128 characters)");
  const DictionaryEntry& e = entry(dataset_id, record.entry_id);
  if (!e.has_slot(record.slot()))
    throw ServiceError(ServiceErrorKind::UnknownSlot,
                       "entry '" + e.entry_id + "' has no slot " + to_string(record.slot()));
  if (record.timestamp == Timestamp{}) record.timestamp = now_utc();

  SubmitResult result{record, {}};
  store_.log(dataset_id, record.annotator_id)
      .update([&](const std::vector<AnnotationRecord>& existing) -> std::optional<AnnotationRecord> {
        EntryAnnotation candidate{e.entry_id, record.annotator_id, {}};
        for (const auto& r : existing) {
          if (r.entry_id == e.entry_id) candidate.codes[r.slot()] = r.code;
        }
        candidate.codes[record.slot()] = record.code;
        auto diagnostics = validate_entry_annotation(e, candidate);
        if (has_errors(diagnostics)) {
          std::vector<Diagnostic> errors;
          for (auto& d : diagnostics) {
            if (d.severity == Severity::Error) errors.push_back(std::move(d));
          }
          const std::string message = errors.front().message;
          throw ServiceError(ServiceErrorKind::ValidationFailed, message, std::move(errors));
        }
        result.diagnostics = std::move(diagnostics);
        return record;
      });
  return result;
}

SubmitResult AnnotationService::submit_annotation_line(const std::string& dataset_id,
                                                       std::string_view line) {
  AnnotationRecord record;
  try {
    record = parse_annotation_line(line, 1, RecordParseOptions{.require_timestamp = false});
  } catch (const CodecError& e) {
    if (e.kind() == CodecErrorKind::BadCode)
      throw ServiceError(ServiceErrorKind::ValidationFailed, e.message(), {}, e.code_error());
    throw ServiceError(ServiceErrorKind::BadRequest, e.what());
  }
  return submit_annotation(dataset_id, std::move(record));
}

AgreementReport AnnotationService::agreement_report(const std::string& dataset_id,
                                                    const std::string& first,
                                                    const std::string& second, bool restricted,
                                                    const KappaOptions& kappa) const {
  dataset(dataset_id);
  if (!is_valid_identifier(first) || !is_valid_identifier(second))
    throw ServiceError(ServiceErrorKind::BadRequest, "invalid annotator id");
  const auto a = store_.records(dataset_id, first);
  const auto b = store_.records(dataset_id, second);
  AgreementReportOptions options;
  options.restricted = restricted;
  options.kappa = kappa;
  return make_agreement_report(first, a, second, b, options);
}

CognatePartition AnnotationService::suggest(const std::string& dataset_id,
                                            const std::string& entry_id,
                                            const SimilarityConfig& cfg) const {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ServiceError(ServiceErrorKind::BadRequest, e.what());
  }
  return propose_partition(entry(dataset_id, entry_id), cfg);
}

SessionState AnnotationService::progress(const std::string& dataset_id,
                                         const std::string& annotator_id) const {
  const Dataset& ds = dataset(dataset_id);
  if (!is_valid_identifier(annotator_id))
    throw ServiceError(ServiceErrorKind::BadRequest, "invalid annotator id");
  const auto done = completion(ds, annotator_id);
  SessionState s;
  s.dataset_id = ds.id;
  s.annotator_id = annotator_id;
  s.total = ds.entries.size();
  s.completed = static_cast<std::size_t>(std::count(done.begin(), done.end(), true));
  auto first_open = std::find(done.begin(), done.end(), false);
  s.cursor = first_open != done.end() ? static_cast<std::size_t>(first_open - done.begin())
                                      : (s.total == 0 ? 0 : s.total - 1);
  return s;
}

}  // namespace turkann
