#pragma once

// Annotation service: datasets loaded from a data directory, annotation
// submission with inline validation, progress, suggestions and agreement
// reports. Thread-safe; datasets are immutable after load and every
// annotator log has a single writer.
//
// Data directory layout:
//   <dir>/<dataset_id>.tsv                 dataset files
//   <dir>/<dataset_id>.reported.json       optional previously published stats
//   <dir>/annotations/<dataset_id>/<annotator_id>.jsonl

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "turkann/agreement.hpp"
#include "turkann/codec.hpp"
#include "turkann/report.hpp"
#include "turkann/store.hpp"
#include "turkann/suggest.hpp"

namespace turkann {

enum class ServiceErrorKind {
  UnknownDataset,
  UnknownEntry,
  UnknownSlot,
  ValidationFailed,
  BadRequest,
};

std::string_view to_string(ServiceErrorKind kind);

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ServiceErrorKind kind, const std::string& message,
               std::vector<Diagnostic> diagnostics = {},
               std::optional<CodeErrorKind> code_error = std::nullopt)
      : std::runtime_error(message),
        kind_(kind),
        diagnostics_(std::move(diagnostics)),
        code_error_(code_error) {}

  ServiceErrorKind kind() const noexcept { return kind_; }
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
  std::optional<CodeErrorKind> code_error() const noexcept { return code_error_; }

 private:
  ServiceErrorKind kind_;
  std::vector<Diagnostic> diagnostics_;
  std::optional<CodeErrorKind> code_error_;
};

struct DatasetInfo {
  std::string id;
  std::size_t entries = 0;
};

struct EntryStatus {
  const DictionaryEntry* entry = nullptr;
  // Annotator id -> every slot of the entry has an effective code.
  std::map<std::string, bool> complete;
};

struct EntryFilter {
  std::optional<std::string> unannotated_by;
};

struct EntryPage {
  std::string dataset_id;
  std::size_t page = 0;
  std::size_t page_size = 0;
  std::size_t total = 0;  // entries matching the filter
  std::vector<EntryStatus> entries;
};

struct SubmitResult {
  AnnotationRecord record;
  std::vector<Diagnostic> diagnostics;  // warnings only
};

struct SessionState {
  std::string dataset_id;
  std::string annotator_id;
  std::size_t cursor = 0;  // first entry not yet fully annotated
  std::size_t completed = 0;
  std::size_t total = 0;
};

inline constexpr std::size_t kDefaultPageSize = 50;
inline constexpr std::size_t kMaxPageSize = 1000;

class AnnotationService {
 public:
  /// Loads every <id>.tsv in `data_dir` and replays existing logs. Throws
  /// CodecError (with the file name in the message) on a bad dataset.
  explicit AnnotationService(std::filesystem::path data_dir);

  std::vector<DatasetInfo> list_datasets() const;

  /// Resolves an optional dataset parameter: the given id, or the only
  /// loaded dataset when there is exactly one.
  const std::string& resolve_dataset(const std::optional<std::string>& dataset_id) const;

  const std::vector<DictionaryEntry>& entries(const std::string& dataset_id) const;
  const DictionaryEntry& entry(const std::string& dataset_id, const std::string& entry_id) const;
  const ReportedValues* reported_values(const std::string& dataset_id) const;

  EntryPage list_entries(const std::string& dataset_id, std::size_t page,
                         std::size_t page_size = kDefaultPageSize,
                         const EntryFilter& filter = {}) const;

  /// Appends the record to the annotator's log after validating the
  /// annotator's whole entry with the new code in place. Code-level errors
  /// reject (ValidationFailed); warnings are returned with the acceptance.
  /// The record is durable when this returns.
  SubmitResult submit_annotation(const std::string& dataset_id, AnnotationRecord record);

  /// Same, from one log-format line. The timestamp may be omitted, in which
  /// case the arrival time is used.
  SubmitResult submit_annotation_line(const std::string& dataset_id, std::string_view line);

  /// Effective (newest-wins) records of one annotator.
  std::vector<AnnotationRecord> effective_records(const std::string& dataset_id,
                                                  const std::string& annotator_id) const;

  AgreementReport agreement_report(const std::string& dataset_id, const std::string& first,
                                   const std::string& second, bool restricted,
                                   const KappaOptions& kappa = {}) const;

  CognatePartition suggest(const std::string& dataset_id, const std::string& entry_id,
                           const SimilarityConfig& cfg = {}) const;

  SessionState progress(const std::string& dataset_id, const std::string& annotator_id) const;

 private:
  struct Dataset {
    std::string id;
    std::vector<DictionaryEntry> entries;
    std::unordered_map<std::string, std::size_t> index;
    std::optional<ReportedValues> reported;
  };

  const Dataset& dataset(const std::string& id) const;
  std::vector<bool> completion(const Dataset& ds, const std::string& annotator_id) const;

  std::filesystem::path data_dir_;
  std::map<std::string, Dataset> datasets_;
  mutable AnnotationStore store_;
};

}  // namespace turkann
