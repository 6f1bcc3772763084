#pragma once

// Append-only annotation logs, one file per (dataset, annotator):
//   <root>/annotations/<dataset_id>/<annotator_id>.jsonl
// An append returns only after the line is fsync'ed.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "turkann/codec.hpp"

namespace turkann {

/// Dataset and annotator ids double as file names: [A-Za-z0-9._-], at most
/// 128 bytes, not starting with '.'.
bool is_valid_identifier(std::string_view id);

class AnnotationLog {
 public:
  /// Opens and replays the file. A missing file is created, together with
  /// its directory, on the first append. A trailing fragment without
  /// a newline was never acknowledged: it is kept if it parses as a record
  /// and cut off otherwise. Throws CodecError on a malformed complete line.
  explicit AnnotationLog(std::filesystem::path path);
  ~AnnotationLog();

  AnnotationLog(const AnnotationLog&) = delete;
  AnnotationLog& operator=(const AnnotationLog&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

  /// Durable append.
  void append(const AnnotationRecord& record);

  /// Runs `decide` on the current records under the writer lock; if it
  /// returns a record, that record is appended before the lock is released.
  /// Exceptions from `decide` propagate and nothing is written.
  void update(const std::function<std::optional<AnnotationRecord>(
                  const std::vector<AnnotationRecord>&)>& decide);

  std::vector<AnnotationRecord> snapshot() const;

 private:
  void open_for_append_locked();
  void write_line_locked(const AnnotationRecord& record);

  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::mutex mutex_;
  std::vector<AnnotationRecord> records_;
};

class AnnotationStore {
 public:
  /// Loads every existing log below `root`/annotations.
  explicit AnnotationStore(std::filesystem::path root);

  /// Log for the pair, created on first use. Throws std::invalid_argument
  /// for ids that are not valid identifiers.
  AnnotationLog& log(const std::string& dataset_id, const std::string& annotator_id);

  /// Raw records in log order; empty if the annotator has no log.
  std::vector<AnnotationRecord> records(const std::string& dataset_id,
                                        const std::string& annotator_id) const;

  std::vector<std::string> annotators(const std::string& dataset_id) const;

 private:
  std::filesystem::path dir_for(const std::string& dataset_id) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<std::string, std::string>, std::unique_ptr<AnnotationLog>> logs_;
};

}  // namespace turkann
