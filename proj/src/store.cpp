#include "turkann/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace turkann {
namespace {

std::system_error os_error(const std::string& what, const std::filesystem::path& path) {
  return std::system_error(errno, std::generic_category(), what + " " + path.string());
}

void write_all(int fd, std::string_view data, const std::filesystem::path& path) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw os_error("write", path);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void sync_directory(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

bool is_valid_identifier(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

AnnotationLog::AnnotationLog(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  fd_ = ::open(path_.c_str(), O_RDWR | O_APPEND | O_CLOEXEC);
  if (fd_ < 0) throw os_error("cannot open annotation log", path_);

  std::string text;
  {
    std::ifstream in(path_, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  const std::size_t complete = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
  const std::string_view body(text.data(), complete);
  const std::string_view tail(text.data() + complete, text.size() - complete);

  try {
    records_ = parse_annotations(body);
  } catch (const CodecError& e) {
    ::close(fd_);
    throw CodecError(e.kind(), e.line(), path_.string() + ": " + e.message(), e.code_error());
  }
  if (!tail.empty()) {
    std::optional<AnnotationRecord> last;
    try {
      last = parse_annotation_line(tail, records_.size() + 1);
    } catch (const CodecError&) {
    }
    if (::ftruncate(fd_, static_cast<off_t>(complete)) != 0) {
      ::close(fd_);
      throw os_error("cannot truncate torn record in", path_);
    }
    if (last) write_line_locked(*last);
    ::fsync(fd_);
  }
}

AnnotationLog::~AnnotationLog() {
  if (fd_ >= 0) ::close(fd_);
}

void AnnotationLog::open_for_append_locked() {
  const auto dir = path_.parent_path();
  if (!std::filesystem::exists(dir)) {
    std::filesystem::create_directories(dir);
    sync_directory(dir.parent_path());
  }
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw os_error("cannot create annotation log", path_);
  sync_directory(dir);
}

void AnnotationLog::write_line_locked(const AnnotationRecord& record) {
  if (fd_ < 0) open_for_append_locked();
  write_all(fd_, serialize_annotation(record) + '\n', path_);
  records_.push_back(record);
}

void AnnotationLog::append(const AnnotationRecord& record) {
  std::lock_guard lock(mutex_);
  write_line_locked(record);
  if (::fdatasync(fd_) != 0) throw os_error("fdatasync", path_);
}

void AnnotationLog::update(const std::function<std::optional<AnnotationRecord>(
                               const std::vector<AnnotationRecord>&)>& decide) {
  std::lock_guard lock(mutex_);
  if (auto record = decide(records_)) {
    write_line_locked(*record);
    if (::fdatasync(fd_) != 0) throw os_error("fdatasync", path_);
  }
}

std::vector<AnnotationRecord> AnnotationLog::snapshot() const {
  std::lock_guard lock(mutex_);
  return records_;
}

AnnotationStore::AnnotationStore(std::filesystem::path root) : root_(std::move(root)) {
  const auto base = root_ / "annotations";
  if (!std::filesystem::exists(base)) return;
  for (const auto& ds : std::filesystem::directory_iterator(base)) {
    if (!ds.is_directory() || !is_valid_identifier(ds.path().filename().string())) continue;
    for (const auto& file : std::filesystem::directory_iterator(ds.path())) {
      if (!file.is_regular_file() || file.path().extension() != ".jsonl") continue;
      const std::string annotator = file.path().stem().string();
      if (!is_valid_identifier(annotator)) continue;
      logs_.emplace(std::pair{ds.path().filename().string(), annotator},
                    std::make_unique<AnnotationLog>(file.path()));
    }
  }
}

std::filesystem::path AnnotationStore::dir_for(const std::string& dataset_id) const {
  return root_ / "annotations" / dataset_id;
}

AnnotationLog& AnnotationStore::log(const std::string& dataset_id, const std::string& annotator_id) {
  if (!is_valid_identifier(dataset_id) || !is_valid_identifier(annotator_id))
    throw std::invalid_argument("dataset and annotator ids must match [A-Za-z0-9._-]+");
  const auto key = std::pair{dataset_id, annotator_id};
  {
    std::shared_lock lock(mutex_);
    if (auto it = logs_.find(key); it != logs_.end()) return *it->second;
  }
  std::unique_lock lock(mutex_);
  if (auto it = logs_.find(key); it != logs_.end()) return *it->second;
  auto [it, inserted] = logs_.emplace(
      key, std::make_unique<AnnotationLog>(dir_for(dataset_id) / (annotator_id + ".jsonl")));
  return *it->second;
}

std::vector<AnnotationRecord> AnnotationStore::records(const std::string& dataset_id,
                                                       const std::string& annotator_id) const {
  std::shared_lock lock(mutex_);
  auto it = logs_.find(std::pair{dataset_id, annotator_id});
  if (it == logs_.end()) return {};
  return it->second->snapshot();
}

std::vector<std::string> AnnotationStore::annotators(const std::string& dataset_id) const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [key, log] : logs_) {
    if (key.first == dataset_id) out.push_back(key.second);
  }
  return out;
}

}  // namespace turkann
