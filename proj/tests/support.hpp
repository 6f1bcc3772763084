#pragma once

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "turkann/agreement.hpp"
#include "turkann/codec.hpp"

namespace turkann::test {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& relative) { return fs::path(TURKANN_FIXTURES) / relative; }

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "turkann-XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs through the shell; captures stdout only.
inline CommandResult run(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// `turkann serve DIR --port 0` in a child process.
class ServerProcess {
 public:
  explicit ServerProcess(const fs::path& data_dir) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("fork failed");
    if (pid_ == 0) {
      dup2(fds[1], STDOUT_FILENO);
      close(fds[0]);
      close(fds[1]);
      execl(TURKANN_CLI, "turkann", "serve", data_dir.c_str(), "--port", "0", static_cast<char*>(nullptr));
      _exit(127);
    }
    close(fds[1]);
    std::string line;
    char c = 0;
    while (read(fds[0], &c, 1) == 1 && c != '\n') line += c;
    close(fds[0]);
    const auto colon = line.rfind(':');
    if (line.rfind("listening on http://", 0) != 0 || colon == std::string::npos) {
      kill();
      throw std::runtime_error("server did not start: " + line);
    }
    port_ = std::stoi(line.substr(colon + 1));
  }
  ~ServerProcess() { kill(); }
  ServerProcess(const ServerProcess&) = delete;
  ServerProcess& operator=(const ServerProcess&) = delete;

  int port() const { return port_; }

  void kill(int signal = SIGKILL) {
    if (pid_ <= 0) return;
    ::kill(pid_, signal);
    int status = 0;
    waitpid(pid_, &status, 0);
    exit_status_ = status;
    pid_ = -1;
  }
  int exit_status() const { return exit_status_; }

 private:
  pid_t pid_ = -1;
  int port_ = 0;
  int exit_status_ = -1;
};

inline std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

inline const std::vector<Etymology> kPilotCategories{
    Etymology::Turkic,        Etymology::Arabic,          Etymology::Persian,
    Etymology::Russian,       Etymology::French,          Etymology::Unknown,
    Etymology::MixedCompound, Etymology::ForeignBaseVerb, Etymology::ForeignBaseNominal,
};

// Published pilot count table. Rows: second annotator; columns: first.
inline const std::vector<std::vector<std::uint64_t>> kPilotCounts{
    {160, 8, 2, 0, 0, 3, 10, 6, 1},
    {0, 56, 2, 6, 0, 1, 0, 1, 0},
    {0, 0, 31, 0, 0, 0, 1, 0, 0},
    {0, 0, 0, 32, 1, 0, 0, 0, 0},
    {0, 0, 0, 0, 5, 0, 0, 0, 0},
    {12, 5, 0, 2, 0, 0, 2, 3, 0},
    {2, 0, 1, 5, 0, 0, 17, 8, 0},
    {0, 1, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 0, 0, 0, 6, 0, 1},
};

inline ContingencyMatrix pilot_matrix() { return ContingencyMatrix(kPilotCategories, kPilotCounts); }

inline std::vector<DictionaryEntry> example_entries() {
  return parse_dataset(read_text(fixture("examples/examples.tsv")));
}

inline std::vector<AnnotationRecord> example_gold() {
  return parse_annotations(read_text(fixture("examples/annotations/examples/gold.jsonl")));
}

inline const DictionaryEntry& find_entry(const std::vector<DictionaryEntry>& entries,
                                         const std::string& id) {
  for (const auto& e : entries)
    if (e.entry_id == id) return e;
  throw std::runtime_error("no entry " + id);
}

inline EntryAnnotation gold_annotation(const std::string& entry_id) {
  for (auto& ann : group_by_entry(resolve_newest_wins(example_gold())))
    if (ann.entry_id == entry_id) return ann;
  throw std::runtime_error("no gold for " + entry_id);
}

// Codes in column order; "-" skips a language. One lexeme per language.
inline EntryAnnotation annotation(const std::string& entry_id, const std::string& codes) {
  EntryAnnotation ann{entry_id, "tester", {}};
  std::istringstream in(codes);
  std::string code;
  for (LanguageId lang : kLanguages) {
    if (!(in >> code)) break;
    if (code != "-") ann.codes[{lang, 0}] = parse_code(code);
  }
  return ann;
}

}  // namespace turkann::test
