#include <algorithm>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace turkann;
using namespace turkann::test;
using Json = nlohmann::ordered_json;

namespace {

CommandResult cli(const std::string& args) { return run(std::string(TURKANN_CLI) + " " + args + " 2>/dev/null"); }

const std::string kExamples = quoted(fixture("examples/examples.tsv"));
const std::string kGold = quoted(fixture("examples/annotations/examples/gold.jsonl"));
const std::string kPilot = quoted(fixture("pilot/pilot.tsv"));
const std::string kPilotLogs = quoted(fixture("pilot/annotations/pilot/annotator1.jsonl")) + " " +
                               quoted(fixture("pilot/annotations/pilot/annotator2.jsonl"));

}  // namespace

TEST_CASE("validate accepts the examples") {
  const auto r = cli("validate " + kExamples + " " + kGold);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0 error(s)") != std::string::npos);
}

TEST_CASE("validate names the line of a bad code") {
  TempDir dir;
  const std::string good = read_text(fixture("examples/annotations/examples/gold.jsonl"));
  std::string bad = good;
  bad.replace(bad.find("\"1R\""), 4, "\"1Z\"");
  write_text(dir / "bad.jsonl", bad);
  const auto r = cli("validate " + kExamples + " " + quoted(dir / "bad.jsonl"));
  CHECK(r.exit_code == 1);
  const std::size_t line = static_cast<std::size_t>(std::count(good.begin(), good.begin() + static_cast<long>(good.find("\"1R\"")), '\n')) + 1;
  CHECK(r.output.find("bad.jsonl:" + std::to_string(line) + ": error: BadCode") != std::string::npos);
}

TEST_CASE("validate reports semantic errors with provenance") {
  TempDir dir;
  write_text(dir / "a.jsonl",
             R"({"annotator_id":"a","entry_id":"truck","language":"Tatar","lexeme_index":0,"code":"2X","timestamp":"2024-01-01T00:00:00Z"})"
             "\n");
  const auto r = cli("validate " + kExamples + " " + quoted(dir / "a.jsonl"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("a.jsonl:1: error: ClassExceedsSlots") != std::string::npos);
}

TEST_CASE("missing files and bad usage exit with 2") {
  CHECK(cli("validate /nonexistent/x.tsv").exit_code == 2);
  CHECK(cli("validate " + kExamples + " /nonexistent/x.jsonl").exit_code == 2);
  CHECK(cli("").exit_code == 2);
  CHECK(cli("frobnicate").exit_code == 2);
  CHECK(cli("agree " + kPilot).exit_code == 2);
  CHECK(cli("suggest " + kExamples + " --tau 1.5").exit_code == 2);
  CHECK(cli("serve " + quoted(fixture("examples")) + " --port 70000").exit_code == 2);
  CHECK(cli("serve " + quoted(fixture("examples")) + " --port -1").exit_code == 2);
  CHECK(cli("--help").exit_code == 0);
}

TEST_CASE("agree prints the pilot statistics") {
  const auto r = cli("agree " + kPilot + " " + kPilotLogs + " --reference " +
                     quoted(fixture("pilot/pilot.reported.json")));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("n = 392, agreements = 302") != std::string::npos);
  CHECK(r.output.find("p_e = 41697/153664") != std::string::npos);
  CHECK(r.output.find("kappa = 0.6849") != std::string::npos);
  CHECK(r.output.find("reported kappa = 0.5927") != std::string::npos);
  CHECK(r.output.find("NOT reproduced") != std::string::npos);

  const auto restricted = cli("agree --restricted " + kPilot + " " + kPilotLogs);
  CHECK(restricted.output.find("kappa = 0.9010") != std::string::npos);
  CHECK(restricted.output.find("n = 303, agreements = 284") != std::string::npos);
}

TEST_CASE("agree emits machine-readable reports") {
  const auto r = cli("agree --format json " + kPilot + " " + kPilotLogs);
  CHECK(r.exit_code == 0);
  const Json j = Json::parse(r.output);
  CHECK(j["kappa"]["n"] == 392);
  CHECK(j["kappa"]["kappa"].get<double>() == doctest::Approx(0.6849071601454).epsilon(1e-12));
  // Deterministic output.
  CHECK(cli("agree --format json " + kPilot + " " + kPilotLogs).output == r.output);
}

TEST_CASE("identical logs agree perfectly") {
  const std::string log = quoted(fixture("pilot/annotations/pilot/annotator1.jsonl"));
  const auto r = cli("agree --format json " + kPilot + " " + log + " " + log);
  CHECK(Json::parse(r.output)["kappa"]["kappa"] == 1.0);
}

TEST_CASE("agree without shared slots exits with 1") {
  TempDir dir;
  write_text(dir / "empty.jsonl", "");
  const auto r = cli("agree " + kPilot + " " + quoted(fixture("pilot/annotations/pilot/annotator1.jsonl")) +
                     " " + quoted(dir / "empty.jsonl"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("empty intersection") != std::string::npos);
}

TEST_CASE("suggest proposes and evaluates") {
  const auto r = cli("suggest " + kExamples + " --entry one --format json");
  CHECK(r.exit_code == 0);
  CHECK(Json::parse(r.output)["entries"][0]["proposed"]["blocks"].size() == 1);

  const auto e = cli("suggest " + kExamples + " --gold " + kGold + " --format json");
  CHECK(e.exit_code == 0);
  const Json j = Json::parse(e.output);
  CHECK(j["aggregate"]["pairs"]["together_both"] == 128);
  CHECK(j["aggregate"]["pairs"]["together_first_only"] == 4);

  const auto s = cli("suggest " + kExamples + " --gold " + kGold + " --sweep 0.2,0.6,1 --format json");
  CHECK(Json::parse(s.output).size() == 3);
}

TEST_CASE("suggest with incomplete gold") {
  TempDir dir;
  const std::string gold = read_text(fixture("examples/annotations/examples/gold.jsonl"));
  write_text(dir / "partial.jsonl", gold.substr(0, gold.find('\n') + 1));
  const std::string partial = quoted(dir / "partial.jsonl");
  CHECK(cli("suggest " + kExamples + " --gold " + partial).exit_code == 1);
  CHECK(cli("suggest " + kExamples + " --gold " + partial + " --skip-missing").exit_code == 0);
}

TEST_CASE("import and merge round-trip the fixtures") {
  TempDir dir;
  CHECK(cli("import " + kExamples + " -o " + quoted(dir / "out.tsv")).exit_code == 0);
  CHECK(read_text(dir / "out.tsv") == read_text(fixture("examples/examples.tsv")));
  CHECK(cli("merge " + kGold + " -o " + quoted(dir / "merged.jsonl")).exit_code == 0);
  CHECK(read_text(dir / "merged.jsonl") == read_text(fixture("examples/annotations/examples/gold.jsonl")));
}

TEST_CASE("merge interleaves logs by timestamp") {
  TempDir dir;
  auto line = [](const char* code, const char* stamp) {
    return std::string(R"({"annotator_id":"a","entry_id":"truck","language":"Tatar","lexeme_index":0,"code":")") +
           code + R"(","timestamp":")" + stamp + "\"}\n";
  };
  write_text(dir / "x.jsonl", line("1X", "2024-01-01T00:00:00Z") + line("1Q", "2024-01-03T00:00:00Z"));
  write_text(dir / "y.jsonl", line("1T", "2024-01-02T00:00:00Z"));
  const auto r = cli("merge " + quoted(dir / "x.jsonl") + " " + quoted(dir / "y.jsonl"));
  CHECK(r.output == line("1X", "2024-01-01T00:00:00Z") + line("1T", "2024-01-02T00:00:00Z") +
                        line("1Q", "2024-01-03T00:00:00Z"));
  const auto resolved = cli("merge --resolve " + quoted(dir / "x.jsonl") + " " + quoted(dir / "y.jsonl"));
  CHECK(resolved.output == line("1Q", "2024-01-03T00:00:00Z"));
}

TEST_CASE("the fixture generator is deterministic") {
  TempDir dir;
  CHECK(run(std::string(TURKANN_MAKE_PILOT) + " " + quoted(dir.path()) + " >/dev/null").exit_code == 0);
  CHECK(read_text(dir / "pilot.tsv") == read_text(fixture("pilot/pilot.tsv")));
  for (const char* name : {"annotator1.jsonl", "annotator2.jsonl"})
    CHECK(read_text(dir / (std::string("annotations/pilot/") + name)) ==
          read_text(fixture(std::string("pilot/annotations/pilot/") + name)));
}

TEST_CASE("serve answers requests and stops on SIGTERM") {
  TempDir dir;
  fs::copy_file(fixture("examples/examples.tsv"), dir / "examples.tsv");
  ServerProcess server(dir.path());
  const auto r = run("curl -s http://127.0.0.1:" + std::to_string(server.port()) + "/datasets");
  CHECK(Json::parse(r.output)["datasets"][0]["id"] == "examples");
  server.kill(SIGTERM);
  CHECK(WIFEXITED(server.exit_status()));
  CHECK(WEXITSTATUS(server.exit_status()) == 0);
}
