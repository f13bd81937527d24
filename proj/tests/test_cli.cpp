#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bsg/commands.hpp"

using namespace bsg;
using namespace bsg::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bsg");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("parsers") {
  CHECK(parse_sequence("0,1, 0") == std::vector<int>{0, 1, 0});
  CHECK(parse_sequence("").empty());
  CHECK_THROWS_AS(parse_sequence("0,2"), UsageError);
  CHECK_THROWS_AS(parse_sequence("0,"), UsageError);
  CHECK(parse_policy("always-mw") == MeasurementPolicy::always_mw);
  CHECK_THROWS_AS(parse_policy("sometimes"), UsageError);
  CHECK(parse_mode("state-derived") == PredictionMode::state_derived);
  CHECK(parse_oracle("wigner-global") == OracleMode::wigner_global);
  CHECK_THROWS_AS(parse_format("xml"), UsageError);
}

TEST_CASE("simulate") {
  auto r = invoke({"simulate", "--seed", "42", "--theta", "0", "--policy", "always-mw"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("accept_wigner at round 10\n", 0) == 0);

  r = invoke({"simulate", "--seed", "1", "--theta", "1", "--policy", "always-mw", "--max-rounds", "50"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("undecided after 50 rounds\n", 0) == 0);

  r = invoke({"simulate", "--seed", "1", "--policy", "always-mw", "--sequence", "0,0,0,0,1"});
  CHECK(r.out.rfind("accept_friend at round 5\n", 0) == 0);

  r = invoke({"simulate", "--seed", "3", "--theta", "0.2", "--out", "json"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.front() == '{');
}

TEST_CASE("simulate writes byte-identical reports") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = dir / "bsg_cli_report_a.json";
  const auto b = dir / "bsg_cli_report_b.json";
  const std::vector<std::string> common{"simulate", "--seed", "7", "--theta", "0.3", "--ancilla", "--fprime"};
  auto args = common;
  args.insert(args.end(), {"--report", a.string()});
  CHECK(invoke(args).code == kExitOk);
  args = common;
  args.insert(args.end(), {"--report", b.string()});
  CHECK(invoke(args).code == kExitOk);
  const auto sa = slurp(a);
  CHECK_FALSE(sa.empty());
  CHECK(sa == slurp(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"simulate", "--theta", "0"}).code == kExitUsage);
  CHECK(invoke({"simulate", "--seed", "1", "--theta", "1.5"}).code == kExitUsage);
  CHECK(invoke({"simulate", "--seed", "1", "--epsilon", "0.7"}).code == kExitUsage);
  CHECK(invoke({"simulate", "--seed", "1", "--policy", "x"}).code == kExitUsage);
  CHECK(invoke({"sprt-trace", "--sequence", "0,3"}).code == kExitUsage);
  CHECK(invoke({"nonsense"}).code == kExitUsage);
  CHECK(invoke({"verify", "--grid", "0"}).code == kExitUsage);
}

TEST_CASE("sprt-trace") {
  auto r = invoke({"sprt-trace", "--theta", "0", "--sequence", "0,0,0,0,1,0"});
  CHECK(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line, last;
  std::getline(lines, line);
  CHECK(line == "step,outcome,llr,n0,n1,decision");
  int rows = 0;
  while (std::getline(lines, line)) {
    last = line;
    ++rows;
  }
  CHECK(rows == 5);
  CHECK(last == "5,1,-inf,4,1,accept_friend");
  const auto rows10 = trace_sprt(0.0, 1e-3, std::vector<int>(20, 0));
  CHECK(rows10.size() == 10);
  CHECK(rows10.back().decision == Decision::accept_wigner);
}

TEST_CASE("sweep") {
  auto r = invoke({"sweep", "--from", "0", "--to", "1", "--step", "0.1", "--epsilon", "0.001"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind(std::string(kSweepHeader) + "\n", 0) == 0);
  CHECK(r.out.find("\n0,0.001,10,1,0.5,") != std::string::npos);
  CHECK(r.out.find("\n1,0.001,diverges,") != std::string::npos);
  CHECK(invoke({"sweep-theta", "--out", "json"}).code == kExitOk);
  CHECK(theta_steps(0, 1, 0.1).size() == 11);
  CHECK(theta_steps(0, 1, 0.1)[3] == 0.3);
}

TEST_CASE("verify") {
  auto r = invoke({"verify"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = invoke({"verify", "--grid", "11", "--tol", "1e-30"});
  CHECK(r.code == kExitFailure);
  for (const auto& c : run_verification(101, 1e-10)) {
    INFO(c.name);
    CHECK(c.passed);
  }
}
