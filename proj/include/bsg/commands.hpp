#pragma once

// Implementations behind the `bsg` command-line tool. Each command writes to
// the given streams and returns the process exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsg/game.hpp"
#include "bsg/sprt.hpp"

namespace bsg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Thrown for bad flag values; maps to kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

/// Parses "0,1,0" into outcome bits. Empty input gives an empty sequence.
std::vector<int> parse_sequence(const std::string& text);

MeasurementPolicy parse_policy(const std::string& s);
PredictionMode parse_mode(const std::string& s);
OracleMode parse_oracle(const std::string& s);
OutputFormat parse_format(const std::string& s);

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  GameConfig game;
  std::optional<std::string> report_path;
  OutputFormat out = OutputFormat::csv;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

/// "accept_wigner at round 10", "undecided after 100 rounds", ...
std::string summarize(const SessionReport& report);

// --- sweep -----------------------------------------------------------------

struct SweepRow {
  double theta = 0.0;
  double epsilon = 0.0;
  std::optional<std::uint64_t> n0;  ///< nullopt: diverges
  double pW_w0_pub = 0.0;
  double pF_w0_pub = 0.0;
  /// Friend's omega0 probability from her post-interface state, record phi0.
  double pF_w0_derived = 0.0;
  double pW_f0_MF = 0.0;
};

inline constexpr const char* kSweepHeader = "theta,epsilon,n0,pW_w0_pub,pF_w0_pub,pF_w0_derived,pW_f0_MF";

/// theta values from..to (inclusive when reached) in `step` increments,
/// rounded to 12 decimals.
std::vector<double> theta_steps(double from, double to, double step);
std::vector<SweepRow> sweep_theta(const std::vector<double>& thetas, const std::vector<double>& epsilons);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);

struct SweepArgs {
  double from = 0.0;
  double to = 1.0;
  double step = 0.05;
  std::vector<double> epsilons{1e-3};
  OutputFormat out = OutputFormat::csv;
};

int cmd_sweep_theta(const SweepArgs& args, std::ostream& out, std::ostream& err);

// --- sprt-trace ------------------------------------------------------------

struct TraceRow {
  std::uint64_t step = 0;
  int outcome = 0;
  double llr = 0.0;
  std::uint64_t n0 = 0;
  std::uint64_t n1 = 0;
  Decision decision = Decision::undecided;
};

/// Feeds outcomes through the SPRT with Wigner's and the friend's published
/// M_W predictions at theta. Stops at the first decision.
std::vector<TraceRow> trace_sprt(double theta, double epsilon, const std::vector<int>& outcomes);

struct TraceArgs {
  double theta = 0.0;
  double epsilon = 1e-3;
  std::string sequence;
  OutputFormat out = OutputFormat::csv;
};

int cmd_sprt_trace(const TraceArgs& args, std::ostream& out, std::ostream& err);

// --- verify ----------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = false;
  double deviation = 0.0;
};

/// Closed-form vs Born comparison plus the protocol and qstate identities,
/// each evaluated against `tolerance` on a `grid_points` theta grid.
std::vector<CheckResult> run_verification(std::size_t grid_points, double tolerance);

struct VerifyArgs {
  std::size_t grid = 101;
  double tol = 1e-10;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);

/// Full CLI entry point (argument parsing included).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace bsg::cli
