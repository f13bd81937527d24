#include "bsg/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bsg/canonical_json.hpp"
#include "bsg/protocol.hpp"

namespace bsg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string n0_text(const std::optional<std::uint64_t>& n0) { return n0 ? std::to_string(*n0) : "diverges"; }

double max_offdiag_gram(const std::array<StatePair, 2>& pairs) {
  double dev = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const Complex g = inner_product(pairs[i].output, pairs[j].output);
      dev = std::max(dev, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return dev;
}

StateVector sfw(std::size_t s, std::size_t f, std::size_t w) {
  static const SubsystemLayout layout({label::kSystem, label::kFriend, label::kWigner});
  return basis_state(layout, {{label::kSystem, s}, {label::kFriend, f}, {label::kWigner, w}});
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing helpers

std::vector<int> parse_sequence(const std::string& text) {
  std::vector<int> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto t = trim(token);
    if (t == "0") {
      out.push_back(0);
    } else if (t == "1") {
      out.push_back(1);
    } else {
      throw UsageError("malformed outcome token '" + token + "' (expected 0 or 1)");
    }
  }
  if (!text.empty() && text.back() == ',') throw UsageError("malformed outcome sequence: trailing comma");
  return out;
}

MeasurementPolicy parse_policy(const std::string& s) {
  if (s == "always-mf") return MeasurementPolicy::always_mf;
  if (s == "always-mw") return MeasurementPolicy::always_mw;
  if (s == "random") return MeasurementPolicy::random_uniform;
  throw UsageError("unknown policy: " + s);
}

PredictionMode parse_mode(const std::string& s) {
  if (s == "as-published") return PredictionMode::as_published;
  if (s == "state-derived") return PredictionMode::state_derived;
  throw UsageError("unknown mode: " + s);
}

OracleMode parse_oracle(const std::string& s) {
  if (s == "bubble-relative") return OracleMode::bubble_relative;
  if (s == "wigner-global") return OracleMode::wigner_global;
  throw UsageError("unknown oracle: " + s);
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw UsageError("unknown output format: " + s);
}

// ---------------------------------------------------------------------------
// simulate

std::string summarize(const SessionReport& report) {
  const auto line = [&](const RefereeSummary& r) {
    if (r.decided_round) return std::string(to_string(r.sprt.decision())) + " at round " + std::to_string(*r.decided_round);
    return "undecided after " + std::to_string(report.rounds.size()) + " rounds";
  };
  switch (report.config.policy) {
    case MeasurementPolicy::always_mw:
      return line(report.referee_w);
    case MeasurementPolicy::always_mf:
      return line(report.referee_f);
    case MeasurementPolicy::random_uniform:
      break;
  }
  return "R_W: " + line(report.referee_w) + "; R_F: " + line(report.referee_f);
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  const auto report = run_session(args.game);
  const auto json = report.to_json();
  if (args.report_path) {
    std::ofstream file(*args.report_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write report to " << *args.report_path << "\n";
      return kExitFailure;
    }
    file << json << '\n';
  }
  if (args.out == OutputFormat::json) {
    out << json << '\n';
  } else {
    out << summarize(report) << '\n';
    out << "rounds: " << report.rounds.size() << '\n';
    out << "ledger root: " << report.ledger.root() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

std::vector<double> theta_steps(double from, double to, double step) {
  if (!(from >= 0.0 && to <= 1.0 && from < to)) throw UsageError("sweep range must satisfy 0 <= from < to <= 1");
  if (!(step > 0.0)) throw UsageError("sweep step must be positive");
  std::vector<double> out;
  for (std::uint64_t k = 0;; ++k) {
    const double theta = std::round((from + static_cast<double>(k) * step) * 1e12) / 1e12;
    if (theta > to + 1e-12) break;
    out.push_back(std::min(theta, to));
  }
  return out;
}

std::vector<SweepRow> sweep_theta(const std::vector<double>& thetas, const std::vector<double>& epsilons) {
  if (epsilons.empty()) throw UsageError("sweep needs at least one epsilon");
  std::vector<SweepRow> rows;
  for (const double theta : thetas) {
    ProtocolConfig config;
    config.theta = theta;
    const auto pW = predict(config, Observer::wigner, Measurement::m_w, PredictionMode::as_published);
    const auto pF = predict(config, Observer::friend_, Measurement::m_w, PredictionMode::as_published, Record::phi0);
    const auto pFd = predict(config, Observer::friend_, Measurement::m_w, PredictionMode::state_derived, Record::phi0);
    const auto pWmf = predict(config, Observer::wigner, Measurement::m_f, PredictionMode::as_published);
    for (const double eps : epsilons) {
      rows.push_back({theta, eps, min_runs_to_accept_wigner(theta, eps), pW.of(0), pF.of(0), pFd.of(0), pWmf.of(0)});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    out += format_double(r.theta) + "," + format_double(r.epsilon) + "," + n0_text(r.n0) + "," +
           format_double(r.pW_w0_pub) + "," + format_double(r.pF_w0_pub) + "," + format_double(r.pF_w0_derived) +
           "," + format_double(r.pW_f0_MF) + "\n";
  }
  return out;
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["theta"] = r.theta;
    j["epsilon"] = r.epsilon;
    j["n0"] = r.n0 ? Json(*r.n0) : Json("diverges");
    j["pW_w0_pub"] = r.pW_w0_pub;
    j["pF_w0_pub"] = r.pF_w0_pub;
    j["pF_w0_derived"] = r.pF_w0_derived;
    j["pW_f0_MF"] = r.pW_f0_MF;
    arr.push_back(std::move(j));
  }
  return canonical_dump(arr) + "\n";
}

int cmd_sweep_theta(const SweepArgs& args, std::ostream& out, std::ostream&) {
  const auto rows = sweep_theta(theta_steps(args.from, args.to, args.step), args.epsilons);
  out << (args.out == OutputFormat::json ? sweep_json(rows) : sweep_csv(rows));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sprt-trace

std::vector<TraceRow> trace_sprt(double theta, double epsilon, const std::vector<int>& outcomes) {
  ProtocolConfig config;
  config.theta = theta;
  const auto pW = predict(config, Observer::wigner, Measurement::m_w, PredictionMode::as_published);
  const auto pF = predict(config, Observer::friend_, Measurement::m_w, PredictionMode::as_published, Record::phi0);
  auto state = SprtState::init(epsilon);
  std::vector<TraceRow> rows;
  for (std::size_t i = 0; i < outcomes.size() && !state.decided(); ++i) {
    const int o = outcomes[i];
    state = state.update(o, pW.of(o), pF.of(o));
    rows.push_back({i + 1, o, state.log_likelihood(), state.n0(), state.n1(), state.decision()});
  }
  return rows;
}

int cmd_sprt_trace(const TraceArgs& args, std::ostream& out, std::ostream&) {
  const auto outcomes = parse_sequence(args.sequence);
  const auto rows = trace_sprt(args.theta, args.epsilon, outcomes);
  const auto final_decision = rows.empty() ? Decision::undecided : rows.back().decision;
  if (args.out == OutputFormat::json) {
    Json j;
    j["theta"] = args.theta;
    j["epsilon"] = args.epsilon;
    j["upper"] = SprtState::init(args.epsilon).upper();
    Json steps = Json::array();
    for (const auto& r : rows) {
      steps.push_back(Json{{"step", r.step}, {"outcome", r.outcome}, {"llr", r.llr}, {"n0", r.n0}, {"n1", r.n1},
                           {"decision", to_string(r.decision)}});
    }
    j["steps"] = std::move(steps);
    j["decision"] = to_string(final_decision);
    out << canonical_dump(j) << '\n';
    return kExitOk;
  }
  out << "step,outcome,llr,n0,n1,decision\n";
  for (const auto& r : rows) {
    out << r.step << ',' << r.outcome << ',' << format_double(r.llr) << ',' << r.n0 << ',' << r.n1 << ','
        << to_string(r.decision) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

std::vector<CheckResult> run_verification(std::size_t grid_points, double tolerance) {
  const auto grid = unit_grid(grid_points);
  std::vector<CheckResult> checks;
  const auto add = [&](std::string name, double deviation) {
    checks.push_back({std::move(name), deviation <= tolerance, deviation});
  };

  add("closed_form_vs_born", verify_closed_forms(grid, tolerance).max_deviation);

  double orthonormal = 0.0;
  double unitarity = 0.0;
  double reproduction = 0.0;
  double insensitivity = 0.0;
  double normalization = 0.0;
  double persistence = 0.0;
  for (const double theta : grid) {
    const auto pairs = interaction_pairs(theta);
    orthonormal = std::max(orthonormal, max_offdiag_gram(pairs));
    const auto u = interaction_unitary(theta);
    unitarity = std::max(unitarity, unitarity_defect(u.matrix()));
    for (const auto& p : pairs) reproduction = std::max(reproduction, apply(u, p.input).distance(p.output));

    ProtocolConfig config;
    config.theta = theta;
    const auto asc = ComplementOrder::ascending;
    const auto desc = ComplementOrder::descending;
    insensitivity = std::max(insensitivity, wigner_state_after_interaction(config, asc).state().distance(
                                                wigner_state_after_interaction(config, desc).state()));
    insensitivity = std::max(insensitivity, wigner_state_after_repeat(config, asc).state().distance(
                                                wigner_state_after_repeat(config, desc).state()));
    for (const auto r : {Record::phi0, Record::phi1}) {
      const auto psi2f = friend_state_after_interaction(config, r, asc);
      insensitivity = std::max(insensitivity, psi2f.state().distance(friend_state_after_interaction(config, r, desc).state()));
      persistence = std::max({persistence, std::abs(psi2f.state().amplitude({{label::kSystem, 0}, {label::kFriend, 1}, {label::kWigner, 0}})),
                              std::abs(psi2f.state().amplitude({{label::kSystem, 0}, {label::kFriend, 1}, {label::kWigner, 1}})),
                              std::abs(psi2f.state().amplitude({{label::kSystem, 1}, {label::kFriend, 0}, {label::kWigner, 0}})),
                              std::abs(psi2f.state().amplitude({{label::kSystem, 1}, {label::kFriend, 0}, {label::kWigner, 1}}))});
    }
    for (const auto mode : {PredictionMode::as_published, PredictionMode::state_derived}) {
      for (const auto m : {Measurement::m_f, Measurement::m_w}) {
        const auto pw = predict(config, Observer::wigner, m, mode);
        normalization = std::max(normalization, std::abs(pw.of(0) + pw.of(1) - 1.0));
        for (const auto r : {Record::phi0, Record::phi1}) {
          const auto pf = predict(config, Observer::friend_, m, mode, r);
          normalization = std::max(normalization, std::abs(pf.of(0) + pf.of(1) - 1.0));
        }
      }
    }
  }
  add("interaction_outputs_orthonormal", orthonormal);
  add("interaction_unitarity", unitarity);
  add("interaction_reproduces_defining_pairs", reproduction);
  add("completion_insensitivity", insensitivity);
  add("prediction_normalization", normalization);
  add("record_persistence", persistence);

  // Endpoint identities.
  ProtocolConfig at0;
  at0.theta = 0.0;
  {
    const auto omega_plus = superpose({{M_SQRT1_2, sfw(0, 0, 0)}, {M_SQRT1_2, sfw(0, 0, 1)}}, true);
    const auto omega_minus_up = superpose({{M_SQRT1_2, sfw(0, 0, 0)}, {-M_SQRT1_2, sfw(0, 0, 1)}}, true);
    const auto omega_plus_down = superpose({{M_SQRT1_2, sfw(1, 1, 0)}, {M_SQRT1_2, sfw(1, 1, 1)}}, true);
    const auto omega_minus_down = superpose({{M_SQRT1_2, sfw(1, 1, 0)}, {-M_SQRT1_2, sfw(1, 1, 1)}}, true);
    const auto rewritten0 = superpose({{M_SQRT1_2, omega_plus}, {M_SQRT1_2, omega_minus_down}}, false);
    const auto rewritten1 = superpose({{M_SQRT1_2, omega_minus_up}, {M_SQRT1_2, omega_plus_down}}, false);
    const double d = std::max(friend_state_after_interaction(at0, Record::phi0).state().distance(rewritten0),
                              friend_state_after_interaction(at0, Record::phi1).state().distance(rewritten1));
    add("bell_rewriting_at_theta0", d);
  }
  {
    const auto ghz = wigner_state_after_repeat(at0).state();
    int nonzero = 0;
    double dev = 0.0;
    for (Eigen::Index i = 0; i < ghz.amplitudes().size(); ++i) {
      const double p = std::norm(ghz.amplitudes()(i));
      if (p > kAlgebraTol) {
        ++nonzero;
        dev = std::max(dev, std::abs(p - 0.5));
      }
    }
    add("ghz_structure", nonzero == 2 ? dev : 1.0);
  }
  {
    ProtocolConfig at1;
    at1.theta = 1.0;
    const auto correlated = superpose({{M_SQRT1_2, sfw(0, 0, 0)}, {M_SQRT1_2, sfw(1, 1, 1)}}, false);
    const double d = std::max({wigner_state_after_interaction(at1).state().distance(correlated),
                               friend_state_after_interaction(at1, Record::phi0).state().distance(sfw(0, 0, 0)),
                               friend_state_after_interaction(at1, Record::phi1).state().distance(sfw(1, 1, 1))});
    add("perfect_correlation_at_theta1", d);
  }
  {
    double dev = 0.0;
    for (const double eps : {1e-2, 1e-3}) {
      std::uint64_t prev = 0;
      for (const double theta : grid) {
        const auto n = min_runs_to_accept_wigner(theta, eps);
        if (!n) {
          if (theta < 1.0) dev = 1.0;
          continue;
        }
        if (*n < prev) dev = 1.0;
        prev = *n;
      }
    }
    add("n0_monotone_in_theta", dev);
  }
  return checks;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  if (args.grid == 0) throw UsageError("--grid must be positive");
  if (!(args.tol >= 0.0)) throw UsageError("--tol must be non-negative");
  const auto checks = run_verification(args.grid, args.tol);
  bool all = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " max_deviation=" << format_double(c.deviation) << '\n';
    all = all && c.passed;
  }
  if (!all) {
    err << "verification failed at tolerance " << format_double(args.tol) << ":\n";
    for (const auto& c : checks) {
      if (!c.passed) err << "  " << c.name << ": " << format_double(c.deviation) << " > " << format_double(args.tol) << '\n';
    }
  }
  return all ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// CLI

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bubble switching game simulator and verifier"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  double theta = 0.0;
  double epsilon = 1e-3;
  std::vector<double> epsilons;
  std::string policy = "random";
  std::string mode = "as-published";
  std::string oracle = "bubble-relative";
  std::uint64_t max_rounds = 1000;
  std::string format = "csv";
  std::string sequence;
  std::optional<std::string> report_path;
  bool ancilla = false;
  bool fprime = false;
  double from = 0.0;
  double to = 1.0;
  double step = 0.05;
  std::size_t grid = 101;
  double tol = 1e-10;

  auto* sim = app.add_subcommand("simulate", "Play a seeded session until the referees decide");
  sim->add_option("--seed", seed, "64-bit seed (required)");
  sim->add_option("--theta", theta, "Leakage parameter in [0,1]");
  sim->add_option("--epsilon", epsilon, "SPRT error level in (0, 1/2)");
  sim->add_option("--policy", policy, "always-mf | always-mw | random");
  sim->add_option("--mode", mode, "as-published | state-derived");
  sim->add_option("--oracle", oracle, "bubble-relative | wigner-global");
  sim->add_option("--max-rounds", max_rounds, "Round limit");
  sim->add_option("--sequence", sequence, "Replay these outcomes (comma-separated bits) instead of sampling");
  sim->add_option("--report", report_path, "Write the JSON session report to this file");
  sim->add_option("--out", format, "csv (summary lines) | json (full report on stdout)");
  sim->add_flag("--ancilla", ancilla, "Swap the friend's memory into an ancilla before M_W");
  sim->add_flag("--fprime", fprime, "Carry the F' register in every state");

  auto* sweep = app.add_subcommand("sweep", "Minimum-run curve and predictions across theta");
  sweep->alias("sweep-theta");
  sweep->add_option("--from", from, "First theta");
  sweep->add_option("--to", to, "Last theta");
  sweep->add_option("--step", step, "Theta increment");
  sweep->add_option("--epsilon", epsilons, "SPRT error level(s); repeat for several");
  sweep->add_option("--out", format, "csv | json");
  sweep->add_option("--seed", seed, "Accepted for uniformity; the sweep is deterministic");

  auto* trace = app.add_subcommand("sprt-trace", "SPRT trajectory for an explicit M_W outcome sequence");
  trace->add_option("--theta", theta, "Leakage parameter in [0,1]");
  trace->add_option("--epsilon", epsilon, "SPRT error level in (0, 1/2)");
  trace->add_option("--sequence", sequence, "Comma-separated bits, 0 = omega0, 1 = omega1");
  trace->add_option("--out", format, "csv | json");
  trace->add_option("--seed", seed, "Accepted for uniformity; the trace is deterministic");

  auto* verify = app.add_subcommand("verify", "Closed-form vs Born-rule and state-identity checks");
  verify->add_option("--grid", grid, "Number of theta grid points on [0,1]");
  verify->add_option("--tol", tol, "Absolute tolerance");
  verify->add_option("--seed", seed, "Accepted for uniformity; verification is deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const auto fmt = parse_format(format);
    if (sim->parsed()) {
      if (!seed) throw UsageError("simulate requires --seed");
      SimulateArgs args;
      args.game.protocol.theta = theta;
      args.game.protocol.include_ancilla = ancilla;
      args.game.protocol.include_fprime = fprime;
      args.game.epsilon = epsilon;
      args.game.policy = parse_policy(policy);
      args.game.prediction_mode = parse_mode(mode);
      args.game.oracle = parse_oracle(oracle);
      args.game.seed = *seed;
      args.game.max_rounds = max_rounds;
      args.game.forced_outcomes = parse_sequence(sequence);
      args.game.validate();
      args.report_path = report_path;
      args.out = fmt;
      return cmd_simulate(args, out, err);
    }
    if (sweep->parsed()) {
      SweepArgs args;
      args.from = from;
      args.to = to;
      args.step = step;
      if (!epsilons.empty()) args.epsilons = epsilons;
      for (const double e : args.epsilons) (void)SprtState::init(e);
      args.out = fmt;
      return cmd_sweep_theta(args, out, err);
    }
    if (trace->parsed()) {
      TraceArgs args;
      args.theta = theta;
      args.epsilon = epsilon;
      args.sequence = sequence;
      args.out = fmt;
      if (!(theta >= 0.0 && theta <= 1.0)) throw UsageError("theta must lie in [0,1]");
      (void)SprtState::init(epsilon);
      return cmd_sprt_trace(args, out, err);
    }
    VerifyArgs args;
    args.grid = grid;
    args.tol = tol;
    return cmd_verify(args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace bsg::cli
