#include <doctest.h>

#include <cmath>

#include "bsg/game.hpp"
#include "oracles.hpp"

using namespace bsg;

namespace {

GameConfig base(double theta, MeasurementPolicy policy, std::uint64_t seed = 42) {
  GameConfig g;
  g.protocol.theta = theta;
  g.policy = policy;
  g.seed = seed;
  return g;
}

// Frequency of outcome 0 over n rounds, drawn the way a session does.
double frequency0(const SessionTables& tables, Measurement m, OracleMode oracle, std::uint64_t seed, int n) {
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::for_round(seed, static_cast<std::uint64_t>(i));
    const auto collapse = friend_collapse(tables.measured(), rng);
    (void)rng.uniform();
    zeros += sample_outcome(tables, m, oracle, collapse.record, rng) == 0;
  }
  return static_cast<double>(zeros) / n;
}

}  // namespace

TEST_CASE("config validation") {
  GameConfig g;
  g.epsilon = 0.0;
  CHECK_THROWS(g.validate());
  g = GameConfig{};
  g.max_rounds = 0;
  CHECK_THROWS(g.validate());
  g = GameConfig{};
  g.forced_outcomes = {0, 2};
  CHECK_THROWS(g.validate());
  g = GameConfig{};
  g.protocol.theta = 2.0;
  CHECK_THROWS(GameSession(g));
}

TEST_CASE("theta 0 always M_W accepts Wigner at round 10 for any seed") {
  for (const std::uint64_t seed : {0ull, 1ull, 42ull, 123456789ull}) {
    const auto r = run_session(base(0.0, MeasurementPolicy::always_mw, seed));
    CHECK(r.decision() == Decision::accept_wigner);
    CHECK(r.referee_w.decided_round == 10u);
    for (const auto& round : r.rounds) CHECK(round.outcome == 0);
    CHECK(std::abs(r.rounds[0].llr_after - oracle::kLn2) < 1e-15);
  }
}

TEST_CASE("theta 0 always M_F accepts the friend at round 10") {
  const auto r = run_session(base(0.0, MeasurementPolicy::always_mf, 9));
  CHECK(r.decision() == Decision::accept_friend);
  CHECK(r.referee_f.decided_round == 10u);
  for (const auto& round : r.rounds) CHECK(round.outcome == static_cast<int>(round.friend_record));
}

TEST_CASE("replay of omega0 x4 then omega1 accepts the friend at round 5") {
  auto g = base(0.0, MeasurementPolicy::always_mw);
  g.forced_outcomes = {0, 0, 0, 0, 1};
  const auto r = run_session(g);
  CHECK(r.rounds.size() == 5);
  CHECK(r.decision() == Decision::accept_friend);
  CHECK(r.referee_w.decided_round == 5u);
}

TEST_CASE("theta 1 never decides") {
  auto g = base(1.0, MeasurementPolicy::always_mw);
  g.max_rounds = 200;
  const auto r = run_session(g);
  CHECK(r.rounds.size() == 200);
  CHECK(r.decision() == Decision::undecided);
  CHECK(std::abs(r.referee_w.sprt.log_likelihood()) < 1e-10);
}

TEST_CASE("random policy uses both referees") {
  const auto r = run_session(base(0.0, MeasurementPolicy::random_uniform, 5));
  CHECK(r.referee_w.sprt.decision() == Decision::accept_wigner);
  CHECK(r.referee_f.sprt.decision() == Decision::accept_friend);
  CHECK(r.decision() == Decision::undecided);
  CHECK(r.outcome_counts[0][0] + r.outcome_counts[0][1] + r.outcome_counts[1][0] + r.outcome_counts[1][1] ==
        r.rounds.size());
}

TEST_CASE("play_round refuses a finished session") {
  auto g = base(0.0, MeasurementPolicy::always_mw);
  g.max_rounds = 1;
  GameSession s(g);
  s.play_round();
  CHECK(s.finished());
  CHECK_THROWS_AS(s.play_round(), std::logic_error);
}

TEST_CASE("sample_outcome examples") {
  ProtocolConfig p;
  const SessionTables t(p, PredictionMode::as_published);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_outcome(t, Measurement::m_w, OracleMode::bubble_relative, std::nullopt, rng) == 0);
    CHECK(sample_outcome(t, Measurement::m_f, OracleMode::bubble_relative, Record::phi1, rng) == 1);
  }
  CHECK_THROWS(sample_outcome(t, Measurement::m_f, OracleMode::bubble_relative, std::nullopt, rng));

  const int n = 100000;
  const double f = frequency0(t, Measurement::m_f, OracleMode::wigner_global, 77, n);
  CHECK(std::abs(f - 0.5) <= 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("property: M_W frequency converges at theta 0.5") {
  ProtocolConfig p;
  p.theta = 0.5;
  const SessionTables t(p, PredictionMode::as_published);
  const int n = 100000;
  const double expected = (1 + std::cos(M_PI / 4)) / 2;
  const double f = frequency0(t, Measurement::m_w, OracleMode::bubble_relative, 2024, n);
  CHECK(std::abs(f - expected) <= 3.0 * std::sqrt(expected * (1 - expected) / n));
}

TEST_CASE("property: decision correctness for always M_W") {
  for (const double theta : {0.0, 0.25, 0.5}) {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      auto g = base(theta, MeasurementPolicy::always_mw, seed);
      g.epsilon = 0.01;
      wins += run_session(g).decision() == Decision::accept_wigner;
    }
    INFO("theta = " << theta);
    CHECK(wins >= 980);
  }
}

TEST_CASE("property: reports are deterministic") {
  for (const auto policy : {MeasurementPolicy::always_mf, MeasurementPolicy::always_mw,
                            MeasurementPolicy::random_uniform}) {
    auto g = base(0.37, policy, 99);
    g.prediction_mode = PredictionMode::state_derived;
    const auto a = run_session(g).to_json();
    const auto b = run_session(g).to_json();
    CHECK(a == b);
    g.seed = 100;
    CHECK(run_session(g).to_json() != a);
  }
}

TEST_CASE("ledger records one entry per round") {
  const auto r = run_session(base(0.3, MeasurementPolicy::random_uniform, 8));
  CHECK(r.ledger.size() == r.rounds.size());
  CHECK(verify_ledger(r.ledger, r.ledger.root()).ok);
  CHECK(r.to_json().find(r.ledger.root()) != std::string::npos);
}

TEST_CASE("inter-bubble messages carry no record") {
  for (const double theta : {0.0, 0.2, 0.8, 1.0}) {
    ProtocolConfig p;
    p.theta = theta;
    const SessionTables t(p, PredictionMode::as_published);
    for (const auto m : {Measurement::m_f, Measurement::m_w}) {
      const auto a = inter_bubble_messages(3, m, t.wigner(m), t.friend_(m, Record::phi0));
      const auto b = inter_bubble_messages(3, m, t.wigner(m), t.friend_(m, Record::phi1));
      CHECK(a == b);
      for (const auto& msg : a) CHECK(msg.find("record") == std::string::npos);
    }
  }
}

TEST_CASE("state-derived friend M_W messages depend on the record for theta > 0") {
  ProtocolConfig p;
  p.theta = 0.4;
  const SessionTables t(p, PredictionMode::state_derived);
  const auto m = Measurement::m_w;
  CHECK(inter_bubble_messages(0, m, t.wigner(m), t.friend_(m, Record::phi0)) !=
        inter_bubble_messages(0, m, t.wigner(m), t.friend_(m, Record::phi1)));
  p.theta = 0.0;
  const SessionTables t0(p, PredictionMode::state_derived);
  CHECK(inter_bubble_messages(0, m, t0.wigner(m), t0.friend_(m, Record::phi0)) ==
        inter_bubble_messages(0, m, t0.wigner(m), t0.friend_(m, Record::phi1)));
}
