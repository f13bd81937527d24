#pragma once

// Rounds, referees and sessions of the bubble switching game.
//
// Every round is prepared afresh: Psi0 -> friend's measurement -> collapse to a
// record, then a measurement is chosen, both players submit predictions (logged
// to the ledger), the outcome is drawn, and the referee of the bubble where the
// measurement happens updates its SPRT. Only the ledger and the two SPRT states
// persist across rounds.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsg/canonical_json.hpp"
#include "bsg/ledger.hpp"
#include "bsg/protocol.hpp"
#include "bsg/rng.hpp"
#include "bsg/sprt.hpp"

namespace bsg {

enum class MeasurementPolicy { always_mf, always_mw, random_uniform };
/// bubble_relative: M_W follows Wigner's Born rule, M_F confirms the friend's
/// record. wigner_global: both measurements follow Wigner's global state; a
/// counterfactual, not the game's canonical outcome model.
enum class OracleMode { bubble_relative, wigner_global };

std::string_view to_string(MeasurementPolicy p);
std::string_view to_string(OracleMode o);

struct GameConfig {
  ProtocolConfig protocol;
  double epsilon = 1e-3;
  MeasurementPolicy policy = MeasurementPolicy::random_uniform;
  PredictionMode prediction_mode = PredictionMode::as_published;
  OracleMode oracle = OracleMode::bubble_relative;
  std::uint64_t seed = 0;
  std::uint64_t max_rounds = 1000;
  /// Replay mode when non-empty: round i observes forced_outcomes[i] instead of
  /// a sampled outcome, and the session ends when the sequence does.
  std::vector<int> forced_outcomes;

  void validate() const;
};

/// Everything a session needs per (observer, measurement, record), computed
/// once from the protocol states.
class SessionTables {
 public:
  SessionTables(const ProtocolConfig& protocol, PredictionMode mode);

  const Prediction& wigner(Measurement m) const;
  const Prediction& friend_(Measurement m, Record record) const;
  /// Born probability of omega0 in Psi2^W.
  double wigner_mw_p0() const { return wigner_mw_p0_; }
  /// Born probability of phi0 on F' in Psi4^W.
  double wigner_mf_p0() const { return wigner_mf_p0_; }
  const ObserverAssignment& measured() const { return measured_; }

 private:
  ObserverAssignment measured_;
  std::array<Prediction, 2> wigner_;
  std::array<std::array<Prediction, 2>, 2> friend_predictions_;  // [measurement][record]
  double wigner_mw_p0_ = 0.0;
  double wigner_mf_p0_ = 0.0;
};

/// Draws the outcome (0/1) of `m`. Consumes exactly one uniform from `rng` in
/// every mode so round streams stay aligned.
int sample_outcome(const SessionTables& tables, Measurement m, OracleMode oracle, std::optional<Record> record,
                   Rng& rng);

struct RoundLog {
  std::uint64_t round_index = 0;
  Measurement measurement = Measurement::m_w;
  /// Private to the friend's bubble; never part of an inter-bubble message.
  Record friend_record = Record::phi0;
  Prediction wigner_prediction;
  Prediction friend_prediction;
  int outcome = 0;
  double llr_after = 0.0;
  Decision decision_after = Decision::undecided;
};

Json to_json(const Prediction& p);

/// Messages crossing a bubble boundary in one round: the measurement choice
/// and the prediction the out-of-bubble player hands to the responsible
/// referee (the friend's to R_W for M_W, Wigner's to R_F for M_F).
std::vector<std::string> inter_bubble_messages(std::uint64_t round_index, Measurement m, const Prediction& wigner,
                                               const Prediction& friend_prediction);
std::vector<std::string> inter_bubble_messages(const RoundLog& log);

struct RefereeSummary {
  SprtState sprt;
  /// 1-based round at which the referee decided.
  std::optional<std::uint64_t> decided_round;
};

struct SessionReport {
  GameConfig config;
  std::vector<RoundLog> rounds;
  RefereeSummary referee_w;
  RefereeSummary referee_f;
  Ledger ledger;
  /// [measurement][outcome] counts, measurement index 0 = M_F, 1 = M_W.
  std::array<std::array<std::uint64_t, 2>, 2> outcome_counts{};

  /// The active referee's decision for single-measurement policies; for the
  /// random policy, the shared decision if both referees agree, else undecided.
  Decision decision() const;
  /// Canonical JSON; identical configs give byte-identical output.
  std::string to_json() const;
};

class GameSession {
 public:
  explicit GameSession(GameConfig config);

  bool finished() const;
  const RoundLog& play_round();
  std::uint64_t rounds_played() const { return rounds_.size(); }
  const SprtState& referee(Measurement m) const { return m == Measurement::m_w ? referee_w_.sprt : referee_f_.sprt; }
  const Ledger& ledger() const { return ledger_; }
  const SessionTables& tables() const { return tables_; }
  SessionReport report() const;

 private:
  bool uses(Measurement m) const;

  GameConfig config_;
  SessionTables tables_;
  RefereeSummary referee_w_;
  RefereeSummary referee_f_;
  Ledger ledger_;
  std::vector<RoundLog> rounds_;
  std::array<std::array<std::uint64_t, 2>, 2> counts_{};
};

/// Plays rounds until every referee in use has decided, max_rounds is reached,
/// or a forced outcome sequence runs out.
SessionReport run_session(const GameConfig& config);

}  // namespace bsg
