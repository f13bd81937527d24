#include "bsg/game.hpp"

#include <stdexcept>

namespace bsg {

namespace {

std::size_t index_of(Measurement m) { return m == Measurement::m_w ? 1 : 0; }
std::size_t index_of(Record r) { return static_cast<std::size_t>(r); }

Json referee_json(const RefereeSummary& r) {
  Json j;
  j["llr"] = r.sprt.log_likelihood();
  j["n0"] = r.sprt.n0();
  j["n1"] = r.sprt.n1();
  j["upper"] = r.sprt.upper();
  j["lower"] = r.sprt.lower();
  j["decision"] = to_string(r.sprt.decision());
  j["decided_round"] = r.decided_round ? Json(*r.decided_round) : Json(nullptr);
  return j;
}

Json config_json(const GameConfig& c) {
  Json j;
  j["theta"] = c.protocol.theta;
  j["alpha"] = Json::array({c.protocol.alpha.real(), c.protocol.alpha.imag()});
  j["beta"] = Json::array({c.protocol.beta.real(), c.protocol.beta.imag()});
  j["include_ancilla"] = c.protocol.include_ancilla;
  j["include_fprime"] = c.protocol.include_fprime;
  j["swap_before_mf"] = c.protocol.swap_before_mf;
  j["epsilon"] = c.epsilon;
  j["policy"] = to_string(c.policy);
  j["mode"] = to_string(c.prediction_mode);
  j["oracle"] = to_string(c.oracle);
  j["seed"] = c.seed;
  j["max_rounds"] = c.max_rounds;
  j["forced_outcomes"] = c.forced_outcomes;
  return j;
}

}  // namespace

std::string_view to_string(MeasurementPolicy p) {
  switch (p) {
    case MeasurementPolicy::always_mf:
      return "always-mf";
    case MeasurementPolicy::always_mw:
      return "always-mw";
    case MeasurementPolicy::random_uniform:
      break;
  }
  return "random";
}

std::string_view to_string(OracleMode o) {
  return o == OracleMode::bubble_relative ? "bubble-relative" : "wigner-global";
}

void GameConfig::validate() const {
  protocol.validate();
  (void)SprtState::init(epsilon);
  if (max_rounds == 0) throw std::invalid_argument("max_rounds must be positive");
  for (const int o : forced_outcomes) {
    if (o != 0 && o != 1) throw std::invalid_argument("forced outcomes must be 0 or 1");
  }
}

// ---------------------------------------------------------------------------
// SessionTables

SessionTables::SessionTables(const ProtocolConfig& protocol, PredictionMode mode)
    : measured_(wigner_state_after_measurement(protocol)),
      wigner_{predict(protocol, Observer::wigner, Measurement::m_f, mode),
              predict(protocol, Observer::wigner, Measurement::m_w, mode)},
      friend_predictions_{{{predict(protocol, Observer::friend_, Measurement::m_f, mode, Record::phi0),
                predict(protocol, Observer::friend_, Measurement::m_f, mode, Record::phi1)},
               {predict(protocol, Observer::friend_, Measurement::m_w, mode, Record::phi0),
                predict(protocol, Observer::friend_, Measurement::m_w, mode, Record::phi1)}}} {
  wigner_mw_p0_ = predict(protocol, Observer::wigner, Measurement::m_w, PredictionMode::state_derived).of(0);
  wigner_mf_p0_ = predict(protocol, Observer::wigner, Measurement::m_f, PredictionMode::state_derived).of(0);
}

const Prediction& SessionTables::wigner(Measurement m) const { return wigner_[index_of(m)]; }

const Prediction& SessionTables::friend_(Measurement m, Record record) const {
  return friend_predictions_[index_of(m)][index_of(record)];
}

int sample_outcome(const SessionTables& tables, Measurement m, OracleMode oracle, std::optional<Record> record,
                   Rng& rng) {
  const double u = rng.uniform();
  if (m == Measurement::m_w) return u < tables.wigner_mw_p0() ? 0 : 1;
  if (oracle == OracleMode::wigner_global) return u < tables.wigner_mf_p0() ? 0 : 1;
  if (!record) throw std::invalid_argument("sample_outcome: bubble-relative M_F needs the friend's record");
  return static_cast<int>(index_of(*record));
}

// ---------------------------------------------------------------------------
// Messages

Json to_json(const Prediction& p) {
  Json j;
  j["observer"] = to_string(p.observer);
  j["measurement"] = to_string(p.measurement);
  j["mode"] = to_string(p.mode);
  j["theta"] = p.theta;
  Json probs;
  probs[std::string(p.label(0))] = p.of(0);
  probs[std::string(p.label(1))] = p.of(1);
  j["probabilities"] = std::move(probs);
  return j;
}

std::vector<std::string> inter_bubble_messages(std::uint64_t round_index, Measurement m, const Prediction& wigner,
                                               const Prediction& friend_prediction) {
  Json choice;
  choice["type"] = "measurement_choice";
  choice["round"] = round_index;
  choice["measurement"] = to_string(m);

  Json submission;
  submission["type"] = "prediction";
  submission["round"] = round_index;
  if (m == Measurement::m_w) {
    submission["from"] = "friend";
    submission["to"] = "R_W";
    submission["prediction"] = to_json(friend_prediction);
  } else {
    submission["from"] = "wigner";
    submission["to"] = "R_F";
    submission["prediction"] = to_json(wigner);
  }
  return {canonical_dump(choice), canonical_dump(submission)};
}

std::vector<std::string> inter_bubble_messages(const RoundLog& log) {
  return inter_bubble_messages(log.round_index, log.measurement, log.wigner_prediction, log.friend_prediction);
}

// ---------------------------------------------------------------------------
// Session

GameSession::GameSession(GameConfig config)
    : config_((config.validate(), std::move(config))),
      tables_(config_.protocol, config_.prediction_mode),
      referee_w_{SprtState::init(config_.epsilon), std::nullopt},
      referee_f_{SprtState::init(config_.epsilon), std::nullopt} {}

bool GameSession::uses(Measurement m) const {
  switch (config_.policy) {
    case MeasurementPolicy::always_mf:
      return m == Measurement::m_f;
    case MeasurementPolicy::always_mw:
      return m == Measurement::m_w;
    case MeasurementPolicy::random_uniform:
      break;
  }
  return true;
}

bool GameSession::finished() const {
  if (rounds_.size() >= config_.max_rounds) return true;
  if (!config_.forced_outcomes.empty() && rounds_.size() >= config_.forced_outcomes.size()) return true;
  const bool w_done = !uses(Measurement::m_w) || referee_w_.sprt.decided();
  const bool f_done = !uses(Measurement::m_f) || referee_f_.sprt.decided();
  return w_done && f_done;
}

const RoundLog& GameSession::play_round() {
  if (finished()) throw std::logic_error("play_round: session is finished");
  const std::uint64_t index = rounds_.size();
  Rng rng = Rng::for_round(config_.seed, index);

  // Rule 1: the friend's first measurement, freshly prepared each round.
  const auto collapse = friend_collapse(tables_.measured(), rng);
  const Record record = collapse.record;

  // Rule 2: the next measurement is chosen before anyone predicts.
  const double choice = rng.uniform();
  Measurement m = Measurement::m_w;
  switch (config_.policy) {
    case MeasurementPolicy::always_mf:
      m = Measurement::m_f;
      break;
    case MeasurementPolicy::always_mw:
      m = Measurement::m_w;
      break;
    case MeasurementPolicy::random_uniform:
      m = choice < 0.5 ? Measurement::m_f : Measurement::m_w;
      break;
  }

  // Rule 3: predictions are handed over and written down.
  RoundLog log;
  log.round_index = index;
  log.measurement = m;
  log.friend_record = record;
  log.wigner_prediction = tables_.wigner(m);
  log.friend_prediction = tables_.friend_(m, record);
  {
    Json entry;
    entry["round"] = index;
    entry["measurement"] = to_string(m);
    entry["wigner"] = to_json(log.wigner_prediction);
    entry["friend"] = to_json(log.friend_prediction);
    ledger_.append(canonical_dump(entry));
  }

  // Rule 4: the measurement.
  const int sampled = sample_outcome(tables_, m, config_.oracle, record, rng);
  log.outcome = config_.forced_outcomes.empty() ? sampled : config_.forced_outcomes[index];
  counts_[index_of(m)][static_cast<std::size_t>(log.outcome)] += 1;

  // Rule 5: the referee of that bubble scores it.
  auto& referee = m == Measurement::m_w ? referee_w_ : referee_f_;
  if (!referee.sprt.decided()) {
    referee.sprt = referee.sprt.update(log.outcome, log.wigner_prediction.of(log.outcome),
                                       log.friend_prediction.of(log.outcome));
    if (referee.sprt.decided()) referee.decided_round = index + 1;
  }
  log.llr_after = referee.sprt.log_likelihood();
  log.decision_after = referee.sprt.decision();

  rounds_.push_back(log);
  return rounds_.back();
}

SessionReport GameSession::report() const {
  return SessionReport{config_, rounds_, referee_w_, referee_f_, ledger_, counts_};
}

Decision SessionReport::decision() const {
  switch (config.policy) {
    case MeasurementPolicy::always_mw:
      return referee_w.sprt.decision();
    case MeasurementPolicy::always_mf:
      return referee_f.sprt.decision();
    case MeasurementPolicy::random_uniform:
      break;
  }
  return referee_w.sprt.decision() == referee_f.sprt.decision() ? referee_w.sprt.decision() : Decision::undecided;
}

std::string SessionReport::to_json() const {
  Json j;
  j["config"] = config_json(config);
  Json rounds_json = Json::array();
  for (const auto& r : rounds) {
    Json rj;
    rj["round"] = r.round_index;
    rj["measurement"] = to_string(r.measurement);
    rj["friend_record"] = to_string(r.friend_record);
    rj["wigner_prediction"] = bsg::to_json(r.wigner_prediction);
    rj["friend_prediction"] = bsg::to_json(r.friend_prediction);
    rj["outcome"] = outcome_label(r.measurement, r.outcome);
    rj["llr_after"] = r.llr_after;
    rj["decision_after"] = to_string(r.decision_after);
    rounds_json.push_back(std::move(rj));
  }
  j["rounds"] = std::move(rounds_json);
  j["rounds_played"] = rounds.size();
  j["decision"] = to_string(decision());
  j["referees"]["R_W"] = referee_json(referee_w);
  j["referees"]["R_F"] = referee_json(referee_f);
  j["frequencies"]["M_F"]["phi0"] = outcome_counts[0][0];
  j["frequencies"]["M_F"]["phi1"] = outcome_counts[0][1];
  j["frequencies"]["M_W"]["omega0"] = outcome_counts[1][0];
  j["frequencies"]["M_W"]["omega1"] = outcome_counts[1][1];
  Json entries = Json::array();
  for (const auto& e : ledger.entries()) entries.push_back(Json{{"payload", e.payload}, {"checksum", e.checksum}});
  j["ledger"]["entries"] = std::move(entries);
  j["ledger"]["root"] = ledger.root();
  return canonical_dump(j);
}

SessionReport run_session(const GameConfig& config) {
  GameSession session(config);
  while (!session.finished()) session.play_round();
  return session.report();
}

}  // namespace bsg
