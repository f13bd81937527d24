#include "bsg/protocol.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace bsg {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

double half_angle(double theta) { return std::numbers::pi * theta / 2.0; }

void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0,1]");
}

std::size_t index_of(Record r) { return static_cast<std::size_t>(r); }

const SubsystemLayout& sf_layout() {
  static const SubsystemLayout layout({label::kSystem, label::kFriend});
  return layout;
}

const SubsystemLayout& sfw_layout() {
  static const SubsystemLayout layout({label::kSystem, label::kFriend, label::kWigner});
  return layout;
}

Matrix cnot_matrix() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = 1.0;
  return m;
}

// Product basis state of the config layout with S and F set to `record` and
// every other register in its ready state.
StateVector collapsed_state(const ProtocolConfig& config, Record record) {
  const auto r = index_of(record);
  const auto layout = protocol_layout(config);
  std::map<std::string, std::size_t> assignment{{label::kSystem, r}, {label::kFriend, r}, {label::kWigner, 0}};
  if (layout.contains(label::kAncilla)) assignment[label::kAncilla] = 0;
  if (layout.contains(label::kFriendCopy)) assignment[label::kFriendCopy] = 0;
  return basis_state(layout, assignment);
}

StateVector with_friend_copy(const StateVector& state) {
  if (state.layout().contains(label::kFriendCopy)) return state;
  const SubsystemLayout copy_layout({label::kFriendCopy});
  return tensor(state, basis_state(copy_layout, {{label::kFriendCopy, 0}}));
}

Prediction make_prediction(Observer observer, Measurement m, PredictionMode mode, double theta, double p0, double p1) {
  Prediction p;
  p.observer = observer;
  p.measurement = m;
  p.mode = mode;
  p.theta = theta;
  p.probabilities = {p0, p1};
  return p;
}

Prediction from_distribution(Observer observer, Measurement m, double theta, const OutcomeDistribution& d) {
  return make_prediction(observer, m, PredictionMode::state_derived, theta, d.probabilities.at(0),
                         d.probabilities.at(1));
}

StateVector before_wigner_measurement(const ObserverAssignment& interacted, const ProtocolConfig& config) {
  return config.include_ancilla ? swap_memory(interacted).state() : interacted.state();
}

}  // namespace

std::string_view to_string(Observer o) { return o == Observer::wigner ? "wigner" : "friend"; }
std::string_view to_string(Measurement m) { return m == Measurement::m_f ? "M_F" : "M_W"; }
std::string_view to_string(PredictionMode m) {
  return m == PredictionMode::as_published ? "as-published" : "state-derived";
}
std::string_view to_string(Record r) { return r == Record::phi0 ? "phi0" : "phi1"; }

std::string_view outcome_label(Measurement m, int outcome) {
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("outcome index must be 0 or 1");
  if (m == Measurement::m_f) return outcome == 0 ? "phi0" : "phi1";
  return outcome == 0 ? "omega0" : "omega1";
}

void ProtocolConfig::validate() const {
  require_theta(theta);
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kAlgebraTol) {
    throw std::invalid_argument("initial qubit amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
  }
  if (swap_before_mf && !include_ancilla) throw std::invalid_argument("swap_before_mf requires include_ancilla");
}

ObserverAssignment::ObserverAssignment(Observer observer, std::optional<Record> friend_record, StateVector state,
                                       Stage stage)
    : observer_(observer), friend_record_(friend_record), state_(std::move(state)), stage_(stage) {
  if (observer_ == Observer::wigner && friend_record_) {
    throw std::invalid_argument("Wigner's assignment cannot carry the friend's record");
  }
  if (observer_ == Observer::friend_ && stage_ != Stage::psi0 && !friend_record_) {
    throw std::invalid_argument("friend's assignment after her measurement needs a record");
  }
}

SubsystemLayout protocol_layout(const ProtocolConfig& config) {
  std::vector<std::string> labels{label::kSystem, label::kFriend, label::kWigner};
  if (config.include_ancilla) labels.push_back(label::kAncilla);
  if (config.include_fprime) labels.push_back(label::kFriendCopy);
  return SubsystemLayout(std::move(labels));
}

StateVector initial_state(const ProtocolConfig& config) {
  config.validate();
  const auto layout = protocol_layout(config);
  std::map<std::string, std::size_t> up{{label::kSystem, 0}, {label::kFriend, 0}, {label::kWigner, 0}};
  if (config.include_ancilla) up[label::kAncilla] = 0;
  if (config.include_fprime) up[label::kFriendCopy] = 0;
  auto down = up;
  down[label::kSystem] = 1;
  return superpose({{config.alpha, basis_state(layout, up)}, {config.beta, basis_state(layout, down)}}, true);
}

Operator measurement_unitary() {
  return Operator({label::kSystem, label::kFriend}, cnot_matrix(), OperatorKind::unitary);
}

Operator repeat_measurement_unitary() {
  return Operator({label::kSystem, label::kFriendCopy}, cnot_matrix(), OperatorKind::unitary);
}

Operator swap_unitary() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 2) = 1.0;
  m(2, 1) = 1.0;
  m(3, 3) = 1.0;
  return Operator({label::kAncilla, label::kFriend}, m, OperatorKind::unitary);
}

ObserverAssignment wigner_state_after_measurement(const ProtocolConfig& config) {
  return {Observer::wigner, std::nullopt, apply(measurement_unitary(), initial_state(config)), Stage::psi1};
}

CollapseResult friend_collapse_to(const ObserverAssignment& measured, Record record) {
  if (measured.stage() != Stage::psi1) throw std::invalid_argument("friend_collapse: state must be at stage Psi1");
  const auto basis = MeasurementBasis::computational("friend record", label::kFriend, "phi0", "phi1");
  auto result = project(measured.state(), basis.family()[index_of(record)].projector, true);
  return {record, result.probability,
          ObserverAssignment(Observer::friend_, record, std::move(result.state), Stage::psi1)};
}

CollapseResult friend_collapse(const ObserverAssignment& measured, Rng& rng) {
  if (measured.stage() != Stage::psi1) throw std::invalid_argument("friend_collapse: state must be at stage Psi1");
  const auto basis = MeasurementBasis::computational("friend record", label::kFriend, "phi0", "phi1");
  const double p0 = born_probabilities(measured.state(), basis).probabilities[0];
  const auto record = rng.binary(p0) == 0 ? Record::phi0 : Record::phi1;
  return friend_collapse_to(measured, record);
}

StateVector leaky_bell_phi(double theta, int sign) {
  require_theta(theta);
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const double s = std::sin(half_angle(theta));
  const double c = std::cos(half_angle(theta));
  Vector amps = Vector::Zero(4);
  amps(0) = kInvSqrt2 * (1.0 + sign * s);  // |up phi0>
  amps(3) = kInvSqrt2 * sign * c;          // |down phi1>
  return StateVector(sf_layout(), std::move(amps));
}

StateVector leaky_bell_varphi(double theta, int sign) {
  require_theta(theta);
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const double s = std::sin(half_angle(theta));
  const double c = std::cos(half_angle(theta));
  Vector amps = Vector::Zero(4);
  amps(0) = kInvSqrt2 * c;
  amps(3) = kInvSqrt2 * sign * (1.0 - sign * s);
  return StateVector(sf_layout(), std::move(amps));
}

std::array<StatePair, 2> interaction_pairs(double theta) {
  const SubsystemLayout w_layout({label::kWigner});
  const auto omega0 = basis_state(w_layout, {{label::kWigner, 0}});
  const auto omega1 = basis_state(w_layout, {{label::kWigner, 1}});

  const auto up_in = basis_state(sfw_layout(), {{label::kSystem, 0}, {label::kFriend, 0}, {label::kWigner, 0}});
  const auto down_in = basis_state(sfw_layout(), {{label::kSystem, 1}, {label::kFriend, 1}, {label::kWigner, 0}});

  const auto up_out = superpose(
      {{kInvSqrt2, tensor(leaky_bell_phi(theta, +1), omega0)}, {kInvSqrt2, tensor(leaky_bell_phi(theta, -1), omega1)}},
      false);
  const auto down_out = superpose({{kInvSqrt2, tensor(leaky_bell_varphi(theta, +1), omega0)},
                                   {-kInvSqrt2, tensor(leaky_bell_varphi(theta, -1), omega1)}},
                                  false);
  return {StatePair{up_in, up_out}, StatePair{down_in, down_out}};
}

Operator interaction_unitary(double theta, ComplementOrder order) {
  const auto pairs = interaction_pairs(theta);
  return complete_to_unitary(pairs, order);
}

ObserverAssignment wigner_state_after_interaction(const ProtocolConfig& config, ComplementOrder order) {
  const auto measured = wigner_state_after_measurement(config);
  return {Observer::wigner, std::nullopt, apply(interaction_unitary(config.theta, order), measured.state()),
          Stage::psi2};
}

ObserverAssignment friend_state_after_interaction(const ProtocolConfig& config, Record record,
                                                  ComplementOrder order) {
  config.validate();
  return {Observer::friend_, record, apply(interaction_unitary(config.theta, order), collapsed_state(config, record)),
          Stage::psi2};
}

ObserverAssignment swap_memory(const ObserverAssignment& interacted) {
  if (interacted.stage() != Stage::psi2) throw std::invalid_argument("swap_memory: state must be at stage Psi2");
  if (!interacted.state().layout().contains(label::kAncilla)) {
    throw std::invalid_argument("swap_memory: layout has no ancilla register");
  }
  return {interacted.observer(), interacted.friend_record(), apply(swap_unitary(), interacted.state()), Stage::psi3};
}

ObserverAssignment wigner_state_after_repeat(const ProtocolConfig& config, ComplementOrder order) {
  auto current = wigner_state_after_interaction(config, order);
  if (config.swap_before_mf) current = swap_memory(current);
  return {Observer::wigner, std::nullopt, apply(repeat_measurement_unitary(), with_friend_copy(current.state())),
          Stage::psi4};
}

ObserverAssignment friend_state_after_repeat(const ProtocolConfig& config, Record record) {
  config.validate();
  return {Observer::friend_, record,
          apply(repeat_measurement_unitary(), with_friend_copy(collapsed_state(config, record))), Stage::psi4};
}

ObserverAssignment friend_state_after_repeat_unitary(const ProtocolConfig& config, Record record,
                                                     ComplementOrder order) {
  auto current = friend_state_after_interaction(config, record, order);
  if (config.swap_before_mf) current = swap_memory(current);
  return {Observer::friend_, record, apply(repeat_measurement_unitary(), with_friend_copy(current.state())),
          Stage::psi4};
}

MeasurementBasis friend_repeat_basis() {
  return MeasurementBasis::computational("M_F", label::kFriendCopy, "phi0", "phi1");
}

MeasurementBasis wigner_basis() { return MeasurementBasis::computational("M_W", label::kWigner, "omega0", "omega1"); }

Prediction predict(const ProtocolConfig& config, Observer observer, Measurement measurement, PredictionMode mode,
                   std::optional<Record> record) {
  config.validate();
  if (observer == Observer::friend_ && !record) throw std::invalid_argument("predict: the friend needs her record");
  if (observer == Observer::wigner && record) throw std::invalid_argument("predict: Wigner has no record");

  const double theta = config.theta;
  if (mode == PredictionMode::as_published) {
    const double s = std::sin(half_angle(theta));
    const double c = std::cos(half_angle(theta));
    if (observer == Observer::wigner) {
      if (measurement == Measurement::m_w) return make_prediction(observer, measurement, mode, theta, (1 + c) / 2, (1 - c) / 2);
      return make_prediction(observer, measurement, mode, theta, (1 + s * c) / 2, (1 - s * c) / 2);
    }
    if (measurement == Measurement::m_w) return make_prediction(observer, measurement, mode, theta, 0.5, 0.5);
    return *record == Record::phi0 ? make_prediction(observer, measurement, mode, theta, 1.0, 0.0)
                                   : make_prediction(observer, measurement, mode, theta, 0.0, 1.0);
  }

  if (measurement == Measurement::m_w) {
    const auto interacted = observer == Observer::wigner ? wigner_state_after_interaction(config)
                                                         : friend_state_after_interaction(config, *record);
    return from_distribution(observer, measurement, theta,
                             born_probabilities(before_wigner_measurement(interacted, config), wigner_basis()));
  }
  const auto repeated = observer == Observer::wigner ? wigner_state_after_repeat(config)
                                                     : friend_state_after_repeat_unitary(config, *record);
  return from_distribution(observer, measurement, theta, born_probabilities(repeated.state(), friend_repeat_basis()));
}

ClosedFormReport verify_closed_forms(std::span<const double> grid, double tolerance) {
  ClosedFormReport report;
  report.tolerance = tolerance;
  report.passed = true;
  const ProtocolConfig base;
  for (const double theta : grid) {
    ProtocolConfig config = base;
    config.theta = theta;
    ClosedFormCheck check;
    check.theta = theta;
    for (const auto m : {Measurement::m_w, Measurement::m_f}) {
      const auto published = predict(config, Observer::wigner, m, PredictionMode::as_published);
      const auto derived = predict(config, Observer::wigner, m, PredictionMode::state_derived);
      const double dev = std::max(std::abs(published.of(0) - derived.of(0)), std::abs(published.of(1) - derived.of(1)));
      (m == Measurement::m_w ? check.mw_deviation : check.mf_deviation) = dev;
    }
    const double worst = std::max(check.mw_deviation, check.mf_deviation);
    report.max_deviation = std::max(report.max_deviation, worst);
    if (worst > tolerance) report.passed = false;
    report.entries.push_back(check);
  }
  return report;
}

std::vector<double> unit_grid(std::size_t points) {
  if (points == 0) throw std::invalid_argument("grid needs at least one point");
  if (points == 1) return {0.0};
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

}  // namespace bsg
