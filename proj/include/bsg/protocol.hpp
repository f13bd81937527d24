#pragma once

// States, unitaries and predictions of the bubble switching game.
//
// Subsystems: S (measured qubit), F (friend's lab record), W (Wigner's lab),
// optionally A (ancilla memory receiving F under SWAP) and F' (register
// storing the friend's repeated measurement). Layout order is S, F, W, A, F'.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsg/qstate.hpp"
#include "bsg/rng.hpp"

namespace bsg {

namespace label {
inline const std::string kSystem = "S";
inline const std::string kFriend = "F";
inline const std::string kWigner = "W";
inline const std::string kAncilla = "A";
inline const std::string kFriendCopy = "F'";
}  // namespace label

enum class Observer { wigner, friend_ };
enum class Measurement { m_f, m_w };
enum class PredictionMode { as_published, state_derived };
/// The friend's record after her first measurement.
enum class Record : std::uint8_t { phi0 = 0, phi1 = 1 };
/// Psi0 .. Psi4 in the protocol's narrative order.
enum class Stage { psi0 = 0, psi1, psi2, psi3, psi4 };

std::string_view to_string(Observer o);
std::string_view to_string(Measurement m);
std::string_view to_string(PredictionMode m);
std::string_view to_string(Record r);
std::string_view outcome_label(Measurement m, int outcome);

struct ProtocolConfig {
  double theta = 0.0;
  Complex alpha{M_SQRT1_2, 0.0};
  Complex beta{M_SQRT1_2, 0.0};
  /// Adds ancilla A and swaps the friend's memory into it before M_W.
  bool include_ancilla = false;
  /// Carries F' in every state instead of adding it only for the repeat.
  bool include_fprime = false;
  /// Also apply the SWAP before M_F (requires include_ancilla).
  bool swap_before_mf = false;

  /// Throws std::invalid_argument on theta outside [0,1] or non-unit (alpha, beta).
  void validate() const;
};

class ObserverAssignment {
 public:
  ObserverAssignment(Observer observer, std::optional<Record> friend_record, StateVector state, Stage stage);

  Observer observer() const { return observer_; }
  const std::optional<Record>& friend_record() const { return friend_record_; }
  const StateVector& state() const { return state_; }
  Stage stage() const { return stage_; }

 private:
  Observer observer_;
  std::optional<Record> friend_record_;
  StateVector state_;
  Stage stage_;
};

struct Prediction {
  Observer observer = Observer::wigner;
  Measurement measurement = Measurement::m_w;
  PredictionMode mode = PredictionMode::as_published;
  double theta = 0.0;
  /// Indexed by outcome: 0 = phi0 / omega0, 1 = phi1 / omega1.
  std::array<double, 2> probabilities{};

  double of(int outcome) const { return probabilities.at(static_cast<std::size_t>(outcome)); }
  std::string_view label(int outcome) const { return outcome_label(measurement, outcome); }
};

SubsystemLayout protocol_layout(const ProtocolConfig& config);

/// Psi0 = (alpha|up> + beta|down>)|phi0>|omega0> (|R>_A, |phi0>_F' per flags).
StateVector initial_state(const ProtocolConfig& config);

/// Controlled-NOT from S onto F.
Operator measurement_unitary();
/// Controlled-NOT from S onto F'.
Operator repeat_measurement_unitary();
/// Exchange of A and F.
Operator swap_unitary();

ObserverAssignment wigner_state_after_measurement(const ProtocolConfig& config);

struct CollapseResult {
  Record record;
  double probability;
  ObserverAssignment assignment;
};

/// Projects Psi1 (Wigner's description) onto the friend's record chosen by a
/// single uniform draw from `rng`.
CollapseResult friend_collapse(const ObserverAssignment& measured, Rng& rng);
/// Deterministic branch of friend_collapse.
CollapseResult friend_collapse_to(const ObserverAssignment& measured, Record record);

/// Unnormalized Phi_theta^{+/-} on (S,F); sign is +1 or -1.
StateVector leaky_bell_phi(double theta, int sign);
/// Unnormalized varphi_theta^{+/-} on (S,F).
StateVector leaky_bell_varphi(double theta, int sign);

/// The two defining input/output pairs of the interface unitary on (S,F,W):
/// |up phi0 omega0> and |down phi1 omega0>.
std::array<StatePair, 2> interaction_pairs(double theta);

Operator interaction_unitary(double theta, ComplementOrder order = ComplementOrder::ascending);

ObserverAssignment wigner_state_after_interaction(const ProtocolConfig& config,
                                                  ComplementOrder order = ComplementOrder::ascending);
ObserverAssignment friend_state_after_interaction(const ProtocolConfig& config, Record record,
                                                  ComplementOrder order = ComplementOrder::ascending);

/// Moves F into the ready ancilla A, leaving F in |R>. Requires stage Psi2.
ObserverAssignment swap_memory(const ObserverAssignment& interacted);

/// Psi4 from Wigner's side: CNOT(S -> F') applied to Psi2 (or Psi3 with swap_before_mf).
ObserverAssignment wigner_state_after_repeat(const ProtocolConfig& config,
                                             ComplementOrder order = ComplementOrder::ascending);
/// Psi4 from the friend's side: repeat applied to her collapsed (pre-interface) state.
ObserverAssignment friend_state_after_repeat(const ProtocolConfig& config, Record record);
/// Repeat applied to the friend's post-interface state Psi2^F; differs from the
/// collapsed route for theta < 1.
ObserverAssignment friend_state_after_repeat_unitary(const ProtocolConfig& config, Record record,
                                                     ComplementOrder order = ComplementOrder::ascending);

/// z-basis on F' (outcomes phi0, phi1).
MeasurementBasis friend_repeat_basis();
/// Preferred basis of W (outcomes omega0, omega1).
MeasurementBasis wigner_basis();

/// Observer's outcome probabilities for a measurement. `record` is required for
/// the friend and must be absent for Wigner.
Prediction predict(const ProtocolConfig& config, Observer observer, Measurement measurement, PredictionMode mode,
                   std::optional<Record> record = std::nullopt);

struct ClosedFormCheck {
  double theta = 0.0;
  double mw_deviation = 0.0;
  double mf_deviation = 0.0;
};

struct ClosedFormReport {
  std::vector<ClosedFormCheck> entries;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  bool passed = false;
};

/// Compares Wigner's published M_W / M_F formulas with Born probabilities of the
/// constructed states at every grid point.
ClosedFormReport verify_closed_forms(std::span<const double> grid, double tolerance);

/// `points` equally spaced values covering [0,1] (points >= 2), or {0} for 1.
std::vector<double> unit_grid(std::size_t points);

}  // namespace bsg
