#pragma once

// Dense state-vector engine for small registers of labeled qubits.
//
// Basis ordering is lexicographic in layout order: the first subsystem is the
// most significant digit, and index 0 of every subsystem is its "ready"/first
// preferred-basis state (up, phi0, omega0, R).

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bsg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kProbabilityTol = 1e-10;

class SubsystemLayout {
 public:
  struct Subsystem {
    std::string label;
    std::size_t dim = 2;
  };

  static constexpr std::size_t kMaxDimension = 64;

  explicit SubsystemLayout(std::vector<std::string> labels);
  explicit SubsystemLayout(std::vector<Subsystem> subsystems);

  std::size_t size() const { return subsystems_.size(); }
  std::size_t dimension() const { return dimension_; }
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::vector<std::string> labels() const;

  bool contains(const std::string& label) const;
  /// Position of `label` in the layout; throws std::invalid_argument if absent.
  std::size_t position(const std::string& label) const;
  /// Index stride of the subsystem at `position`.
  std::size_t stride(std::size_t position) const;

  /// Layout formed by appending `other` after this one.
  SubsystemLayout concat(const SubsystemLayout& other) const;

  bool operator==(const SubsystemLayout& other) const;

 private:
  std::vector<Subsystem> subsystems_;
  std::size_t dimension_ = 1;
};

class StateVector {
 public:
  /// Throws if the length does not match the layout, or if `normalized` is
  /// requested and the norm is off by more than kAlgebraTol.
  StateVector(SubsystemLayout layout, Vector amplitudes, bool normalized = false);

  const SubsystemLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::size_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }
  /// Amplitude of a product basis state given per-label indices.
  Complex amplitude(const std::map<std::string, std::size_t>& assignment) const;
  std::size_t dimension() const { return layout_.dimension(); }

  double norm() const { return amplitudes_.norm(); }
  /// True when built through a normalizing path (basis_state, superpose with
  /// normalize, unitary application to a normalized state, renormalized projection).
  bool is_normalized() const { return normalized_; }

  StateVector normalized() const;
  /// Euclidean distance between amplitude vectors; layouts must match.
  double distance(const StateVector& other) const;

 private:
  SubsystemLayout layout_;
  Vector amplitudes_;
  bool normalized_ = false;
};

enum class OperatorKind { general, unitary, projector };

class Operator {
 public:
  /// Validates shape, and the unitary / projector identities when flagged.
  Operator(std::vector<std::string> targets, Matrix matrix, OperatorKind kind = OperatorKind::general);

  static Operator identity(std::vector<std::string> targets);

  const std::vector<std::string>& targets() const { return targets_; }
  const Matrix& matrix() const { return matrix_; }
  OperatorKind kind() const { return kind_; }
  bool is_unitary() const { return kind_ == OperatorKind::unitary; }
  bool is_projector() const { return kind_ == OperatorKind::projector; }

 private:
  std::vector<std::string> targets_;
  Matrix matrix_;
  OperatorKind kind_;
};

struct OutcomeProjector {
  std::string label;
  Operator projector;
};

class MeasurementBasis {
 public:
  /// Projectors must share targets, be pairwise orthogonal and sum to identity.
  MeasurementBasis(std::string name, std::vector<OutcomeProjector> family);

  /// Projective measurement of a single qubit in its computational basis.
  static MeasurementBasis computational(std::string name, const std::string& target,
                                        std::string label0, std::string label1);

  const std::string& name() const { return name_; }
  const std::vector<OutcomeProjector>& family() const { return family_; }
  std::size_t size() const { return family_.size(); }

 private:
  std::string name_;
  std::vector<OutcomeProjector> family_;
};

struct OutcomeDistribution {
  std::vector<std::string> labels;
  std::vector<double> probabilities;

  double total() const;
  double of(const std::string& label) const;
};

struct ProjectionResult {
  double probability = 0.0;
  StateVector state;
};

/// Flat amplitude index of a product basis state.
std::size_t basis_index(const SubsystemLayout& layout, const std::map<std::string, std::size_t>& assignment);
StateVector basis_state(const SubsystemLayout& layout, const std::map<std::string, std::size_t>& assignment);

struct Term {
  Complex coefficient;
  StateVector state;
};

StateVector superpose(std::span<const Term> terms, bool normalize);
StateVector superpose(std::initializer_list<Term> terms, bool normalize);

/// Tensor product `a ⊗ b` over the concatenated layout.
StateVector tensor(const StateVector& a, const StateVector& b);

/// Embeds `op` on its targets (identity elsewhere) and applies it.
StateVector apply(const Operator& op, const StateVector& state);
/// Full-space matrix of `op` embedded into `layout`.
Matrix embed(const Operator& op, const SubsystemLayout& layout);

Complex inner_product(const StateVector& a, const StateVector& b);

OutcomeDistribution born_probabilities(const StateVector& state, const MeasurementBasis& basis);

ProjectionResult project(const StateVector& state, const Operator& projector, bool renormalize);

enum class ComplementOrder { ascending, descending };

struct StatePair {
  StateVector input;
  StateVector output;
};

/// Extends an isometry given on orthonormal inputs to a unitary on the whole
/// layout. The orthogonal complements of the input and output spans are built
/// by Gram-Schmidt over computational basis vectors in `order`, and the i-th
/// input-complement vector is mapped to the i-th output-complement vector.
Operator complete_to_unitary(std::span<const StatePair> pairs, ComplementOrder order = ComplementOrder::ascending);

/// Max entrywise |M^dagger M - I|.
double unitarity_defect(const Matrix& m);

}  // namespace bsg
