#include "bsg/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace bsg {

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += ",";
    out += l;
  }
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Index of each target in layout order, plus the strides used to enumerate the
// target sub-register. Target order inside the operator is the order given in
// op.targets(), first target most significant.
struct Embedding {
  std::vector<std::size_t> target_strides;
  std::size_t target_dim = 1;
};

Embedding make_embedding(const std::vector<std::string>& targets, const SubsystemLayout& layout) {
  Embedding e;
  std::set<std::string> seen;
  for (const auto& t : targets) {
    if (!seen.insert(t).second) throw std::invalid_argument("duplicate operator target: " + t);
    const auto pos = layout.position(t);
    e.target_strides.push_back(layout.stride(pos));
    e.target_dim *= layout.subsystems()[pos].dim;
  }
  return e;
}

// Splits a full index into (target sub-index, index with target digits zeroed).
std::pair<std::size_t, std::size_t> split_index(std::size_t full, const Embedding& e) {
  std::size_t sub = 0;
  std::size_t rest = full;
  for (const auto stride : e.target_strides) {
    const std::size_t digit = (full / stride) % 2;
    sub = sub * 2 + digit;
    rest -= digit * stride;
  }
  return {sub, rest};
}

std::size_t compose_index(std::size_t rest, std::size_t sub, const Embedding& e) {
  std::size_t full = rest;
  const std::size_t n = e.target_strides.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t digit = (sub >> (n - 1 - k)) & 1U;
    full += digit * e.target_strides[k];
  }
  return full;
}

void require_same_layout(const StateVector& a, const StateVector& b, const char* what) {
  if (!(a.layout() == b.layout())) throw std::invalid_argument(std::string(what) + ": layout mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::vector<std::string> labels)
    : SubsystemLayout([&] {
        std::vector<Subsystem> subs;
        subs.reserve(labels.size());
        for (auto& l : labels) subs.push_back({std::move(l), 2});
        return subs;
      }()) {}

SubsystemLayout::SubsystemLayout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
  if (subsystems_.empty()) throw std::invalid_argument("layout must contain at least one subsystem");
  std::set<std::string> seen;
  for (const auto& s : subsystems_) {
    if (s.label.empty()) throw std::invalid_argument("empty subsystem label");
    if (!seen.insert(s.label).second) throw std::invalid_argument("duplicate subsystem label: " + s.label);
    if (s.dim != 2) throw std::invalid_argument("subsystem " + s.label + " must be two-level");
    dimension_ *= s.dim;
    if (dimension_ > kMaxDimension) throw std::invalid_argument("layout dimension exceeds 64");
  }
}

std::vector<std::string> SubsystemLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(subsystems_.size());
  for (const auto& s : subsystems_) out.push_back(s.label);
  return out;
}

bool SubsystemLayout::contains(const std::string& label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(), [&](const auto& s) { return s.label == label; });
}

std::size_t SubsystemLayout::position(const std::string& label) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (subsystems_[i].label == label) return i;
  }
  throw std::invalid_argument("unknown subsystem label: " + label);
}

std::size_t SubsystemLayout::stride(std::size_t position) const {
  std::size_t s = 1;
  for (std::size_t i = position + 1; i < subsystems_.size(); ++i) s *= subsystems_[i].dim;
  return s;
}

SubsystemLayout SubsystemLayout::concat(const SubsystemLayout& other) const {
  auto subs = subsystems_;
  subs.insert(subs.end(), other.subsystems_.begin(), other.subsystems_.end());
  return SubsystemLayout(std::move(subs));
}

bool SubsystemLayout::operator==(const SubsystemLayout& other) const {
  if (subsystems_.size() != other.subsystems_.size()) return false;
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (subsystems_[i].label != other.subsystems_[i].label || subsystems_[i].dim != other.subsystems_[i].dim) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(SubsystemLayout layout, Vector amplitudes, bool normalized)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)), normalized_(normalized) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.dimension()) {
    throw std::invalid_argument("amplitude count does not match layout dimension");
  }
  if (normalized_ && std::abs(amplitudes_.norm() - 1.0) > kAlgebraTol) {
    throw std::invalid_argument("state flagged normalized has norm " + std::to_string(amplitudes_.norm()));
  }
}

Complex StateVector::amplitude(const std::map<std::string, std::size_t>& assignment) const {
  return amplitude(basis_index(layout_, assignment));
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n <= kAlgebraTol) throw std::domain_error("cannot normalize a zero vector");
  return StateVector(layout_, amplitudes_ / n, true);
}

double StateVector::distance(const StateVector& other) const {
  require_same_layout(*this, other, "distance");
  return (amplitudes_ - other.amplitudes_).norm();
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::vector<std::string> targets, Matrix matrix, OperatorKind kind)
    : targets_(std::move(targets)), matrix_(std::move(matrix)), kind_(kind) {
  if (targets_.empty()) throw std::invalid_argument("operator needs at least one target");
  if (std::set<std::string>(targets_.begin(), targets_.end()).size() != targets_.size()) {
    throw std::invalid_argument("duplicate operator target in {" + join_labels(targets_) + "}");
  }
  const auto expected = static_cast<Eigen::Index>(std::size_t{1} << targets_.size());
  if (matrix_.rows() != expected || matrix_.cols() != expected) {
    throw std::invalid_argument("operator matrix shape does not match targets {" + join_labels(targets_) + "}");
  }
  switch (kind_) {
    case OperatorKind::unitary:
      if (unitarity_defect(matrix_) > kAlgebraTol) throw std::invalid_argument("operator is not unitary");
      break;
    case OperatorKind::projector:
      if (max_abs(matrix_ * matrix_ - matrix_) > kAlgebraTol || max_abs(matrix_.adjoint() - matrix_) > kAlgebraTol) {
        throw std::invalid_argument("operator is not an orthogonal projector");
      }
      break;
    case OperatorKind::general:
      break;
  }
}

Operator Operator::identity(std::vector<std::string> targets) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << targets.size());
  return Operator(std::move(targets), Matrix::Identity(dim, dim), OperatorKind::unitary);
}

double unitarity_defect(const Matrix& m) {
  return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols()));
}

// ---------------------------------------------------------------------------
// MeasurementBasis

MeasurementBasis::MeasurementBasis(std::string name, std::vector<OutcomeProjector> family)
    : name_(std::move(name)), family_(std::move(family)) {
  if (family_.empty()) throw std::invalid_argument("measurement basis " + name_ + " is empty");
  const auto& targets = family_.front().projector.targets();
  const auto dim = family_.front().projector.matrix().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  std::set<std::string> labels;
  for (std::size_t i = 0; i < family_.size(); ++i) {
    const auto& p = family_[i].projector;
    if (!p.is_projector()) throw std::invalid_argument("basis " + name_ + ": outcome " + family_[i].label + " is not a projector");
    if (p.targets() != targets) throw std::invalid_argument("basis " + name_ + ": projectors act on different targets");
    if (!labels.insert(family_[i].label).second) throw std::invalid_argument("basis " + name_ + ": duplicate outcome label");
    for (std::size_t j = 0; j < i; ++j) {
      if (max_abs(p.matrix() * family_[j].projector.matrix()) > kAlgebraTol) {
        throw std::invalid_argument("basis " + name_ + ": projectors are not orthogonal");
      }
    }
    sum += p.matrix();
  }
  if (max_abs(sum - Matrix::Identity(dim, dim)) > kAlgebraTol) {
    throw std::invalid_argument("basis " + name_ + " is incomplete");
  }
}

MeasurementBasis MeasurementBasis::computational(std::string name, const std::string& target, std::string label0,
                                                 std::string label1) {
  Matrix p0 = Matrix::Zero(2, 2);
  Matrix p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return MeasurementBasis(std::move(name), {{std::move(label0), Operator({target}, p0, OperatorKind::projector)},
                                            {std::move(label1), Operator({target}, p1, OperatorKind::projector)}});
}

double OutcomeDistribution::total() const { return std::accumulate(probabilities.begin(), probabilities.end(), 0.0); }

double OutcomeDistribution::of(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return probabilities[i];
  }
  throw std::invalid_argument("unknown outcome label: " + label);
}

// ---------------------------------------------------------------------------
// Operations

std::size_t basis_index(const SubsystemLayout& layout, const std::map<std::string, std::size_t>& assignment) {
  for (const auto& [label, _] : assignment) {
    if (!layout.contains(label)) throw std::invalid_argument("basis index: unknown label " + label);
  }
  std::size_t index = 0;
  for (std::size_t pos = 0; pos < layout.size(); ++pos) {
    const auto& sub = layout.subsystems()[pos];
    const auto it = assignment.find(sub.label);
    if (it == assignment.end()) throw std::invalid_argument("basis index: no index given for " + sub.label);
    if (it->second >= sub.dim) throw std::out_of_range("basis index: index out of range for " + sub.label);
    index += it->second * layout.stride(pos);
  }
  return index;
}

StateVector basis_state(const SubsystemLayout& layout, const std::map<std::string, std::size_t>& assignment) {
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.dimension()));
  amps(static_cast<Eigen::Index>(basis_index(layout, assignment))) = 1.0;
  return StateVector(layout, std::move(amps), true);
}

StateVector superpose(std::span<const Term> terms, bool normalize) {
  if (terms.empty()) throw std::invalid_argument("superpose: no terms");
  const auto& layout = terms.front().state.layout();
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(layout.dimension()));
  for (const auto& t : terms) {
    if (!(t.state.layout() == layout)) throw std::invalid_argument("superpose: layout mismatch");
    acc += t.coefficient * t.state.amplitudes();
  }
  StateVector out(layout, std::move(acc));
  return normalize ? out.normalized() : out;
}

StateVector superpose(std::initializer_list<Term> terms, bool normalize) {
  return superpose(std::span<const Term>(terms.begin(), terms.size()), normalize);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  const auto nb = b.amplitudes().size();
  Vector amps(a.amplitudes().size() * nb);
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
    amps.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  }
  const bool normalized = a.is_normalized() && b.is_normalized() && std::abs(amps.norm() - 1.0) <= kAlgebraTol;
  return StateVector(a.layout().concat(b.layout()), std::move(amps), normalized);
}

Matrix embed(const Operator& op, const SubsystemLayout& layout) {
  const auto e = make_embedding(op.targets(), layout);
  const auto n = layout.dimension();
  Matrix full = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t col = 0; col < n; ++col) {
    const auto [sub_col, rest] = split_index(col, e);
    for (std::size_t sub_row = 0; sub_row < e.target_dim; ++sub_row) {
      const auto row = compose_index(rest, sub_row, e);
      full(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          op.matrix()(static_cast<Eigen::Index>(sub_row), static_cast<Eigen::Index>(sub_col));
    }
  }
  return full;
}

StateVector apply(const Operator& op, const StateVector& state) {
  const auto e = make_embedding(op.targets(), state.layout());
  const auto n = state.dimension();
  const auto& in = state.amplitudes();
  const auto& m = op.matrix();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t row = 0; row < n; ++row) {
    const auto [sub_row, rest] = split_index(row, e);
    Complex acc = 0.0;
    for (std::size_t sub_col = 0; sub_col < e.target_dim; ++sub_col) {
      acc += m(static_cast<Eigen::Index>(sub_row), static_cast<Eigen::Index>(sub_col)) *
             in(static_cast<Eigen::Index>(compose_index(rest, sub_col, e)));
    }
    out(static_cast<Eigen::Index>(row)) = acc;
  }
  const bool normalized = op.is_unitary() && state.is_normalized() && std::abs(out.norm() - 1.0) <= kAlgebraTol;
  return StateVector(state.layout(), std::move(out), normalized);
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  require_same_layout(a, b, "inner_product");
  return a.amplitudes().dot(b.amplitudes());  // Eigen's dot conjugates the left operand
}

OutcomeDistribution born_probabilities(const StateVector& state, const MeasurementBasis& basis) {
  if (std::abs(state.norm() - 1.0) > kProbabilityTol) {
    throw std::invalid_argument("born_probabilities: state is not normalized");
  }
  OutcomeDistribution dist;
  for (const auto& outcome : basis.family()) {
    const auto projected = apply(outcome.projector, state);
    dist.labels.push_back(outcome.label);
    dist.probabilities.push_back(std::clamp(inner_product(state, projected).real(), 0.0, 1.0));
  }
  return dist;
}

ProjectionResult project(const StateVector& state, const Operator& projector, bool renormalize) {
  if (!projector.is_projector()) throw std::invalid_argument("project: operator is not flagged as a projector");
  auto projected = apply(projector, state);
  const double p = std::clamp(projected.amplitudes().squaredNorm(), 0.0, 1.0);
  if (!renormalize) return {p, std::move(projected)};
  if (p <= kAlgebraTol) throw std::domain_error("project: cannot renormalize a zero-probability branch");
  return {p, projected.normalized()};
}

namespace {

// Orthonormal completion of span(basis) using computational vectors in `order`.
// A candidate is kept once its residual norm exceeds 1/sqrt(2n); the residual
// mass of the candidates always sums to the missing dimension, so one pass
// cannot run out of candidates under that bound.
std::vector<Vector> complement_basis(const std::vector<Vector>& basis, std::size_t n, ComplementOrder order) {
  std::vector<Vector> found;
  const double keep = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  auto remove_span = [](Vector& v, const std::vector<Vector>& vs) {
    for (const auto& u : vs) v -= u * u.dot(v);
  };
  for (std::size_t k = 0; k < n && basis.size() + found.size() < n; ++k) {
    const std::size_t idx = order == ComplementOrder::ascending ? k : n - 1 - k;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(idx)) = 1.0;
    // Project out the given span as a whole, then the accepted complement;
    // twice, for numerical orthogonality.
    for (int pass = 0; pass < 2; ++pass) {
      remove_span(v, basis);
      remove_span(v, found);
    }
    const double r = v.norm();
    if (r > keep) found.push_back(v / r);
  }
  if (basis.size() + found.size() != n) throw std::logic_error("complement_basis: failed to span the space");
  return found;
}

void require_orthonormal(const std::vector<Vector>& vs, const char* what) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const Complex g = vs[i].dot(vs[j]);
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(g - expected) > kProbabilityTol) {
        throw std::invalid_argument(std::string("complete_to_unitary: ") + what + " are not orthonormal");
      }
    }
  }
}

}  // namespace

Operator complete_to_unitary(std::span<const StatePair> pairs, ComplementOrder order) {
  if (pairs.empty()) throw std::invalid_argument("complete_to_unitary: no defining pairs");
  const auto& layout = pairs.front().input.layout();
  const auto n = layout.dimension();
  std::vector<Vector> inputs;
  std::vector<Vector> outputs;
  for (const auto& p : pairs) {
    if (!(p.input.layout() == layout) || !(p.output.layout() == layout)) {
      throw std::invalid_argument("complete_to_unitary: layout mismatch");
    }
    inputs.push_back(p.input.amplitudes());
    outputs.push_back(p.output.amplitudes());
  }
  require_orthonormal(inputs, "inputs");
  require_orthonormal(outputs, "outputs");

  const auto in_complement = complement_basis(inputs, n, order);
  const auto out_complement = complement_basis(outputs, n, order);

  const auto dim = static_cast<Eigen::Index>(n);
  Matrix u = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < inputs.size(); ++i) u += outputs[i] * inputs[i].adjoint();
  for (std::size_t i = 0; i < in_complement.size(); ++i) u += out_complement[i] * in_complement[i].adjoint();
  return Operator(layout.labels(), std::move(u), OperatorKind::unitary);
}

}  // namespace bsg
