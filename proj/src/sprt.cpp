#include "bsg/sprt.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
}

void require_probability(double p, const char* who) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(who) + " probability outside [0,1]");
}

}  // namespace

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::accept_wigner:
      return "accept_wigner";
    case Decision::accept_friend:
      return "accept_friend";
    case Decision::undecided:
      break;
  }
  return "continue";
}

SprtState SprtState::init(double epsilon) {
  require_epsilon(epsilon);
  SprtState s;
  s.epsilon_ = epsilon;
  s.upper_ = std::log((1.0 - epsilon) / epsilon);
  s.lower_ = -s.upper_;
  return s;
}

SprtState SprtState::update(int outcome, double p_wigner, double p_friend) const {
  if (decided()) throw std::logic_error("SPRT already decided");
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");
  require_probability(p_wigner, "Wigner");
  require_probability(p_friend, "friend");
  if (p_wigner == 0.0 && p_friend == 0.0) {
    throw std::invalid_argument("outcome is impossible under both hypotheses");
  }

  SprtState next = *this;
  if (p_wigner == 0.0) {
    next.log_likelihood_ = -kInf;
  } else if (p_friend == 0.0) {
    next.log_likelihood_ = kInf;
  } else {
    next.log_likelihood_ += std::log(p_wigner / p_friend);
  }
  (outcome == 0 ? next.n0_ : next.n1_) += 1;

  if (next.log_likelihood_ >= next.upper_) {
    next.decision_ = Decision::accept_wigner;
  } else if (next.log_likelihood_ <= next.lower_) {
    next.decision_ = Decision::accept_friend;
  }
  return next;
}

std::optional<std::uint64_t> min_runs_to_accept_wigner(double theta, double epsilon) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0,1]");
  require_epsilon(epsilon);
  const double step = std::log(1.0 + std::cos(std::numbers::pi * theta / 2.0));
  if (!(step > 0.0)) return std::nullopt;
  const double threshold = std::log((1.0 - epsilon) / epsilon);

  // The ratio can land a rounding error away from an integer; settle on the
  // count at which n * step actually reaches the threshold.
  auto n = static_cast<std::uint64_t>(std::ceil(threshold / step));
  while (n > 1 && static_cast<double>(n - 1) * step >= threshold) --n;
  while (static_cast<double>(n) * step < threshold) ++n;
  return n;
}

}  // namespace bsg
