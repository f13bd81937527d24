#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace bsg {

enum class Decision { undecided, accept_wigner, accept_friend };

/// "continue", "accept_wigner" or "accept_friend".
std::string_view to_string(Decision d);

/// Wald sequential probability ratio test of Wigner's prediction against the
/// friend's. The log-likelihood ratio is log(pW / pF) summed over observed
/// outcomes and saturates to +/-infinity when one side assigned probability 0.
/// A threshold is crossed when the ratio reaches it (>= / <=). Decided states
/// are absorbing: update() refuses to move them.
class SprtState {
 public:
  /// Throws std::invalid_argument unless 0 < epsilon < 1/2.
  static SprtState init(double epsilon);

  /// Returns the state after observing `outcome` (0 or 1), to which Wigner
  /// assigned `p_wigner` and the friend `p_friend`. Throws std::logic_error on
  /// a decided state and std::invalid_argument when both probabilities are 0.
  SprtState update(int outcome, double p_wigner, double p_friend) const;

  double log_likelihood() const { return log_likelihood_; }
  std::uint64_t n0() const { return n0_; }
  std::uint64_t n1() const { return n1_; }
  std::uint64_t observations() const { return n0_ + n1_; }
  double epsilon() const { return epsilon_; }
  double upper() const { return upper_; }
  double lower() const { return lower_; }
  Decision decision() const { return decision_; }
  bool decided() const { return decision_ != Decision::undecided; }

 private:
  SprtState() = default;

  double log_likelihood_ = 0.0;
  std::uint64_t n0_ = 0;
  std::uint64_t n1_ = 0;
  double epsilon_ = 0.0;
  double upper_ = 0.0;
  double lower_ = 0.0;
  Decision decision_ = Decision::undecided;
};

/// Smallest n with n * log(1 + cos(pi*theta/2)) >= log((1-eps)/eps): the run
/// count after which an unbroken omega0 sequence accepts Wigner. nullopt means
/// the count diverges (theta = 1, where both predictions coincide).
std::optional<std::uint64_t> min_runs_to_accept_wigner(double theta, double epsilon);

}  // namespace bsg
