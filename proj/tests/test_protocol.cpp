#include <doctest.h>

#include <cmath>

#include "bsg/protocol.hpp"
#include "oracles.hpp"

using namespace bsg;

namespace {

ProtocolConfig at(double theta) {
  ProtocolConfig c;
  c.theta = theta;
  return c;
}

double max_gap(const StateVector& v, const std::array<Complex, 8>& expected) {
  double d = 0.0;
  for (std::size_t i = 0; i < 8; ++i) d = std::max(d, std::abs(v.amplitude(i) - expected[i]));
  return d;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS(at(-0.1).validate());
  CHECK_THROWS(at(1.5).validate());
  ProtocolConfig c;
  c.alpha = 0.6;
  c.beta = 0.8;
  CHECK_NOTHROW(c.validate());
  CHECK(std::abs(initial_state(c).norm() - 1.0) < 1e-12);
  c.beta = 0.9;
  CHECK_THROWS(c.validate());
  ProtocolConfig s;
  s.swap_before_mf = true;
  CHECK_THROWS(s.validate());
}

TEST_CASE("initial and measured states") {
  const auto psi0 = initial_state(ProtocolConfig{});
  CHECK(std::abs(psi0.amplitude(0) - M_SQRT1_2) < 1e-15);
  CHECK(std::abs(psi0.amplitude(4) - M_SQRT1_2) < 1e-15);

  ProtocolConfig up;
  up.alpha = 1.0;
  up.beta = 0.0;
  CHECK(std::abs(initial_state(up).amplitude(0) - 1.0) < 1e-15);

  const auto psi1 = wigner_state_after_measurement(ProtocolConfig{});
  CHECK(psi1.observer() == Observer::wigner);
  CHECK(psi1.stage() == Stage::psi1);
  CHECK(std::abs(psi1.state().amplitude(6) - M_SQRT1_2) < 1e-15);
  CHECK(apply(measurement_unitary(), psi1.state()).distance(psi0) < 1e-15);

  const auto c0 = friend_collapse_to(psi1, Record::phi0);
  CHECK(c0.probability == doctest::Approx(0.5));
  CHECK(c0.assignment.friend_record() == Record::phi0);
  CHECK(std::abs(c0.assignment.state().amplitude(0) - 1.0) < 1e-12);
  const auto c1 = friend_collapse_to(psi1, Record::phi1);
  CHECK(std::abs(c1.assignment.state().amplitude(6) - 1.0) < 1e-12);

  const auto measured_up = wigner_state_after_measurement(up);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) CHECK(friend_collapse(measured_up, rng).record == Record::phi0);
  CHECK_THROWS(friend_collapse_to(measured_up, Record::phi1));
}

TEST_CASE("observer assignment invariants") {
  const auto v = initial_state(ProtocolConfig{});
  CHECK_THROWS(ObserverAssignment(Observer::wigner, Record::phi0, v, Stage::psi2));
  CHECK_THROWS(ObserverAssignment(Observer::friend_, std::nullopt, v, Stage::psi1));
  CHECK_NOTHROW(ObserverAssignment(Observer::friend_, std::nullopt, v, Stage::psi0));
}

TEST_CASE("post-interface states agree with the hand expansion") {
  for (const double theta : unit_grid(41)) {
    CHECK(max_gap(wigner_state_after_interaction(at(theta)).state(), oracle::psi2_wigner(theta)) < 1e-12);
    CHECK(max_gap(friend_state_after_interaction(at(theta), Record::phi0).state(), oracle::up_branch(theta)) < 1e-12);
    CHECK(max_gap(friend_state_after_interaction(at(theta), Record::phi1).state(), oracle::down_branch(theta)) < 1e-12);
  }
  const auto half = wigner_state_after_interaction(at(0.5)).state();
  CHECK(std::abs(half.amplitude(0).real() - oracle::kPsi2UpAmplitudeHalf) < 1e-12);
}

TEST_CASE("Born examples on post-interface states") {
  const auto d0 = born_probabilities(wigner_state_after_interaction(at(0.0)).state(), wigner_basis());
  CHECK(std::abs(d0.of("omega0") - 1.0) < 1e-12);
  const auto dh = born_probabilities(wigner_state_after_interaction(at(0.5)).state(), wigner_basis());
  CHECK(std::abs(dh.of("omega0") - oracle::kPsi2UpAmplitudeHalf) < 1e-12);
  const auto df = born_probabilities(friend_state_after_interaction(at(0.0), Record::phi0).state(), wigner_basis());
  CHECK(std::abs(df.of("omega0") - 0.5) < 1e-12);
}

TEST_CASE("swap moves the friend's memory into the ancilla") {
  ProtocolConfig c = at(0.3);
  c.include_ancilla = true;
  const auto psi2 = wigner_state_after_interaction(c);
  const auto psi3 = swap_memory(psi2);
  CHECK(psi3.stage() == Stage::psi3);
  Matrix r = Matrix::Zero(2, 2);
  r(0, 0) = 1.0;
  CHECK(project(psi3.state(), Operator({"F"}, r, OperatorKind::projector), false).probability ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(apply(swap_unitary(), psi3.state()).distance(psi2.state()) < 1e-12);
  CHECK_THROWS(swap_memory(wigner_state_after_interaction(at(0.3))));
  // M_W statistics are unchanged by the swap.
  CHECK(std::abs(born_probabilities(psi3.state(), wigner_basis()).of("omega0") -
                 (1 + oracle::c_of(0.3)) / 2) < 1e-12);
}

TEST_CASE("repeat measurement") {
  const auto ghz = wigner_state_after_repeat(at(0.0));
  CHECK(ghz.stage() == Stage::psi4);
  const auto& v = ghz.state();
  // S, F, W, F' layout: |up phi0 omega0 phi0> and |down phi1 omega0 phi1>.
  CHECK(std::abs(std::norm(v.amplitude(0)) - 0.5) < 1e-12);
  CHECK(std::abs(std::norm(v.amplitude(13)) - 0.5) < 1e-12);

  const auto collapsed = friend_state_after_repeat(at(0.4), Record::phi1);
  CHECK(born_probabilities(collapsed.state(), friend_repeat_basis()).of("phi1") == doctest::Approx(1.0));

  const SubsystemLayout sff({"S", "F", "F'"});
  const auto fixed = basis_state(sff, {{"S", 0}, {"F", 0}, {"F'", 0}});
  CHECK(apply(repeat_measurement_unitary(), fixed).distance(fixed) == 0.0);
}

TEST_CASE("ancilla and fprime flags keep Wigner's predictions") {
  for (const double theta : {0.0, 0.3, 0.7, 1.0}) {
    ProtocolConfig c = at(theta);
    c.include_ancilla = true;
    c.include_fprime = true;
    for (const auto m : {Measurement::m_f, Measurement::m_w}) {
      const auto a = predict(c, Observer::wigner, m, PredictionMode::state_derived);
      const auto b = predict(at(theta), Observer::wigner, m, PredictionMode::state_derived);
      CHECK(std::abs(a.of(0) - b.of(0)) < 1e-12);
    }
    c.swap_before_mf = true;
    const auto swapped = predict(c, Observer::wigner, Measurement::m_f, PredictionMode::state_derived);
    CHECK(std::abs(swapped.of(0) - (1 + oracle::s_of(theta) * oracle::c_of(theta)) / 2) < 1e-12);
  }
}

TEST_CASE("prediction examples") {
  for (const auto mode : {PredictionMode::as_published, PredictionMode::state_derived}) {
    const auto w = predict(at(0.0), Observer::wigner, Measurement::m_w, mode);
    CHECK(std::abs(w.of(0) - 1.0) < 1e-12);
    const auto wf = predict(at(0.0), Observer::wigner, Measurement::m_f, mode);
    CHECK(std::abs(wf.of(0) - 0.5) < 1e-12);
  }
  const auto f = predict(at(0.0), Observer::friend_, Measurement::m_f, PredictionMode::as_published, Record::phi1);
  CHECK(f.of(0) == 0.0);
  CHECK(f.of(1) == 1.0);
  const auto wh = predict(at(0.5), Observer::wigner, Measurement::m_w, PredictionMode::as_published);
  CHECK(std::abs(wh.of(0) - oracle::kPsi2UpAmplitudeHalf) < 1e-12);
  const auto fh = predict(at(0.5), Observer::friend_, Measurement::m_w, PredictionMode::state_derived, Record::phi0);
  CHECK(std::abs(fh.of(0) - oracle::kPsi2UpAmplitudeHalf) < 1e-12);
  const auto fp = predict(at(0.5), Observer::friend_, Measurement::m_w, PredictionMode::as_published, Record::phi0);
  CHECK(fp.of(0) == 0.5);

  const auto fd = predict(at(0.3), Observer::friend_, Measurement::m_f, PredictionMode::state_derived, Record::phi0);
  CHECK(std::abs(fd.of(0) - oracle::kFriendMfDerivedTheta03) < 1e-12);
  const auto fd1 = predict(at(0.3), Observer::friend_, Measurement::m_f, PredictionMode::state_derived, Record::phi1);
  CHECK(std::abs(fd1.of(1) - oracle::kFriendMfDerivedTheta03) < 1e-12);

  CHECK_THROWS(predict(at(0.3), Observer::friend_, Measurement::m_w, PredictionMode::as_published));
  CHECK_THROWS(predict(at(0.3), Observer::wigner, Measurement::m_w, PredictionMode::as_published, Record::phi0));
}

TEST_CASE("property: predictions normalized and endpoints agree") {
  for (const double theta : unit_grid(51)) {
    for (const auto m : {Measurement::m_f, Measurement::m_w}) {
      for (const auto mode : {PredictionMode::as_published, PredictionMode::state_derived}) {
        const auto w = predict(at(theta), Observer::wigner, m, mode);
        CHECK(std::abs(w.of(0) + w.of(1) - 1.0) < kProbabilityTol);
        CHECK(w.of(0) >= 0.0);
        CHECK(w.of(1) >= 0.0);
        for (const auto r : {Record::phi0, Record::phi1}) {
          const auto f = predict(at(theta), Observer::friend_, m, mode, r);
          CHECK(std::abs(f.of(0) + f.of(1) - 1.0) < kProbabilityTol);
        }
      }
    }
  }
  for (const double theta : {0.0, 1.0}) {
    for (const auto m : {Measurement::m_f, Measurement::m_w}) {
      const auto a = predict(at(theta), Observer::wigner, m, PredictionMode::as_published);
      const auto b = predict(at(theta), Observer::wigner, m, PredictionMode::state_derived);
      CHECK(std::abs(a.of(0) - b.of(0)) < kProbabilityTol);
    }
  }
  // The friend's M_F modes meet at theta = 1; at theta = 0 the unitary route
  // gives 1/2 because the repeat acts on the post-interface state, so only theta = 1 is asserted.
  for (const auto r : {Record::phi0, Record::phi1}) {
    const auto a = predict(at(1.0), Observer::friend_, Measurement::m_f, PredictionMode::as_published, r);
    const auto b = predict(at(1.0), Observer::friend_, Measurement::m_f, PredictionMode::state_derived, r);
    CHECK(std::abs(a.of(0) - b.of(0)) < kProbabilityTol);
  }
}

TEST_CASE("as-published friend M_F equals Born on the collapsed repeat") {
  for (const double theta : unit_grid(11)) {
    for (const auto r : {Record::phi0, Record::phi1}) {
      const auto d = born_probabilities(friend_state_after_repeat(at(theta), r).state(), friend_repeat_basis());
      const auto p = predict(at(theta), Observer::friend_, Measurement::m_f, PredictionMode::as_published, r);
      CHECK(std::abs(d.probabilities[0] - p.of(0)) < 1e-12);
    }
  }
}

TEST_CASE("record persistence in the friend's post-interface state") {
  for (const double theta : unit_grid(21)) {
    for (const auto r : {Record::phi0, Record::phi1}) {
      const auto v = friend_state_after_interaction(at(theta), r).state();
      for (const std::size_t w : {0u, 1u}) {
        CHECK(std::abs(v.amplitude(oracle::sfw(0, 1, w))) < 1e-12);
        CHECK(std::abs(v.amplitude(oracle::sfw(1, 0, w))) < 1e-12);
      }
    }
  }
}

TEST_CASE("closed-form report") {
  const auto grid = unit_grid(101);
  const auto report = verify_closed_forms(grid, 1e-10);
  CHECK(report.passed);
  CHECK(report.entries.size() == 101);
  CHECK(report.max_deviation < 1e-12);
  const double zero[] = {0.0};
  CHECK(verify_closed_forms(zero, 1e-10).entries.at(0).mw_deviation < 1e-15);
  CHECK(unit_grid(1).size() == 1);
  CHECK(unit_grid(3)[1] == 0.5);
}
