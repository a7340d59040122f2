#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

using namespace qsink;
using namespace qsink::testing;

namespace {

const ChannelParams kFigureLine{1, 5, 1};

TwoQubitState conditional_at(const ChannelParams& p1, const ChannelParams& p2, double t,
                             const TwoQubitState& initial) {
  return conditional_state(ptm_at(p1, t), ptm_at(p2, t), initial).state;
}

/// First time after which psi+ stays separable, by bisection on the PPT test.
/// `entangled_at` must be true at lo and false at hi.
template <typename Pred>
double bisect_disentangling(Pred&& entangled_at, double lo, double hi) {
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    (entangled_at(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("state validation") {
  CHECK_NOTHROW(TwoQubitState(ComplexMatrix::identity(4) * cplx(0.25)));
  CHECK_THROWS_AS(TwoQubitState(ComplexMatrix::identity(2)), std::invalid_argument);
  CHECK_THROWS_AS(TwoQubitState(ComplexMatrix::identity(4)), std::invalid_argument);
  CHECK_THROWS_AS(TwoQubitState(ComplexMatrix::diagonal({1.2, -0.2, 0, 0})), std::invalid_argument);
  CHECK_THROWS_AS(TwoQubitState(ComplexMatrix(4)), std::invalid_argument);
  ComplexMatrix skew = ComplexMatrix::identity(4) * cplx(0.25);
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(TwoQubitState{skew}, std::invalid_argument);

  const TwoQubitState sub(ComplexMatrix::identity(4) * cplx(0.1));
  CHECK_FALSE(sub.normalized());
  CHECK(sub.trace() == doctest::Approx(0.4));
  CHECK(sub.normalize().normalized());
  CHECK_THROWS_AS(TwoQubitState::pure({0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("negativity: maximally entangled, product and Werner states") {
  CHECK(std::abs(negativity(TwoQubitState::pure(psi_plus())) - 0.5) <= 1e-12);
  CHECK(negativity(TwoQubitState::pure({1, 0, 0, 0})) == 0.0);
  CHECK(std::abs(negativity(TwoQubitState(werner(0.5))) - 0.125) <= 1e-10);
  CHECK_FALSE(is_entangled(TwoQubitState(werner(1.0 / 3.0))));
  CHECK(is_entangled(TwoQubitState::pure(psi_plus())));
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    CHECK(negativity(TwoQubitState(werner(p))) ==
          doctest::Approx(std::max(0.0, (3 * p - 1) / 4)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("negativity of a subnormalized operator refers to the normalized state") {
  const TwoQubitState sub(werner(0.8) * cplx(0.3));
  CHECK(negativity(sub) == doctest::Approx(negativity(TwoQubitState(werner(0.8)))).epsilon(1e-14));
}

TEST_CASE("negativity equals half the excess trace norm") {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = trial % 2 ? random_density(rng, 4) : haar_pure_density(rng, 4);
    const double expected = 0.5 * (trace_norm(partial_transpose_second(rho)) - 1.0);
    CHECK(negativity(TwoQubitState(rho)) == doctest::Approx(std::max(0.0, expected)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("pure state negativity is the product of Schmidt coefficients") {
  Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = haar_vector(rng, 4);
    // Schmidt coefficients are the singular values of the 2x2 coefficient matrix.
    const cplx det = v[0] * v[3] - v[1] * v[2];
    const TwoQubitState s(ComplexMatrix::outer(v));
    CHECK(negativity(s) == doctest::Approx(std::abs(det)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("random separable mixtures are never flagged") {
  Rng rng(53);
  int false_positives = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rho = random_separable(rng, 1 + trial % 6);
    if (is_entangled(TwoQubitState(rho))) ++false_positives;
  }
  CHECK(false_positives == 0);
}

TEST_CASE("conditional state: identity and t = 0") {
  Rng rng(54);
  const TwoQubitState initial(random_density(rng, 4));
  const auto same = conditional_state(PauliTransferMatrix::identity(), PauliTransferMatrix::identity(), initial);
  CHECK(max_abs_diff(same.state.rho(), initial.rho()) < 1e-15);
  CHECK(same.detection_probability == doctest::Approx(1.0).epsilon(1e-15));
  const auto zero = conditional_state(ptm_at(kFigureLine, 0), ptm_at({0.3, 2, 4}, 0), initial);
  CHECK(max_abs_diff(zero.state.rho(), initial.rho()) < 1e-15);
  CHECK(zero.detection_probability == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("conditional state of psi+ against the superoperator oracle") {
  const auto m = ptm_at(kFigureLine, 0.2);
  const auto initial = TwoQubitState::pure(psi_plus());
  const auto result = conditional_state(m, m, initial);
  const auto reference = apply_product_reference(m, m, initial.rho());
  const double p = reference.trace().real();
  CHECK(result.detection_probability == doctest::Approx(p).epsilon(1e-13));
  CHECK(max_abs_diff(result.state.rho(), reference * cplx(1.0 / p)) < 1e-12);
  // |HH> survives with probability (a+b)^2, |VV> with (a-b)^2.
  const auto c = abcd(kFigureLine, 0.2);
  CHECK(p == doctest::Approx(0.5 * (c.a + c.b) * (c.a + c.b) + 0.5 * (c.a - c.b) * (c.a - c.b)).epsilon(1e-14));
}

TEST_CASE("conditional state: invalid inputs") {
  const auto sub = TwoQubitState(ComplexMatrix::identity(4) * cplx(0.1));
  CHECK_THROWS_AS(conditional_state(PauliTransferMatrix::identity(), PauliTransferMatrix::identity(), sub),
                  std::invalid_argument);
  const auto absorbing = PauliTransferMatrix::diagonal(0, 0, 0, 0);
  CHECK_THROWS_AS(conditional_state(absorbing, PauliTransferMatrix::identity(), TwoQubitState::pure(psi_plus())),
                  std::domain_error);
}

TEST_CASE("conditional negativity is invariant under global attenuation") {
  Rng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p1 = random_params(rng, 3.0);
    const auto p2 = random_params(rng, 3.0);
    const double t = rng.uniform(0.0, 0.6);
    const TwoQubitState initial(trial % 2 ? random_density(rng, 4) : haar_pure_density(rng, 4));
    const auto m1 = ptm_at(p1, t);
    const auto m2 = ptm_at(p2, t);
    const double base = negativity(conditional_state(m1, m2, initial).state);
    for (double scale : {0.1, 0.5, 0.9}) {
      CHECK(std::abs(negativity(conditional_state(m1.scaled(scale), m2, initial).state) - base) <= 1e-12);
      CHECK(std::abs(negativity(conditional_state(m1, m2.scaled(scale), initial).state) - base) <= 1e-12);
    }
  }
}

TEST_CASE("lifetime equation: closed-form cases") {
  CHECK(lifetime_lhs(kFigureLine, {0.2, 0.1, 3}, 0.0) == 2.0);
  const double g = 0.7;
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    CHECK(lifetime_lhs({0, 0, g}, {0, 0, g}, t) == doctest::Approx(3 * std::exp(-2 * g * t) - 1).epsilon(1e-13));
  }
  for (double t : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
    CHECK(lifetime_lhs({1, 5, 0}, {1, 5, 0}, t) == doctest::Approx(2.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(lifetime_lhs(kFigureLine, kFigureLine, -1.0), std::invalid_argument);
}

TEST_CASE("maximal lifetime: symmetric depolarization") {
  for (double g : {0.1, 0.5, 1.0, 5.0}) {
    const auto result = max_lifetime({0, 0, g}, {0, 0, g}, default_lifetime_horizon({0, 0, g}, {0, 0, g}));
    REQUIRE(result.tau.has_value());
    const double expected = std::log(3.0) / (2 * g);
    CHECK(std::abs(*result.tau - expected) <= 1e-9 * expected);
    CHECK(std::abs(result.residual) <= 1e-10);
    CHECK_FALSE(result.sign_reversal);
    CHECK(result.lhs_at_zero == 2.0);
    CHECK(result.bracket.first <= *result.tau);
    CHECK(result.bracket.second >= *result.tau);
  }
}

TEST_CASE("maximal lifetime: pure loss never disentangles") {
  const auto result = max_lifetime({1, 5, 0}, {1, 5, 0}, default_lifetime_horizon({1, 5, 0}, {1, 5, 0}));
  CHECK_FALSE(result.tau.has_value());
  CHECK(result.residual == doctest::Approx(2.0));
  CHECK_THROWS_AS(max_lifetime({1, 5, 0}, {1, 5, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(max_lifetime({1, 5, 0}, {1, 5, 0}, INFINITY), std::invalid_argument);
}

TEST_CASE("lifetime search helpers") {
  CHECK(lifetime_initial_step(kFigureLine, kFigureLine) == doctest::Approx(1.0 / 14));
  CHECK(default_lifetime_horizon(kFigureLine, kFigureLine) == doctest::Approx(1000.0 / 14));
  CHECK(std::isinf(lifetime_initial_step({}, {})));
}

TEST_CASE("maximal lifetime outlives psi+ for (1,5,1)") {
  const auto result = max_lifetime(kFigureLine, kFigureLine, 100.0);
  REQUIRE(result.tau.has_value());
  const double tau = *result.tau;
  CHECK(std::abs(lifetime_lhs(kFigureLine, kFigureLine, tau)) <= 1e-10);
  CHECK_FALSE(result.sign_reversal);

  const auto psi = TwoQubitState::pure(psi_plus());
  const double psi_plus_time = bisect_disentangling(
      [&](double t) { return min_pt_eigenvalue(conditional_at(kFigureLine, kFigureLine, t, psi).rho()) < 0; }, 0.0,
      tau);
  CHECK(psi_plus_time < tau);
  CHECK(psi_plus_time > 0.0);
}

TEST_CASE("lifetime results on a grid have no sign reversals") {
  for (double gh : {0.0, 0.5, 2.0}) {
    for (double gv : {0.0, 1.0, 5.0}) {
      for (double g : {0.3, 1.0}) {
        const ChannelParams p1{gh, gv, g};
        const ChannelParams p2{gv, 0.5 * gh, 2 * g};
        const auto result = max_lifetime(p1, p2, default_lifetime_horizon(p1, p2));
        REQUIRE(result.tau.has_value());
        CHECK(std::abs(result.residual) <= 1e-10);
        CHECK_FALSE(result.sign_reversal);
      }
    }
  }
}

TEST_CASE("psi+ under the unital normal forms disentangles exactly at tau") {
  const std::vector<std::pair<ChannelParams, ChannelParams>> cases = {
      {kFigureLine, kFigureLine}, {{0, 0, 1}, {0, 0, 1}}, {{0.4, 3, 0.5}, {2, 0.1, 1.5}}};
  for (const auto& [p1, p2] : cases) {
    const auto result = max_lifetime(p1, p2, default_lifetime_horizon(p1, p2));
    REQUIRE(result.tau.has_value());
    const double tau = *result.tau;
    const auto psi = ComplexMatrix::outer(psi_plus());
    const auto unital_entangled = [&](double t) {
      const auto out = apply_two_qubit(decompose(p1, t).upsilon, decompose(p2, t).upsilon, psi);
      return min_pt_eigenvalue(out) < 0;
    };
    const double direct = bisect_disentangling(unital_entangled, 0.0, 4 * tau);
    CHECK(std::abs(direct - tau) <= 1e-9);
  }
}

TEST_CASE("optimal state: structure and symmetric lines") {
  const auto sym = optimal_state({2, 2, 1}, {0.5, 0.5, 3}, 0.4);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(sym.psi[0] - cplx(r)) < 1e-15);
  CHECK(std::abs(sym.psi[3] - cplx(r)) < 1e-15);
  CHECK(std::abs(sym.psi[1]) == 0.0);
  CHECK(std::abs(sym.psi[2]) == 0.0);

  const auto opt = optimal_state(kFigureLine, {0.3, 2, 0.5}, 0.5);
  double norm2 = 0.0;
  for (const auto& z : opt.psi) norm2 += std::norm(z);
  CHECK(std::abs(norm2 - 1.0) <= 1e-12);
  CHECK(opt.psi[1] == cplx(0.0));
  CHECK(opt.psi[2] == cplx(0.0));
  CHECK(max_abs_diff(opt.rho, ComplexMatrix::outer(opt.psi)) == 0.0);
  const auto [s1, s2] = opt.schmidt_coefficients;
  CHECK(s1 >= s2);
  CHECK(s1 * s1 + s2 * s2 == doctest::Approx(1.0).epsilon(1e-12));
  // Rank one.
  const auto ev = hermitian_eigenvalues(opt.rho);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(ev[1]) < 1e-12);

  CHECK_THROWS_AS(optimal_state(kFigureLine, kFigureLine, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_state(kFigureLine, kFigureLine, -1.0), std::invalid_argument);
}

TEST_CASE("optimal state weights the faster-decaying polarization") {
  for (double gv : {1.5, 3.0, 5.0, 10.0}) {
    const ChannelParams p{1.0, gv, 1.0};
    const auto result = max_lifetime(p, p, default_lifetime_horizon(p, p));
    REQUIRE(result.tau.has_value());
    const auto opt = optimal_state(p, p, *result.tau);
    CHECK(std::abs(opt.psi[3]) > std::abs(opt.psi[0]));
  }
  const auto flipped = optimal_state({5, 1, 1}, {5, 1, 1}, 0.4);
  CHECK(std::abs(flipped.psi[0]) > std::abs(flipped.psi[3]));
}

TEST_CASE("optimal state is covariant under swapping the lines") {
  const ChannelParams p1{0.4, 3, 0.5};
  const ChannelParams p2{2, 0.1, 1.5};
  const auto a = optimal_state(p1, p2, 0.37);
  const auto b = optimal_state(p2, p1, 0.37);
  // SWAP maps |HV> <-> |VH> and fixes |HH>, |VV>.
  CHECK(a.psi[0] == b.psi[0]);
  CHECK(a.psi[1] == b.psi[2]);
  CHECK(a.psi[2] == b.psi[1]);
  CHECK(a.psi[3] == b.psi[3]);
  CHECK(a.b_diagonal_1 == b.b_diagonal_2);
  CHECK(a.b_diagonal_2 == b.b_diagonal_1);
}

TEST_CASE("optimal state stays entangled just before tau, psi+ dies earlier") {
  const auto result = max_lifetime(kFigureLine, kFigureLine, 100.0);
  REQUIRE(result.tau.has_value());
  const double tau = *result.tau;
  const auto opt = TwoQubitState(optimal_state(kFigureLine, kFigureLine, tau).rho);
  const auto psi = TwoQubitState::pure(psi_plus());
  int psi_plus_separable = 0;
  for (int k = 0; k < 50; ++k) {
    const double t = 0.8 * tau + 0.2 * tau * k / 50.0;
    CAPTURE(t);
    CHECK(is_entangled(conditional_at(kFigureLine, kFigureLine, t, opt)));
    if (!is_entangled(conditional_at(kFigureLine, kFigureLine, t, psi))) ++psi_plus_separable;
  }
  CHECK(psi_plus_separable > 0);
  // psi+ is already separable at the end of the window.
  CHECK_FALSE(is_entangled(conditional_at(kFigureLine, kFigureLine, tau * 0.999, psi)));
}

TEST_CASE("no initial state survives past tau") {
  const std::vector<std::pair<ChannelParams, ChannelParams>> cases = {
      {kFigureLine, kFigureLine}, {{0.4, 3, 0.5}, {2, 0.1, 1.5}}};
  Rng rng(56);
  for (const auto& [p1, p2] : cases) {
    const auto result = max_lifetime(p1, p2, default_lifetime_horizon(p1, p2));
    REQUIRE(result.tau.has_value());
    const double tau = *result.tau;
    const auto opt = TwoQubitState(optimal_state(p1, p2, tau).rho);
    CHECK(is_entangled(conditional_at(p1, p2, tau * (1 - 1e-3), opt)));
    CHECK_FALSE(is_entangled(conditional_at(p1, p2, tau * (1 + 1e-3), opt)));
    int entangled = 0;
    for (int k = 0; k < 200; ++k) {
      const TwoQubitState initial(k % 2 ? haar_pure_density(rng, 4) : random_density(rng, 4));
      if (is_entangled(conditional_at(p1, p2, tau * (1 + 1e-3), initial))) ++entangled;
    }
    CHECK(entangled == 0);
  }
}

TEST_CASE("robust state for ordered unital parameters") {
  const auto expected = psi_plus();
  CHECK(robust_state_unital({1, 1, 1}, {1, 1, 1}) == expected);
  CHECK(robust_state_unital({0.9, 0.5, 0.1}, {0.3, 0.3, 0.0}) == expected);
  CHECK_THROWS_AS(robust_state_unital({0.5, 0.9, 0.1}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(robust_state_unital({1, 1, 1}, {0.5, 0.4, -0.1}), std::invalid_argument);
}
