#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nlsb/constants.hpp"
#include "nlsb/observables.hpp"
#include "nlsb/profiles.hpp"
#include "oracle_helpers.hpp"

using namespace nlsb;

namespace {

FieldProfile unit_gaussian(double b = 0.0) {
  const Grid grid(20.0, 2048);
  return sample_profile(
      [b](double x) { return std::polar(std::exp(-0.5 * x * x), 0.25 * b * x * x); },
      grid);
}

}  // namespace

TEST_CASE("gaussian observables against closed integrals", "[observables]") {
  const auto u = unit_gaussian();
  const auto obs = compute_observables(u, Nonlinearity::finite_sum({}));
  const double rtpi = std::sqrt(kPi);
  REQUIRE(obs.mass == Catch::Approx(rtpi).epsilon(1e-12));
  REQUIRE(obs.variance == Catch::Approx(rtpi / 2.0).epsilon(1e-12));
  REQUIRE(obs.grad_norm_sq == Catch::Approx(rtpi / 2.0).epsilon(1e-12));
  REQUIRE(obs.kinetic == Catch::Approx(rtpi / 4.0).epsilon(1e-12));
  REQUIRE(obs.variance_rate == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(obs.energy == Catch::Approx(obs.kinetic).epsilon(1e-14));
}

TEST_CASE("cubic potential enters the energy with weight 1/4", "[observables]") {
  const auto u = unit_gaussian();
  const auto obs = compute_observables(u, Nonlinearity::finite_sum({{1.0, 2.0}}));
  // E = ||u_x||^2 / 2 - ||u||_4^4 / 4, and the quartic norm is sqrt(pi/2).
  const double want = std::sqrt(kPi) / 4.0 - std::sqrt(kPi / 2.0) / 4.0;
  REQUIRE(obs.energy == Catch::Approx(want).epsilon(1e-12));
  REQUIRE(obs.potential_terms.size() == 1);
}

TEST_CASE("quadratic chirp drives the variance rate", "[observables]") {
  // u = e^{i b x^2 / 4} v with real v: V_t[u] = V_t[v] + 2 b V[v].
  const double b = -1.0;
  const auto u = unit_gaussian(b);
  const auto obs = compute_observables(u, Nonlinearity::finite_sum({}));
  REQUIRE(obs.variance_rate == Catch::Approx(b * std::sqrt(kPi)).epsilon(1e-10));
  // The chirp adds (b^2/4) V to the gradient.
  const double want_gsq = std::sqrt(kPi) / 2.0 + 0.25 * b * b * std::sqrt(kPi) / 2.0;
  REQUIRE(obs.grad_norm_sq == Catch::Approx(want_gsq).epsilon(1e-10));
}

TEST_CASE("polynomial profile closed forms at wide window", "[observables]") {
  const Grid grid(200.0, 1 << 14);
  const auto fam = ProfileFamily::polynomial_decay(1.0);
  const auto u = build_profile(fam, grid);
  const auto obs = compute_observables(u, Nonlinearity::finite_sum({}));
  // M -> pi/2 and kinetic -> pi/8 with only O(L^-3) window loss; the
  // variance integrand decays like x^-2, so the window keeps
  // arctan(L) - L/(1+L^2), about 0.0100 short of pi/2 at L = 200.
  REQUIRE(obs.mass == Catch::Approx(kPi / 2.0).margin(1e-4));
  REQUIRE(obs.kinetic == Catch::Approx(kPi / 8.0).margin(1e-4));
  const double L = grid.half_width;
  const double windowed = std::atan(L) - L / (1.0 + L * L);
  REQUIRE(obs.variance == Catch::Approx(windowed).margin(2e-4));
  REQUIRE(kPi / 2.0 - obs.variance > 5e-3);
}

TEST_CASE("virial right-hand side on gaussian data", "[observables]") {
  const auto u = unit_gaussian();
  // Quartic focusing term: 8 ||u_x||^2 - 4 int W = 4 sqrt(pi) - (8/3) sqrt(pi/3).
  const double want = 4.0 * std::sqrt(kPi) - (8.0 / 3.0) * std::sqrt(kPi / 3.0);
  REQUIRE(virial_rhs(u, Nonlinearity::finite_sum({{1.0, 4.0}})) ==
          Catch::Approx(want).epsilon(1e-12));
  REQUIRE(virial_rhs(u, Nonlinearity::finite_sum({{1.0, 4.0}})) ==
          Catch::Approx(4.36094418243143).epsilon(1e-10));

  // The weight is additive over terms.
  const auto obs = compute_observables(u, Nonlinearity::finite_sum({}));
  const double v1 = virial_rhs(u, Nonlinearity::finite_sum({{0.7, 2.0}}));
  const double v2 = virial_rhs(u, Nonlinearity::finite_sum({{1.0, 4.0}}));
  const double v12 = virial_rhs(u, Nonlinearity::finite_sum({{0.7, 2.0}, {1.0, 4.0}}));
  REQUIRE(v12 == Catch::Approx(v1 + v2 - 8.0 * obs.grad_norm_sq).epsilon(1e-11));
}

TEST_CASE("uncertainty gap is nonnegative and gaussian-saturated", "[observables]") {
  SECTION("gaussian saturates, with or without chirp") {
    for (double b : {0.0, -1.0, 2.0}) {
      const auto u = unit_gaussian(b);
      const auto obs = compute_observables(u, Nonlinearity::finite_sum({}));
      REQUIRE(std::abs(uncertainty_gap(u)) <= 1e-8 * obs.grad_norm_sq);
    }
  }
  SECTION("random smooth fields stay above the floor") {
    testutil::Rng rng(21);
    const Grid grid(20.0, 2048);
    for (int trial = 0; trial < 50; ++trial) {
      const auto u = testutil::random_bump_field(rng, grid);
      const auto obs = compute_observables(u, Nonlinearity::finite_sum({}));
      REQUIRE(uncertainty_gap(u) >= -1e-10 * obs.grad_norm_sq);
    }
  }
}

TEST_CASE("interaction bound gap is nonnegative", "[observables]") {
  testutil::Rng rng(22);
  const Grid grid(20.0, 2048);
  for (int trial = 0; trial < 30; ++trial) {
    const auto u = testutil::random_bump_field(rng, grid);
    const double scale = lp_norm(u, 2.0);
    for (double p : {3.0, 5.0})
      REQUIRE(dr_gap(u, p) >= -1e-10 * scale);
  }
}

TEST_CASE("power bound gap with the cubic sharp constant", "[observables]") {
  // For p = 3 the optimizer of ||u||_4^4 <= c ||u_x|| ||u||_2^3 is sech,
  // with c = 1/sqrt(3): ||sech||_2^2 = 2, ||sech_x||^2 = 2/3, ||sech||_4^4 = 4/3.
  const Grid grid(30.0, 4096);
  const auto sech = sample_profile(
      [](double x) { return cplx(1.0 / std::cosh(x), 0.0); }, grid);
  const double c3 = 1.0 / std::sqrt(3.0);
  const double scale = lp_norm_pow(sech, 4.0);
  REQUIRE(std::abs(gn_gap(sech, 3.0, c3)) <= 1e-8 * scale);

  testutil::Rng rng(23);
  const Grid g2(20.0, 2048);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = testutil::random_bump_field(rng, g2);
    REQUIRE(gn_gap(u, 3.0, c3) >= -1e-10 * lp_norm_pow(u, 4.0));
  }
}

TEST_CASE("contraction time scale", "[observables]") {
  // Real gaussian: V_t = 0, no contraction to report.
  REQUIRE_FALSE(blowup_time_ratio(unit_gaussian()).has_value());
  // Expanding chirp: V_t > 0, still nothing.
  REQUIRE_FALSE(blowup_time_ratio(unit_gaussian(1.0)).has_value());
  // Contracting chirp b = -1: ||xu|| / (-V_t/4) = pi^{1/4} sqrt(1/2) / (sqrt(pi)/4).
  const auto ratio = blowup_time_ratio(unit_gaussian(-1.0));
  REQUIRE(ratio.has_value());
  const double want =
      std::sqrt(std::sqrt(kPi) / 2.0) / (std::sqrt(kPi) / 4.0);
  REQUIRE(*ratio == Catch::Approx(want).epsilon(1e-10));
  REQUIRE(*ratio == Catch::Approx(2.124482).epsilon(1e-5));
}
