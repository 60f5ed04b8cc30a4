#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nlsb/constants.hpp"
#include "nlsb/nonlinearity.hpp"
#include "nlsb/criteria.hpp"
#include "oracle_helpers.hpp"

using namespace nlsb;

TEST_CASE("log gamma agrees with the standard library", "[constants]") {
  for (double x : {0.5, 1.0, 1.5, 2.0, 3.75, 10.0, 41.5})
    REQUIRE(log_gamma(x) == Catch::Approx(std::lgamma(x)).margin(1e-12));
}

TEST_CASE("quintic interaction constant has its closed value", "[constants]") {
  // C*(5) = (4 pi^2 / 3)^{1/8}.
  const double exact = std::pow(4.0 * kPi * kPi / 3.0, 0.125);
  REQUIRE(sharp_cstar(5.0) == Catch::Approx(exact).epsilon(1e-12));
  REQUIRE(sharp_cstar(5.0) == Catch::Approx(1.38008174168341).epsilon(1e-12));
  // Monotone in p over the range we use.
  REQUIRE(sharp_cstar(3.0) < sharp_cstar(5.0));
  REQUIRE(sharp_cstar(5.0) < sharp_cstar(7.0));
  REQUIRE_THROWS_AS(sharp_cstar(1.0), std::domain_error);
}

TEST_CASE("sharp interpolation constant", "[constants]") {
  SECTION("rational spot value") {
    // p=4, q=7, delta=0.4: the inner ratio is exactly 1, so C = 3/5.
    REQUIRE(sharp_interp_constant(4.0, 7.0, 0.4).C ==
            Catch::Approx(0.6).epsilon(1e-15));
  }
  SECTION("matches the brute-force supremum") {
    testutil::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const double p = rng.range(2.2, 5.5);
      const double q = p + rng.range(0.5, 4.0);
      const double delta = rng.range(0.05, 3.0);
      const double C = sharp_interp_constant(p, q, delta).C;
      double sup = 0.0;
      for (int i = 0; i <= 6000; ++i) {
        const double a = std::pow(10.0, -6.0 + 12.0 * i / 6000.0);
        sup = std::max(sup, (std::pow(a, p) - delta * std::pow(a, q)) / (a * a));
      }
      REQUIRE(sup <= C * (1.0 + 1e-9));
      REQUIRE(sup >= C * (1.0 - 1e-4));
      // Reducing the constant by 1% breaks the bound somewhere.
      REQUIRE(sup > 0.99 * C);
    }
  }
  SECTION("scaling law in delta") {
    // C(p, q, lambda delta) = lambda^{-(p-2)/(q-p)} C(p, q, delta).
    const double base = sharp_interp_constant(3.0, 6.0, 0.7).C;
    const double scaled = sharp_interp_constant(3.0, 6.0, 1.4).C;
    REQUIRE(scaled == Catch::Approx(base * std::pow(2.0, -1.0 / 3.0)).epsilon(1e-13));
  }
  SECTION("domain validation") {
    REQUIRE_THROWS_AS(sharp_interp_constant(2.0, 6.0, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(sharp_interp_constant(4.0, 4.0, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(sharp_interp_constant(4.0, 7.0, 0.0), std::domain_error);
  }
  SECTION("alternate exponent variant is not sharp") {
    // Debugging aid: same prefactor, different exponent; it must differ from
    // the sharp value away from the ratio-one point.
    const double sharp = sharp_interp_constant(3.0, 6.0, 0.7).C;
    const double alt = interp_constant_alt_exponent(3.0, 6.0, 0.7);
    REQUIRE(alt > 0.0);
    REQUIRE(alt != Catch::Approx(sharp).epsilon(1e-6));
  }
}

TEST_CASE("exponential energy threshold kappa", "[constants]") {
  const KappaResult kr = exponential_kappa(KappaVariant::Standard);
  REQUIRE(kr.kappa == Catch::Approx(4.136425).margin(5e-3));
  REQUIRE(kr.inner_sum == Catch::Approx(14.54570).margin(5e-3));
  REQUIRE(kr.kappa == Catch::Approx(0.25 * (kr.inner_sum + 2.0)).epsilon(1e-15));
  REQUIRE(kr.C_k.size() == 3);
  REQUIRE(kr.delta_k.size() == 3);
  // Budgets allocate 1/2520 of absorbing coefficient per term:
  // delta_k = (1/2520) / A_k with A_k = (4-k)/((k+2) k!).
  REQUIRE(kr.delta_k[0] == Catch::Approx(1.0 / 2520.0).epsilon(1e-14));
  REQUIRE(kr.delta_k[1] == Catch::Approx(1.0 / 630.0).epsilon(1e-14));
  REQUIRE(kr.delta_k[2] == Catch::Approx(1.0 / 84.0).epsilon(1e-14));
}

TEST_CASE("kappa reproduces through the general focusing sum", "[constants]") {
  // The truncated exponential run through the generic machinery must land on
  // the same threshold; the two computations share only the interpolation
  // constant.
  const KappaResult kr = exponential_kappa(KappaVariant::Standard);
  Observables unit;
  unit.mass = 1.0;
  const auto rep =
      check_general_sum_negative(Nonlinearity::exponential_series(64), unit);
  REQUIRE(rep.applicable);
  REQUIRE(rep.parameters.at("threshold") == Catch::Approx(kr.kappa).epsilon(1e-12));
}

TEST_CASE("critical-free kappa variant", "[constants]") {
  // Avoiding the critical power costs a huge constant; the variant exists to
  // document that trade, not to sharpen the threshold.
  const KappaResult cf = exponential_kappa(KappaVariant::CriticalFree);
  REQUIRE(cf.kappa > exponential_kappa(KappaVariant::Standard).kappa);
  REQUIRE(cf.theta > 0.8);
  REQUIRE(cf.theta < 1.0);
  REQUIRE(std::isfinite(cf.kappa));
}
