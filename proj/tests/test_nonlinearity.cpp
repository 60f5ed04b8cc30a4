#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nlsb/nonlinearity.hpp"

using nlsb::Nonlinearity;

TEST_CASE("finite sum evaluates the stated powers", "[nonlinearity]") {
  const auto nl = Nonlinearity::finite_sum({{1.5, 2.0}, {-0.25, 4.0}});
  for (double s : {0.0, 0.3, 1.0, 2.7}) {
    const double want = 1.5 * s * s - 0.25 * s * s * s * s;
    REQUIRE(nl.eval(s) == Catch::Approx(want).margin(1e-15));
  }
}

TEST_CASE("integer power fast path matches std::pow", "[nonlinearity]") {
  for (int b = 0; b <= 32; ++b) {
    for (double s : {0.0, 1e-8, 0.37, 1.0, 1.9}) {
      const double fast = Nonlinearity::pow_nonneg(s, static_cast<double>(b));
      const double ref = std::pow(s, static_cast<double>(b));
      REQUIRE(fast == Catch::Approx(ref).epsilon(1e-13).margin(1e-300));
    }
  }
  // Non-integer exponents fall through to std::pow unchanged.
  REQUIRE(Nonlinearity::pow_nonneg(0.5, 2.5) == std::pow(0.5, 2.5));
}

TEST_CASE("exponential series evaluates e^s with factorial terms", "[nonlinearity]") {
  const auto nl = Nonlinearity::exponential_series(64);
  REQUIRE(nl.is_exponential());
  for (double s : {0.0, 0.1, 1.0, 3.0})
    REQUIRE(nl.eval(s) == Catch::Approx(std::exp(s)).epsilon(1e-15));
  // Term table: coefficient 1/k! at power k, starting from the constant.
  const auto& terms = nl.terms();
  REQUIRE(terms.size() == 65);
  double factorial = 1.0;
  for (std::size_t k = 0; k < 8; ++k) {
    if (k > 0) factorial *= static_cast<double>(k);
    REQUIRE(terms[k].beta == static_cast<double>(k));
    REQUIRE(terms[k].c == Catch::Approx(1.0 / factorial).epsilon(1e-15));
  }
}

TEST_CASE("potential density closed forms", "[nonlinearity]") {
  SECTION("single power term") {
    const auto nl = Nonlinearity::finite_sum({{2.0, 3.0}});
    for (double s : {0.2, 1.0, 1.7})
      REQUIRE(nl.potential_density(s) ==
              Catch::Approx(2.0 * std::pow(s, 5.0) / 5.0).epsilon(1e-14));
  }
  SECTION("exponential closed form (s-1)e^s + 1") {
    const auto nl = Nonlinearity::exponential_series(64);
    REQUIRE(nl.potential_density(1.0) == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(nl.potential_density(0.5) ==
            Catch::Approx((0.5 - 1.0) * std::exp(0.5) + 1.0).epsilon(1e-14));
  }
  SECTION("exponential equals its term-by-term series") {
    const auto nl = Nonlinearity::exponential_series(64);
    for (double s : {0.05, 0.2499, 0.2501, 0.9}) {
      double series = 0.0, factorial = 1.0;
      for (int k = 0; k <= 40; ++k) {
        if (k > 0) factorial *= static_cast<double>(k);
        series += std::pow(s, k + 2.0) / (factorial * (k + 2.0));
      }
      REQUIRE(nl.potential_density(s) == Catch::Approx(series).epsilon(1e-13));
    }
  }
}

TEST_CASE("virial weight density closed forms", "[nonlinearity]") {
  SECTION("single power term carries weight beta") {
    for (double beta : {1.0, 2.0, 4.0, 6.5}) {
      const auto nl = Nonlinearity::finite_sum({{1.0, beta}});
      for (double s : {0.3, 1.0, 1.4})
        REQUIRE(nl.virial_weight_density(s) ==
                Catch::Approx(beta * std::pow(s, beta + 2.0) / (beta + 2.0))
                    .epsilon(1e-14));
    }
  }
  SECTION("exponential closed form e^s (s^2 - 2s + 2) - 2") {
    const auto nl = Nonlinearity::exponential_series(64);
    const double e = std::exp(1.0);
    REQUIRE(nl.virial_weight_density(1.0) == Catch::Approx(e - 2.0).epsilon(1e-13));
    for (double s : {0.05, 0.2499, 0.2501, 1.3}) {
      double series = 0.0, factorial = 1.0;
      for (int k = 0; k <= 40; ++k) {
        if (k > 0) factorial *= static_cast<double>(k);
        series += k * std::pow(s, k + 2.0) / (factorial * (k + 2.0));
      }
      REQUIRE(nl.virial_weight_density(s) ==
              Catch::Approx(series).epsilon(1e-12).margin(1e-16));
    }
  }
}

TEST_CASE("constructor and argument validation", "[nonlinearity]") {
  REQUIRE_THROWS_AS(Nonlinearity::finite_sum({{1.0, -1.0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(Nonlinearity::finite_sum({{1.0, 4.0}, {1.0, 2.0}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(Nonlinearity::exponential_series(4), std::invalid_argument);
  const auto nl = Nonlinearity::finite_sum({{1.0, 2.0}});
  REQUIRE_THROWS_AS(nl.eval(-0.5), std::domain_error);
  REQUIRE_THROWS_AS(nl.potential_density(-0.5), std::domain_error);
  // Empty sum is the free equation.
  REQUIRE(Nonlinearity::finite_sum({}).eval(1.0) == 0.0);
}
