#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "nlsb/field.hpp"
#include "oracle_helpers.hpp"

using namespace nlsb;

TEST_CASE("grid validation and coordinates", "[field]") {
  REQUIRE_THROWS_AS(Grid(20.0, 1000), std::invalid_argument);
  REQUIRE_THROWS_AS(Grid(-1.0, 64), std::invalid_argument);
  const Grid g(10.0, 8);
  REQUIRE(g.dx() == Catch::Approx(2.5));
  REQUIRE(g.x(0) == Catch::Approx(-10.0));
  REQUIRE(g.x(4) == Catch::Approx(0.0));
  // Wavenumbers fold symmetrically: mode N-1 is the negative of mode 1.
  REQUIRE(g.wavenumber(1) == Catch::Approx(kPi / 10.0));
  REQUIRE(g.wavenumber(7) == Catch::Approx(-kPi / 10.0));
  REQUIRE(g.wavenumber(0) == 0.0);
}

TEST_CASE("fft inverts and matches the direct transform", "[field]") {
  testutil::Rng rng(13);
  std::vector<cplx> a(64);
  for (auto& z : a) z = cplx(rng.range(-1, 1), rng.range(-1, 1));

  SECTION("roundtrip") {
    auto b = a;
    fft_inplace(b, false);
    fft_inplace(b, true);
    for (std::size_t j = 0; j < a.size(); ++j)
      REQUIRE(std::abs(b[j] - a[j]) < 1e-13);
  }
  SECTION("direct DFT comparison") {
    auto b = a;
    fft_inplace(b, false);
    const auto n = a.size();
    for (std::size_t k = 0; k < n; k += 7) {
      cplx direct(0.0, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        direct += a[j] * std::polar(1.0, -2.0 * kPi * double(k) * double(j) / double(n));
      REQUIRE(std::abs(b[k] - direct) < 1e-10);
    }
  }
  SECTION("non power of two rejected") {
    std::vector<cplx> c(12);
    REQUIRE_THROWS_AS(fft_inplace(c, false), std::invalid_argument);
  }
}

TEST_CASE("spectral derivative of a gaussian", "[field]") {
  const Grid grid(20.0, 2048);
  const auto u = sample_profile(
      [](double x) { return cplx(std::exp(-0.5 * x * x), 0.0); }, grid);
  const auto du = spectral_derivative(u);
  for (std::size_t j = 0; j < grid.num_points; j += 97) {
    const double x = grid.x(j);
    const double want = -x * std::exp(-0.5 * x * x);
    REQUIRE(std::abs(du.values[j] - cplx(want, 0.0)) < 1e-9);
  }
}

TEST_CASE("l2 norms of reference profiles", "[field]") {
  // ||exp(-x^2/2)||_2 = pi^{1/4}; the integrand decays fast enough that the
  // trapezoid-on-torus quadrature is spectrally exact at this resolution.
  const Grid narrow(20.0, 2048);
  const auto gauss = sample_profile(
      [](double x) { return cplx(std::exp(-0.5 * x * x), 0.0); }, narrow);
  REQUIRE(lp_norm(gauss, 2.0) == Catch::Approx(std::pow(kPi, 0.25)).epsilon(1e-12));

  // ||1/(1+x^2)||_2 = sqrt(pi/2); algebraic decay needs the wide window.
  const Grid wide(200.0, 1 << 14);
  const auto lorentz = sample_profile(
      [](double x) { return cplx(1.0 / (1.0 + x * x), 0.0); }, wide);
  REQUIRE(lp_norm(lorentz, 2.0) ==
          Catch::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-6));

  // lp_norm_pow is the p-th power of lp_norm.
  REQUIRE(lp_norm_pow(gauss, 4.0) ==
          Catch::Approx(std::pow(lp_norm(gauss, 4.0), 4.0)).epsilon(1e-12));
}

TEST_CASE("profile sampling rejects non-finite closures", "[field]") {
  const Grid grid(5.0, 64);
  REQUIRE_THROWS_AS(
      sample_profile([](double x) { return cplx(1.0 / x, 0.0); }, grid),
      std::invalid_argument);
}

TEST_CASE("field csv roundtrip preserves values", "[field]") {
  testutil::Rng rng(99);
  const Grid grid(8.0, 128);
  const auto u = testutil::random_bump_field(rng, grid);
  std::stringstream ss;
  write_field_csv(u, ss);
  const auto back = read_field_csv(ss);
  REQUIRE(back.grid.num_points == grid.num_points);
  REQUIRE(back.grid.half_width == Catch::Approx(grid.half_width));
  for (std::size_t j = 0; j < grid.num_points; ++j)
    REQUIRE(std::abs(back.values[j] - u.values[j]) == 0.0);
}
