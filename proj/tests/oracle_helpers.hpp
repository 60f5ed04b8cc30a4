// Shared helpers for the unit and acceptance suites: a deterministic
// pseudorandom stream and random smooth decaying fields.  Tests freeze
// expected values computed by independent means (closed-form integrals,
// brute-force maximization, series identities), so nothing here may depend
// on the code under test beyond basic profile sampling.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nlsb/field.hpp"

namespace testutil {

// splitmix64: stable across platforms, unlike <random> distributions.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

// A few Gaussian bumps with random width, center, amplitude, and quadratic
// phase: smooth, decaying, and generic enough to probe inequalities.
inline nlsb::FieldProfile random_bump_field(Rng& rng, const nlsb::Grid& grid) {
  struct Bump {
    double a, x0, w, phase, chirp;
  };
  std::vector<Bump> bumps;
  const int nb = 1 + static_cast<int>(rng.next() % 3);
  for (int i = 0; i < nb; ++i)
    bumps.push_back({rng.range(0.2, 1.5), rng.range(-3.0, 3.0), rng.range(0.6, 2.0),
                     rng.range(0.0, 6.28), rng.range(-0.8, 0.8)});
  return nlsb::sample_profile(
      [bumps](double x) {
        nlsb::cplx acc(0.0, 0.0);
        for (const auto& b : bumps) {
          const double g =
              b.a * std::exp(-(x - b.x0) * (x - b.x0) / (2.0 * b.w * b.w));
          acc += std::polar(g, b.phase + b.chirp * x * x);
        }
        return acc;
      },
      grid);
}

}  // namespace testutil
