#pragma once

// Complex fields sampled on a uniform symmetric grid [-L, L) with N = 2^m
// nodes, plus the spectral machinery built on a radix-2 FFT: periodic
// spectral derivative and rectangle-rule L^p quadrature.  The rectangle rule
// is spectrally accurate for smooth decaying data, which is the function
// space the split-step solver works in.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "nlsb/numfmt.hpp"

namespace nlsb {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct Grid {
  double half_width = 20.0;   // L, domain [-L, L)
  std::size_t num_points = 2048;  // N, power of two

  Grid() = default;
  Grid(double L, std::size_t N) : half_width(L), num_points(N) {
    if (!(L > 0.0) || !std::isfinite(L))
      throw std::invalid_argument("grid half width must be positive and finite");
    if (N < 2 || (N & (N - 1)) != 0)
      throw std::invalid_argument("grid size must be a power of two, >= 2");
  }

  double dx() const { return 2.0 * half_width / static_cast<double>(num_points); }
  double x(std::size_t j) const {
    return -half_width + static_cast<double>(j) * dx();
  }
  // Standard symmetric wavenumber of mode m: pi * m_tilde / L with
  // m_tilde = m for m < N/2 and m - N otherwise.
  double wavenumber(std::size_t m) const {
    const auto n = static_cast<std::ptrdiff_t>(num_points);
    auto mt = static_cast<std::ptrdiff_t>(m);
    if (mt >= n / 2) mt -= n;
    return kPi * static_cast<double>(mt) / half_width;
  }
  bool operator==(const Grid& o) const {
    return half_width == o.half_width && num_points == o.num_points;
  }
};

struct FieldProfile {
  Grid grid;
  std::vector<cplx> values;
};

namespace detail {

// Twiddle tables are cached per transform size.  thread_local keeps the
// cache lock-free; scan workers each build their own copy once.
inline const std::vector<cplx>& twiddle_table(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<cplx>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> w(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    w[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  return cache.emplace(n, std::move(w)).first->second;
}

}  // namespace detail

// In-place radix-2 transform; forward uses e^{-i k x} phases, inverse divides
// by N.  Size must be a power of two.
inline void fft_inplace(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft size must be a power of two");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const auto& w = detail::twiddle_table(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx tw = w[j * stride];
        if (inverse) tw = std::conj(tw);
        const cplx u = a[i + j];
        const cplx v = a[i + j + len / 2] * tw;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= scale;
  }
}

inline FieldProfile sample_profile(const std::function<cplx(double)>& closure,
                                   const Grid& grid) {
  FieldProfile f;
  f.grid = grid;
  f.values.resize(grid.num_points);
  for (std::size_t j = 0; j < grid.num_points; ++j) {
    const cplx v = closure(grid.x(j));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("profile sample is not finite at x = " +
                                  format_double(grid.x(j)));
    f.values[j] = v;
  }
  return f;
}

inline FieldProfile spectral_derivative(const FieldProfile& field) {
  FieldProfile out;
  out.grid = field.grid;
  out.values = field.values;
  fft_inplace(out.values, false);
  for (std::size_t m = 0; m < out.values.size(); ++m)
    out.values[m] *= cplx(0.0, field.grid.wavenumber(m));
  fft_inplace(out.values, true);
  return out;
}

inline double lp_norm(const FieldProfile& field, double p) {
  if (!(p >= 1.0))
    throw std::domain_error("lp_norm requires p >= 1");
  double acc = 0.0;
  for (const auto& v : field.values) acc += std::pow(std::abs(v), p);
  return std::pow(acc * field.grid.dx(), 1.0 / p);
}

// sum_j |u_j|^p dx without the outer root; the potential terms want this.
inline double lp_norm_pow(const FieldProfile& field, double p) {
  double acc = 0.0;
  for (const auto& v : field.values) acc += std::pow(std::abs(v), p);
  return acc * field.grid.dx();
}

inline void write_field_csv(const FieldProfile& field, std::ostream& os) {
  os << "x,re_u,im_u\n";
  for (std::size_t j = 0; j < field.grid.num_points; ++j) {
    os << format_double(field.grid.x(j)) << ','
       << format_double(field.values[j].real()) << ','
       << format_double(field.values[j].imag()) << '\n';
  }
}

// Reads the CSV written above.  The grid is reconstructed from the node
// spacing; the node set must be a uniform symmetric power-of-two grid.
inline FieldProfile read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,", 0) != 0)
    throw std::runtime_error("field csv: missing header");
  std::vector<double> xs;
  std::vector<cplx> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    double col[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(ls, tok, ','))
        throw std::runtime_error("field csv: short row");
      col[c] = std::stod(tok);
    }
    xs.push_back(col[0]);
    vals.emplace_back(col[1], col[2]);
  }
  if (xs.size() < 2) throw std::runtime_error("field csv: too few rows");
  const double L = -xs.front();
  FieldProfile f;
  f.grid = Grid(L, xs.size());
  f.values = std::move(vals);
  return f;
}

}  // namespace nlsb
