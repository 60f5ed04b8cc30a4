#pragma once

// Conserved quantities and variance machinery for one field snapshot:
//
//   mass        M   = int |u|^2
//   kinetic         = (1/2) ||u_x||^2
//   energy      E   = kinetic - int G(|u|)
//   variance    V   = int |x u|^2
//   variance_rate   V_t = 4 Im int x conj(u) u_x   (= -4 y(0))
//
// plus the standalone inequality gaps (uncertainty, weighted interpolation,
// Gagliardo-Nirenberg) used as oracles throughout the test suite.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlsb/constants.hpp"
#include "nlsb/field.hpp"
#include "nlsb/nonlinearity.hpp"

namespace nlsb {

struct Observables {
  double mass = 0.0;
  double kinetic = 0.0;
  double energy = 0.0;
  double variance = 0.0;
  double variance_rate = 0.0;
  double grad_norm_sq = 0.0;
  // Per-term c_j/(beta_j+2) ||u||_{beta_j+2}^{beta_j+2}; a single entry
  // holding int G(|u|) for the exponential series (closed form is primary).
  std::vector<double> potential_terms;
};

namespace detail {

inline void check_observable(double v, const char* name) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("observable overflow: ") + name +
                             " is not finite");
}

}  // namespace detail

inline Observables compute_observables(const FieldProfile& field,
                                       const Nonlinearity& nl) {
  Observables obs;
  const double dx = field.grid.dx();
  const FieldProfile grad = spectral_derivative(field);

  double mass = 0.0, variance = 0.0, cross = 0.0, gsq = 0.0;
  for (std::size_t j = 0; j < field.values.size(); ++j) {
    const double x = field.grid.x(j);
    const double a2 = std::norm(field.values[j]);
    mass += a2;
    variance += x * x * a2;
    gsq += std::norm(grad.values[j]);
    cross += x * (std::conj(field.values[j]) * grad.values[j]).imag();
  }
  obs.mass = mass * dx;
  obs.variance = variance * dx;
  obs.grad_norm_sq = gsq * dx;
  obs.kinetic = 0.5 * obs.grad_norm_sq;
  obs.variance_rate = 4.0 * cross * dx;

  double potential = 0.0;
  if (nl.is_exponential()) {
    double g = 0.0;
    for (const auto& v : field.values) g += nl.potential_density(std::abs(v));
    obs.potential_terms.push_back(g * dx);
    potential = obs.potential_terms.back();
  } else {
    for (const auto& t : nl.terms()) {
      const double term = t.c / (t.beta + 2.0) * lp_norm_pow(field, t.beta + 2.0);
      obs.potential_terms.push_back(term);
      potential += term;
    }
  }
  obs.energy = obs.kinetic - potential;

  detail::check_observable(obs.mass, "mass");
  detail::check_observable(obs.grad_norm_sq, "grad_norm_sq");
  detail::check_observable(obs.variance, "variance");
  detail::check_observable(obs.variance_rate, "variance_rate");
  detail::check_observable(obs.energy, "energy");
  return obs;
}

// Instantaneous right-hand side of the virial identity
//   V_tt = 8 ||u_x||^2 - 4 int W(|u|).
inline double virial_rhs(const FieldProfile& field, const Nonlinearity& nl) {
  const double dx = field.grid.dx();
  const FieldProfile grad = spectral_derivative(field);
  double gsq = 0.0, w = 0.0;
  for (std::size_t j = 0; j < field.values.size(); ++j) {
    gsq += std::norm(grad.values[j]);
    w += nl.virial_weight_density(std::abs(field.values[j]));
  }
  const double out = 8.0 * gsq * dx - 4.0 * w * dx;
  detail::check_observable(out, "virial_rhs");
  return out;
}

// ||u_x||^2 - (1/4)(M^2/V + V_t^2/(4V)); >= 0 up to quadrature roundoff,
// with equality for the Gaussian.
inline double uncertainty_gap(const FieldProfile& field) {
  const Observables obs = compute_observables(field, Nonlinearity::finite_sum({}));
  if (!(obs.variance > 0.0))
    throw std::domain_error("uncertainty_gap: degenerate field (variance is zero)");
  return obs.grad_norm_sq -
         0.25 * (obs.mass * obs.mass / obs.variance +
                 obs.variance_rate * obs.variance_rate / (4.0 * obs.variance));
}

// Gap of ||u||_2 <= (C* ||xu||^{(p-1)/2} ||u||_{p+1}^{p+1})^{2/(3p+1)}:
// returns RHS - LHS with C* = sharp_cstar(p).
inline double dr_gap(const FieldProfile& field, double p) {
  if (!(p > 1.0)) throw std::domain_error("dr_gap requires p > 1");
  const double l2 = lp_norm(field, 2.0);
  if (!(l2 > 0.0)) throw std::domain_error("dr_gap: zero field");
  double xnorm_sq = 0.0;
  for (std::size_t j = 0; j < field.values.size(); ++j) {
    const double x = field.grid.x(j);
    xnorm_sq += x * x * std::norm(field.values[j]);
  }
  xnorm_sq *= field.grid.dx();
  const double rhs = std::pow(sharp_cstar(p) *
                                  std::pow(xnorm_sq, (p - 1.0) / 4.0) *
                                  lp_norm_pow(field, p + 1.0),
                              2.0 / (3.0 * p + 1.0));
  return rhs - l2;
}

// Gap of ||u||_{p+1}^{p+1} <= c_gn ||u_x||^{(p-1)/2} ||u||_2^{(p+3)/2}.
// The sharp constant is not built in; callers supply it.
inline double gn_gap(const FieldProfile& field, double p, double c_gn) {
  if (!(p > 1.0)) throw std::domain_error("gn_gap requires p > 1");
  const double l2 = lp_norm(field, 2.0);
  if (!(l2 > 0.0)) throw std::domain_error("gn_gap: zero field");
  const FieldProfile grad = spectral_derivative(field);
  const double gnorm = lp_norm(grad, 2.0);
  return c_gn * std::pow(gnorm, (p - 1.0) / 2.0) * std::pow(l2, (p + 3.0) / 2.0) -
         lp_norm_pow(field, p + 1.0);
}

// ||x u_0|| / y_0 with y_0 = -V_t/4, reported only when y_0 > 0 (data already
// contracting).  The multiplicative constant of the underlying ODE bound is
// not specified, so the ratio is an unnormalized time scale.  y_0 below
// quadrature noise counts as absent; real data lands there.
inline std::optional<double> blowup_time_ratio(const FieldProfile& field) {
  const Observables obs = compute_observables(field, Nonlinearity::finite_sum({}));
  const double y0 = -obs.variance_rate / 4.0;
  const double noise =
      1e-12 * (1.0 + std::sqrt(obs.grad_norm_sq * obs.variance));
  if (!(y0 > noise)) return std::nullopt;
  return std::sqrt(obs.variance) / y0;
}

}  // namespace nlsb
