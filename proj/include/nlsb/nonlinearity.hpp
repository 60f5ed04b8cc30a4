#pragma once

// Combined nonlinearities N(u) = sum_j c_j |u|^{beta_j} for the 1D focusing
// equation i u_t + u_xx + N(u) u = 0, plus the exponential series e^{|u|}.
// Focusing means c_j > 0.  Together with N itself we expose the two densities
// that drive energy and virial bookkeeping:
//
//   G(s) = sum_j c_j s^{beta_j+2} / (beta_j+2)      (energy potential)
//   W(s) = sum_j c_j beta_j s^{beta_j+2}/(beta_j+2) (virial weight)
//
// so that s G'(s) - 2 G(s) = W(s) identically.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlsb {

struct NonlinearTerm {
  double c;     // signed coefficient, c > 0 focusing
  double beta;  // power of |u|, >= 0
};

class Nonlinearity {
 public:
  enum class Kind { FiniteSum, ExponentialSeries };

  static Nonlinearity finite_sum(std::vector<NonlinearTerm> terms) {
    double prev = -1.0;
    for (const auto& t : terms) {
      if (!std::isfinite(t.c) || !std::isfinite(t.beta))
        throw std::invalid_argument("nonlinear term must be finite");
      if (t.beta < 0.0)
        throw std::invalid_argument("nonlinear exponent must be >= 0");
      if (t.beta <= prev)
        throw std::invalid_argument("nonlinear exponents must be strictly increasing");
      prev = t.beta;
    }
    Nonlinearity nl;
    nl.kind_ = Kind::FiniteSum;
    nl.terms_ = std::move(terms);
    return nl;
  }

  // e^{|u|}: coefficients 1/k!, exponents k, k >= 0.  The truncation order
  // only controls the materialized term view; evaluation is closed-form.
  // At least one supercritical power (k > 4) must be included.
  static Nonlinearity exponential_series(std::size_t truncation_order = 64) {
    if (truncation_order < 8)
      throw std::invalid_argument("exponential series truncation must be >= 8");
    Nonlinearity nl;
    nl.kind_ = Kind::ExponentialSeries;
    nl.truncation_ = truncation_order;
    nl.terms_.reserve(truncation_order + 1);
    double factorial = 1.0;
    for (std::size_t k = 0; k <= truncation_order; ++k) {
      if (k > 0) factorial *= static_cast<double>(k);
      nl.terms_.push_back({1.0 / factorial, static_cast<double>(k)});
    }
    return nl;
  }

  Kind kind() const { return kind_; }
  bool is_exponential() const { return kind_ == Kind::ExponentialSeries; }
  std::size_t truncation_order() const { return truncation_; }

  // Term view.  For the exponential series this is the materialized prefix
  // of the series (1/k!, k); consumers that need a term list (the general
  // sum criterion, config echo) read it here.
  const std::vector<NonlinearTerm>& terms() const { return terms_; }

  double eval(double s) const {
    check_argument(s);
    if (kind_ == Kind::ExponentialSeries) return std::exp(s);
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.c * pow_nonneg(s, t.beta);
    return acc;
  }

  double potential_density(double s) const {
    check_argument(s);
    if (kind_ == Kind::ExponentialSeries) {
      // (s-1)e^s + 1; series form near 0 avoids the catastrophic
      // cancellation of the closed form (result ~ s^2/2 there).
      if (s < 0.25) return exp_series_tail(s, 0);
      return (s - 1.0) * std::exp(s) + 1.0;
    }
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.c * std::pow(s, t.beta + 2.0) / (t.beta + 2.0);
    return acc;
  }

  double virial_weight_density(double s) const {
    check_argument(s);
    if (kind_ == Kind::ExponentialSeries) {
      // e^s (s^2 - 2s + 2) - 2 = s^2 e^s - 2 G(s); series form near 0.
      if (s < 0.25) return exp_series_tail(s, 1);
      return std::exp(s) * (s * s - 2.0 * s + 2.0) - 2.0;
    }
    double acc = 0.0;
    for (const auto& t : terms_)
      acc += t.c * t.beta * std::pow(s, t.beta + 2.0) / (t.beta + 2.0);
    return acc;
  }

  // s^b for s >= 0 with an exact-integer fast path; the solver evaluates N
  // once per grid point per step, where std::pow dominates everything else.
  static double pow_nonneg(double s, double b) {
    const int ib = static_cast<int>(b);
    if (static_cast<double>(ib) == b && ib >= 0 && ib <= 32) {
      double acc = 1.0, base = s;
      for (int e = ib; e > 0; e >>= 1) {
        if (e & 1) acc *= base;
        base *= base;
      }
      return acc;
    }
    return std::pow(s, b);
  }

 private:
  static void check_argument(double s) {
    if (!(s >= 0.0) || !std::isfinite(s))
      throw std::domain_error("nonlinearity argument must be finite and >= 0");
  }

  // sum_{k>=weight_start} k^{weight} s^{k+2} / (k! (k+2)) with weight 0 for G
  // and weight 1 (factor k) for W; converges to machine precision fast for
  // s < 1.
  static double exp_series_tail(double s, int weight) {
    double acc = 0.0;
    double factorial = 1.0;
    for (std::size_t k = 0; k <= 40; ++k) {
      if (k > 0) factorial *= static_cast<double>(k);
      const double w = (weight == 0) ? 1.0 : static_cast<double>(k);
      const double term = w * std::pow(s, static_cast<double>(k) + 2.0) /
                          (factorial * (static_cast<double>(k) + 2.0));
      acc += term;
      if (k > 4 && std::abs(term) < 1e-300) break;
    }
    return acc;
  }

  Kind kind_ = Kind::FiniteSum;
  std::size_t truncation_ = 0;
  std::vector<NonlinearTerm> terms_;
};

inline double eval_nonlinearity(const Nonlinearity& nl, double s) { return nl.eval(s); }

inline double potential_density(const Nonlinearity& nl, double s) {
  return nl.potential_density(s);
}

inline double virial_weight_density(const Nonlinearity& nl, double s) {
  return nl.virial_weight_density(s);
}

}  // namespace nlsb
