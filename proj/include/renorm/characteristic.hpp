#pragma once

// The characteristic functional Φ: finite products Φ_n(s, β), the limit
// modulus f(s), the renormalized phase g_r(s), the renormalized limit
// Φ(s, β, θ), and the regularized flow Φ(s, β(Λ))·exp(-is(r(Λ)+θ)/2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

#include "renorm/error.hpp"
#include "renorm/numeric.hpp"
#include "renorm/quadrature.hpp"
#include "renorm/regulator.hpp"
#include "renorm/spectrum.hpp"

namespace renorm {

using ComplexValue = std::complex<double>;

/// Controls 1-D integrals: integration window, node budget and tolerances.
struct QuadratureConfig {
  double half_width_sigmas{8.0};
  std::size_t max_nodes{1u << 20};
  double abs_tol{1e-12};
  double rel_tol{1e-10};
};

/// Value in polar form; `phase` is not reduced modulo 2π.
struct Polar {
  double modulus{1.0};
  double phase{0.0};
  ComplexValue value() const { return std::polar(modulus, phase); }
};

namespace detail {

// v − atan(v), accurate for small |v|.
inline double atan_defect(double v) {
  const double a = std::abs(v);
  if (a < 1e-2) {
    const double v2 = v * v;
    return v * v2 * (1.0 / 3 - v2 * (1.0 / 5 - v2 * (1.0 / 7 - v2 / 9)));
  }
  return v - std::atan(v);
}

}  // namespace detail

/// Φ_n(s, β) = ∏_{j≤n} (1 − is/β_j)^(-1/2) as modulus f_n(s) and phase g_n(s)/2.
inline Polar phi_n_polar(const Spectrum& spec, double s, std::size_t n) {
  if (n == 0) throw std::invalid_argument("phi_n: n must be at least 1");
  CompensatedSum<> log_mod;
  CompensatedSum<> phase;
  for (std::size_t j = 1; j <= n; ++j) {
    const double v = s / spec.beta(j);
    log_mod += std::log1p(v * v);
    phase += std::atan(v);
  }
  return {std::exp(-0.25 * log_mod.value()), 0.5 * phase.value()};
}

inline ComplexValue phi_n(const Spectrum& spec, double s, std::size_t n) {
  return phi_n_polar(spec, s, n).value();
}

/// Φ_n by direct quadrature of each Gaussian factor
/// ∫ da √(β/π) exp(−β a² + i s a²), truncated at |a| = half_width_sigmas/√β.
/// Oracle for phi_n on small n.
inline ComplexValue phi_n_quadrature(const Spectrum& spec, double s, std::size_t n,
                                     const QuadratureConfig& q = {8.0, 1u << 16, 1e-13, 1e-13}) {
  if (n == 0) throw std::invalid_argument("phi_n_quadrature: n must be at least 1");
  const double h = q.half_width_sigmas;
  ComplexValue product{1.0, 0.0};
  for (std::size_t j = 1; j <= n; ++j) {
    // With x = √β·a the factor is (2/√π) ∫_0^h exp(−(1 − i s/β) x²) dx.
    const double w = s / spec.beta(j);
    const ComplexValue rate{1.0, -w};
    auto integrand = [&](double x) { return std::exp(-rate * (x * x)); };
    const double cycles = std::abs(w) * h * h / (2.0 * kPi);
    quadrature::Options opt;
    opt.abs_tol = q.abs_tol;
    opt.rel_tol = q.rel_tol;
    opt.max_nodes = q.max_nodes;
    opt.initial_panels = std::max<std::size_t>(4, static_cast<std::size_t>(2.0 * cycles) + 1);
    const auto res = quadrature::integrate(integrand, 0.0, h, opt);
    product *= res.value * (2.0 / std::sqrt(kPi));
  }
  return product;
}

/// L(s) = Σ ln(1 + s²w_j²) and D(s) = Σ (s w_j − atan(s w_j)) over truncated
/// weights, each as a rigorous interval.
///
/// The tails use ln(1+u) ∈ [u − u²/2, u − u²/2 + u³/3] and, for v ≥ 0,
/// v − atan v ∈ [v³/3 − v⁵/5, v³/3].
struct LogPhaseSums {
  Interval log_modulus;
  Interval defect;
};

inline LogPhaseSums log_phase_sums(const TruncatedWeights& w, double s) {
  CompensatedSum<> log_mod;
  CompensatedSum<> defect;
  for (auto it = w.head.rbegin(); it != w.head.rend(); ++it) {
    const double v = s * *it;
    log_mod += std::log1p(v * v);
    defect += detail::atan_defect(v);
  }
  const auto& t = w.tail;
  const double a = std::abs(s);
  const double s2 = a * a;
  const double s3 = s2 * a;
  const double s4 = s2 * s2;
  const double s5 = s4 * a;
  const double s6 = s3 * s3;
  const double lm = log_mod.value();
  const double df = defect.value();
  Interval log_tail{s2 * t[2].lo - 0.5 * s4 * t[4].hi, s2 * t[2].hi - 0.5 * s4 * t[4].lo + s6 * t[6].hi / 3.0};
  log_tail.lo = std::max(0.0, log_tail.lo);
  Interval def_tail{std::max(0.0, s3 * t[3].lo / 3.0 - s5 * t[5].hi / 5.0), s3 * t[3].hi / 3.0};
  if (s < 0) def_tail = {-def_tail.hi, -def_tail.lo};
  return {{lm + log_tail.lo, lm + log_tail.hi}, {df + def_tail.lo, df + def_tail.hi}};
}

namespace detail {

// Doubles the head length until both tail intervals at |s| = s_max have
// radius ≤ tol (and, when `phase_tol_b1` is set, s_max·radius(T_1) ≤ tol).
template <typename Source>
TruncatedWeights truncate_for(const Source& source, std::size_t start, double s_max, double tol,
                              bool phase_tol_b1) {
  std::size_t n = std::max<std::size_t>(start, 16);
  for (;;) {
    TruncatedWeights w = truncate(source, n);
    const auto sums = log_phase_sums(w, s_max);
    bool ok = sums.log_modulus.radius() <= tol && sums.defect.radius() <= tol;
    if (phase_tol_b1) ok = ok && s_max * w.tail[1].radius() <= tol;
    if (ok) return w;
    if (n > (std::size_t{1} << 28))
      throw NoConvergence("truncation: tail bounds cannot reach the requested tolerance");
    n *= 2;
  }
}

}  // namespace detail

/// f(s) and g_r(s) of a spectrum in B₂, valid for |s| ≤ s_max to within tol.
class LimitCharacteristic {
 public:
  LimitCharacteristic(const Spectrum& spec, double s_max, double tol) : s_max_(std::abs(s_max)) {
    if (!spec.in_class(2)) throw DivergentSum("limit characteristic requires a spectrum in B_2");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    weights_ = detail::truncate_for(spec, spec.head_size(), s_max_, tol, false);
  }

  double s_max() const { return s_max_; }

  /// f(s) = ∏ (1 + s²/β_j²)^(-1/4).
  double f(double s) const { return std::exp(-0.25 * sums(s).log_modulus.mid()); }

  /// Σ_j (s/β_j − atan(s/β_j)).
  double defect(double s) const { return sums(s).defect.mid(); }

  double g_r(double s, double kappa) const { return -s * kappa + defect(s); }

  /// Φ(s, β, θ) = f(s)·exp(−i(sθ + g_r(s))/2).
  ComplexValue renormalized(double s, double kappa, double theta) const {
    const auto t = sums(s);
    return std::polar(std::exp(-0.25 * t.log_modulus.mid()), -0.5 * (s * theta - s * kappa + t.defect.mid()));
  }

 private:
  LogPhaseSums sums(double s) const {
    if (std::abs(s) > s_max_ * (1 + 1e-12))
      throw std::out_of_range("limit characteristic evaluated outside its certified range");
    return log_phase_sums(weights_, s);
  }

  double s_max_;
  TruncatedWeights weights_;
};

/// f(s) with absolute error at most tol.
inline double f_limit(const Spectrum& spec, double s, double tol = 1e-12) {
  return LimitCharacteristic(spec, s, tol).f(s);
}

/// g_r(s) = −sκ + Σ_j (s/β_j − atan(s/β_j)) with absolute error at most tol.
inline double g_r(const Spectrum& spec, double kappa, double s, double tol = 1e-12) {
  return LimitCharacteristic(spec, s, tol).g_r(s, kappa);
}

inline ComplexValue phi_renormalized(const Spectrum& spec, double kappa, double s, double theta,
                                     double tol = 1e-12) {
  return LimitCharacteristic(spec, s, tol).renormalized(s, kappa, theta);
}

/// Φ(s, β(Λ)) at fixed Λ, with and without the renormalizing phase, for |s| ≤ s_max.
class FlowCharacteristic {
 public:
  FlowCharacteristic(const DeformedSpectrum& d, double s_max, double tol)
      : s_max_(std::abs(s_max)), r_(r_of_lambda(d)) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    weights_ = detail::truncate_for(d, d.base.head_size(), s_max_, tol, !d.reg.is_sharp());
    CompensatedSum<> b1(weights_.tail[1].mid());
    for (auto it = weights_.head.rbegin(); it != weights_.head.rend(); ++it) b1 += *it;
    b1_ = b1.value();
  }

  /// Σ_j 1/β_j(Λ).
  double b1() const { return b1_; }
  double r() const { return r_; }

  /// |Φ(s, β(Λ))|.
  double modulus(double s) const { return std::exp(-0.25 * sums(s).log_modulus.mid()); }

  /// Φ(s, β(Λ)) without renormalization: phase (s·b₁(Λ) − D(s))/2.
  ComplexValue regularized(double s) const {
    const auto t = sums(s);
    return std::polar(std::exp(-0.25 * t.log_modulus.mid()), 0.5 * (s * b1_ - t.defect.mid()));
  }

  /// Φ(s, β(Λ))·exp(−is(r(Λ) + θ)/2).
  ComplexValue renormalized(double s, double theta) const {
    const auto t = sums(s);
    return std::polar(std::exp(-0.25 * t.log_modulus.mid()),
                      0.5 * (s * (b1_ - r_) - t.defect.mid() - s * theta));
  }

 private:
  LogPhaseSums sums(double s) const {
    if (std::abs(s) > s_max_ * (1 + 1e-12))
      throw std::out_of_range("flow characteristic evaluated outside its certified range");
    return log_phase_sums(weights_, s);
  }

  double s_max_;
  double r_;
  double b1_{0.0};
  TruncatedWeights weights_;
};

inline ComplexValue phi_flow(const DeformedSpectrum& d, double s, double theta, double tol = 1e-12) {
  return FlowCharacteristic(d, s, tol).renormalized(s, theta);
}

}  // namespace renorm
