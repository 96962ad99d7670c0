#pragma once

// The partition functional Z. Everything except the Monte Carlo oracle goes
// through the Gaussian transform
//   T(φ)(λ) = (1/√(4πλ)) ∫ ds exp(−s²/(4λ)) φ(s).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <sstream>

#include "renorm/characteristic.hpp"
#include "renorm/error.hpp"
#include "renorm/numeric.hpp"
#include "renorm/parallel.hpp"
#include "renorm/quadrature.hpp"
#include "renorm/random.hpp"
#include "renorm/regulator.hpp"
#include "renorm/spectrum.hpp"

namespace renorm {

struct McConfig {
  std::uint64_t samples{100000};
  std::uint64_t seed{0x5EEDull};
  unsigned threads{1};
};

struct McEstimate {
  double estimate{0.0};
  double std_error{0.0};
};

struct TransformResult {
  ComplexValue value;
  double error{0.0};
  std::size_t nodes{0};
};

/// Half-width of the integration window, half_width_sigmas·√(2λ).
inline double transform_window(double lambda, const QuadratureConfig& q) {
  return q.half_width_sigmas * std::sqrt(2.0 * lambda);
}

/// T(φ)(λ) for a φ with φ(−s) = conj(φ(s)).
///
/// The integral is folded onto [0, W] as ∫ kernel·(φ(s) + φ(−s)); the
/// imaginary part of the result is a residue that must stay below abs_tol.
/// `phase_rate` bounds |d arg φ/ds| and sizes the initial partition; the
/// call fails with OscillationBudgetExceeded when the budget cannot cover it.
template <typename Phi>
TransformResult gaussian_transform(Phi&& phi, double lambda, const QuadratureConfig& q, double phase_rate) {
  if (!(lambda > 0.0)) throw std::invalid_argument("transform: lambda must be positive");
  const double window = transform_window(lambda, q);
  const double cycles = std::abs(phase_rate) * window / (2.0 * kPi);
  const auto panels = static_cast<std::size_t>(std::ceil(2.0 * cycles)) + 2;
  const std::size_t required = 4 * 15 * panels;
  if (required > q.max_nodes) {
    std::ostringstream msg;
    msg << "transform: " << cycles << " oscillations on the window need about " << required
        << " nodes, budget is " << q.max_nodes;
    throw OscillationBudgetExceeded(msg.str(), required);
  }
  const double norm = 1.0 / std::sqrt(4.0 * kPi * lambda);
  auto integrand = [&](double s) {
    return norm * std::exp(-s * s / (4.0 * lambda)) * (phi(s) + phi(-s));
  };
  quadrature::Options opt;
  opt.abs_tol = q.abs_tol;
  opt.rel_tol = q.rel_tol;
  opt.max_nodes = q.max_nodes;
  opt.initial_panels = panels;
  const auto res = quadrature::integrate(integrand, 0.0, window, opt);
  if (std::abs(res.value.imag()) >= q.abs_tol) {
    std::ostringstream msg;
    msg << "transform: imaginary residue " << res.value.imag() << " exceeds abs_tol " << q.abs_tol;
    throw QuadratureFailure(msg.str(), std::abs(res.value.imag()));
  }
  return {res.value, res.error, res.nodes};
}

/// c_n = Σ_{j≤n} 1/β_j.
inline double c_n(const Spectrum& spec, std::size_t n) {
  CompensatedSum<> acc;
  for (std::size_t j = n; j >= 1; --j) acc += 1.0 / spec.beta(j);
  return acc.value();
}

/// Z_n(λ, β) = T(Φ_n)(λ).
inline double z_n(const Spectrum& spec, double lambda, std::size_t n, const QuadratureConfig& q = {}) {
  if (n == 0) throw std::invalid_argument("z_n: n must be at least 1");
  auto phi = [&](double s) { return phi_n(spec, s, n); };
  return gaussian_transform(phi, lambda, q, 0.5 * c_n(spec, n)).value.real();
}

/// Upper bound on |Z_n| from integrating the derivative estimate by parts:
/// (2/c_n)·(E|s|/(2λ) + E|s|·b₂/2 + E s²·b₂/(2μ)) with E|s| = 2√(λ/π) and
/// E s² = 2λ under the transform kernel.
inline double z_n_bound(const Spectrum& spec, double lambda, std::size_t n) {
  if (!(lambda > 0.0)) throw std::invalid_argument("z_n_bound: lambda must be positive");
  const double b2 = b_sum(spec, 2, 1e-13);
  const double m = spec.mu();
  const double e_abs = 2.0 * std::sqrt(lambda / kPi);
  const double e_sq = 2.0 * lambda;
  return (2.0 / c_n(spec, n)) * (e_abs / (2.0 * lambda) + e_abs * b2 / 2.0 + e_sq * b2 / (2.0 * m));
}

/// Monte Carlo estimate of Z_n from its defining Gaussian integral:
/// a_j ~ N(0, 1/(2β_j)), averaging exp(−λ (Σ a_j²)²).
/// Deterministic in (seed, samples) whatever the thread count.
inline McEstimate z_mc_oracle(const Spectrum& spec, double lambda, std::size_t n, const McConfig& mc) {
  if (n == 0 || n > 64) throw std::invalid_argument("z_mc_oracle: n must lie in [1, 64]");
  if (lambda < 0.0) throw std::invalid_argument("z_mc_oracle: lambda must be nonnegative");
  if (mc.samples < 2) throw std::invalid_argument("z_mc_oracle: need at least two samples");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = 1.0 / std::sqrt(2.0 * spec.beta(j + 1));
  const CounterRng rng(mc.seed);

  struct Partial {
    CompensatedSum<> sum;
    CompensatedSum<> sum_sq;
  };
  constexpr std::uint64_t kBatches = 64;
  const auto partials = parallel_map(kBatches, mc.threads, [&](std::size_t b) {
    Partial part;
    const std::uint64_t begin = mc.samples * b / kBatches;
    const std::uint64_t end = mc.samples * (b + 1) / kBatches;
    for (std::uint64_t i = begin; i < end; ++i) {
      double s1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double a = sigma[j] * rng.normal(i * n + j);
        s1 += a * a;
      }
      const double x = std::exp(-lambda * s1 * s1);
      part.sum += x;
      part.sum_sq += x * x;
    }
    return part;
  });

  CompensatedSum<> sum;
  CompensatedSum<> sum_sq;
  for (const auto& p : partials) {
    sum += p.sum.value();
    sum_sq += p.sum_sq.value();
  }
  const double count = static_cast<double>(mc.samples);
  const double mean = sum.value() / count;
  const double var = std::max(0.0, (sum_sq.value() - count * mean * mean) / (count - 1.0));
  return {mean, std::sqrt(var / count)};
}

namespace detail {

inline double inner_tolerance(const QuadratureConfig& q) { return 0.1 * q.abs_tol; }

}  // namespace detail

/// Z(λ, β, θ) = (1/√(πλ)) ∫_0^∞ ds exp(−s²/(4λ)) f(s) cos(sθ/2 + g_r(s)/2).
inline double z_renormalized(const Spectrum& spec, double kappa, double lambda, double theta,
                             const QuadratureConfig& q = {}) {
  if (!(lambda > 0.0)) throw std::invalid_argument("z_renormalized: lambda must be positive");
  const double window = transform_window(lambda, q);
  const LimitCharacteristic lc(spec, window, detail::inner_tolerance(q));
  const double norm = 1.0 / std::sqrt(kPi * lambda);
  auto integrand = [&](double s) {
    return norm * std::exp(-s * s / (4.0 * lambda)) * lc.f(s) * std::cos(0.5 * (s * theta + lc.g_r(s, kappa)));
  };
  // The renormalized phase grows like s·(|θ − κ| + b₂·s/μ)/2 at most.
  const double rate = 0.5 * (std::abs(theta - kappa) + b_sum(spec, 2, 1e-10) * window / spec.mu());
  const double cycles = rate * window / (2.0 * kPi);
  quadrature::Options opt;
  opt.abs_tol = q.abs_tol;
  opt.rel_tol = q.rel_tol;
  opt.max_nodes = q.max_nodes;
  opt.initial_panels = static_cast<std::size_t>(std::ceil(2.0 * cycles)) + 2;
  if (4 * 15 * opt.initial_panels > q.max_nodes)
    throw OscillationBudgetExceeded("z_renormalized: node budget too small for the phase", 4 * 15 * opt.initial_panels);
  return quadrature::integrate(integrand, 0.0, window, opt).value;
}

/// T applied to Φ(s, β, θ) through the generic folded transform. Equals
/// z_renormalized; kept separate as an independent evaluation route.
inline TransformResult z_renormalized_transform(const Spectrum& spec, double kappa, double lambda, double theta,
                                                const QuadratureConfig& q = {}) {
  const double window = transform_window(lambda, q);
  const LimitCharacteristic lc(spec, window, detail::inner_tolerance(q));
  auto phi = [&](double s) { return lc.renormalized(s, kappa, theta); };
  const double rate = 0.5 * (std::abs(theta - kappa) + b_sum(spec, 2, 1e-10) * window / spec.mu());
  return gaussian_transform(phi, lambda, q, rate);
}

/// (1/√(4πλ)) ∫ ds kernel·Φ(s, β(Λ))·exp(−is(r(Λ)+θ)/2).
inline double z_flow(const DeformedSpectrum& d, double lambda, double theta, const QuadratureConfig& q = {}) {
  const double window = transform_window(lambda, q);
  const FlowCharacteristic fc(d, window, detail::inner_tolerance(q));
  auto phi = [&](double s) { return fc.renormalized(s, theta); };
  const double rate = 0.5 * (std::abs(fc.b1() - fc.r() - theta) +
                             b_sum(d.base, 2, 1e-10) * window / d.base.mu());
  return gaussian_transform(phi, lambda, q, rate).value.real();
}

/// Same transform without the renormalizing phase: T(Φ(·, β(Λ)))(λ).
inline double z_regularized(const DeformedSpectrum& d, double lambda, const QuadratureConfig& q = {}) {
  const double window = transform_window(lambda, q);
  const FlowCharacteristic fc(d, window, detail::inner_tolerance(q));
  auto phi = [&](double s) { return fc.regularized(s); };
  return gaussian_transform(phi, lambda, q, 0.5 * fc.b1()).value.real();
}

}  // namespace renorm
