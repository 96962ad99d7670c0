#pragma once

// Regularizing functions ρ, the deformed spectrum β_j(Λ) = β_j / ρ(√(β_j/Λ)),
// and the split Σ_j 1/β_j(Λ) = r(Λ) + κ + o(1).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "renorm/error.hpp"
#include "renorm/numeric.hpp"
#include "renorm/quadrature.hpp"
#include "renorm/spectrum.hpp"

namespace renorm {

/// ρ = indicator of [0, a].
struct SharpCutoff {
  double a{1.0};
  bool operator==(const SharpCutoff&) const = default;
};

/// ρ(x) = exp(-x).
struct Exponential {
  bool operator==(const Exponential&) const = default;
};

class Regulator {
 public:
  using Kind = std::variant<SharpCutoff, Exponential>;

  Regulator() : kind_(SharpCutoff{}) {}
  Regulator(SharpCutoff s) : kind_(s) {
    if (!(s.a > 0.0) || !std::isfinite(s.a)) throw ConfigError("sharp cutoff: a must be positive");
  }
  Regulator(Exponential e) : kind_(e) {}

  const Kind& kind() const { return kind_; }
  bool is_sharp() const { return std::holds_alternative<SharpCutoff>(kind_); }
  double cutoff_a() const { return std::get<SharpCutoff>(kind_).a; }

  double rho(double x) const {
    if (const auto* s = std::get_if<SharpCutoff>(&kind_)) return x <= s->a ? 1.0 : 0.0;
    return std::exp(-x);
  }

  bool operator==(const Regulator&) const = default;

 private:
  Kind kind_;
};

/// A deformed value β_j(Λ); infinite when ρ vanishes (reciprocal 0).
class DeformedValue {
 public:
  static DeformedValue finite(double v) { return DeformedValue(v); }
  static DeformedValue infinite() { return DeformedValue(); }

  bool is_infinite() const { return !value_.has_value(); }
  double value() const {
    if (!value_) throw std::logic_error("deformed value is infinite");
    return *value_;
  }
  double reciprocal() const { return value_ ? 1.0 / *value_ : 0.0; }

 private:
  DeformedValue() = default;
  explicit DeformedValue(double v) : value_(v) {}
  std::optional<double> value_;
};

struct DeformedSpectrum {
  Spectrum base;
  Regulator reg;
  double Lambda{1.0};
};

namespace detail {

inline DeformedValue deform(double beta, const Regulator& reg, double Lambda) {
  if (const auto* s = std::get_if<SharpCutoff>(&reg.kind())) {
    // ρ(√(β/Λ)) = 1  ⇔  β ≤ a²Λ (closed interval).
    return beta <= s->a * s->a * Lambda ? DeformedValue::finite(beta) : DeformedValue::infinite();
  }
  const double x = std::sqrt(beta / Lambda);
  const double grown = beta * std::exp(x);
  if (!std::isfinite(grown)) return DeformedValue::infinite();
  return DeformedValue::finite(grown);
}

// Largest tail index j with c·j^p ≤ a²Λ.
inline std::size_t sharp_tail_end(const Spectrum& spec, double a, double Lambda) {
  const double bound = a * a * Lambda;
  const double c = spec.tail_c();
  const double p = spec.tail_p();
  double est = std::floor(std::pow(bound / c, 1.0 / p));
  if (est > 1e15) throw NoConvergence("sharp cutoff: cutoff index exceeds the supported range");
  auto n = static_cast<std::size_t>(std::max(0.0, est));
  while (n > 0 && c * std::pow(static_cast<double>(n), p) > bound) --n;
  while (c * std::pow(static_cast<double>(n + 1), p) <= bound) ++n;
  return n;
}

}  // namespace detail

/// β_j(Λ) for j ≥ 1.
inline DeformedValue deformed_beta(const DeformedSpectrum& d, std::size_t j) {
  return detail::deform(d.base.beta(j), d.reg, d.Lambda);
}

/// Reciprocals w_j = 1/β_j(Λ) split into an explicit head j ≤ n and bracketed
/// tail power sums T_q = Σ_{j>n} w_j^q for q = 1..kMaxPower.
struct TruncatedWeights {
  static constexpr int kMaxPower = 6;
  std::vector<double> head;
  std::array<Interval, kMaxPower + 1> tail{};  // index q; tail[0] unused
  double tail_sup{0.0};                        // sup_{j>n} w_j
};

/// Truncation of the undeformed spectrum. Powers with q·p ≤ 1 get an
/// infinite bracket.
inline TruncatedWeights truncate(const Spectrum& spec, std::size_t n) {
  n = std::max(n, spec.head_size());
  TruncatedWeights w;
  w.head.resize(n);
  for (std::size_t j = 1; j <= n; ++j) w.head[j - 1] = 1.0 / spec.beta(j);
  for (int q = 1; q <= TruncatedWeights::kMaxPower; ++q) w.tail[q] = tail_bracket(spec, q, n);
  w.tail_sup = 1.0 / spec.beta(n + 1);
  return w;
}

namespace detail {

// ∫_x^∞ w(t)^q dt for the exponential-regulated power tail
// w(t) = exp(-√(c t^p/Λ)) / (c t^p), evaluated in the variable v = ln u,
// u = √(c t^p / Λ).
inline double exponential_tail_integral(double c, double p, double Lambda, int q, double x) {
  const double u0 = std::sqrt(c * std::pow(x, p) / Lambda);
  const double qd = static_cast<double>(q);
  const double a = 2.0 / p - 2.0 * qd;  // integrand u^(a-1) e^{-q u} du = u^a e^{-q u} dv
  const double v0 = std::log(u0);
  const double v1 = std::log(u0 + 80.0 / qd);
  // Factor out the value at the lower end for a well-scaled integrand.
  auto integrand = [&](double v) {
    const double u = std::exp(v);
    return std::exp(a * (v - v0) - qd * (u - u0));
  };
  quadrature::Options opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = 1e-13;
  opt.max_nodes = 1u << 16;
  opt.initial_panels = 8;
  const double core = quadrature::integrate(integrand, v0, v1, opt).value;
  const double log_prefactor = std::log(2.0 / p) + std::log(Lambda / c) / p - qd * std::log(Lambda) +
                               a * v0 - qd * u0;
  return std::exp(log_prefactor) * core;
}

}  // namespace detail

/// Truncation of the deformed spectrum at head length n.
inline TruncatedWeights truncate(const DeformedSpectrum& d, std::size_t n) {
  const Spectrum& spec = d.base;
  n = std::max(n, spec.head_size());
  TruncatedWeights w;
  w.head.resize(n);
  for (std::size_t j = 1; j <= n; ++j) w.head[j - 1] = deformed_beta(d, j).reciprocal();

  if (d.reg.is_sharp()) {
    const std::size_t end = std::max(n, detail::sharp_tail_end(spec, d.reg.cutoff_a(), d.Lambda));
    std::array<CompensatedSum<>, TruncatedWeights::kMaxPower + 1> sums{};
    for (std::size_t j = end; j > n; --j) {
      const double r = 1.0 / spec.beta(j);
      double pw = 1.0;
      for (int q = 1; q <= TruncatedWeights::kMaxPower; ++q) {
        pw *= r;
        sums[q] += pw;
      }
    }
    for (int q = 1; q <= TruncatedWeights::kMaxPower; ++q) {
      const double v = sums[q].value();
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() * v;
      w.tail[q] = {v - slack, v + slack};
    }
    w.tail_sup = end > n ? 1.0 / spec.beta(n + 1) : 0.0;
    return w;
  }

  // Exponential: w(t)^q is convex and decreasing for p ≤ 2, which gives the
  // midpoint/trapezoid bracket; otherwise fall back to the monotone bracket.
  const double c = spec.tail_c();
  const double p = spec.tail_p();
  const double nd = static_cast<double>(n);
  auto wq = [&](double t, int q) {
    const double beta = c * std::pow(t, p);
    return std::pow(std::exp(-std::sqrt(beta / d.Lambda)) / beta, q);
  };
  for (int q = 1; q <= TruncatedWeights::kMaxPower; ++q) {
    if (p <= 2.0) {
      const double hi = detail::exponential_tail_integral(c, p, d.Lambda, q, nd + 0.5);
      const double lo = detail::exponential_tail_integral(c, p, d.Lambda, q, nd + 1.0) + 0.5 * wq(nd + 1.0, q);
      w.tail[q] = {std::min(lo, hi), std::max(lo, hi)};
    } else {
      const double hi = detail::exponential_tail_integral(c, p, d.Lambda, q, nd);
      const double lo = detail::exponential_tail_integral(c, p, d.Lambda, q, nd + 1.0);
      w.tail[q] = {lo, hi};
    }
  }
  w.tail_sup = deformed_beta(d, n + 1).reciprocal();
  return w;
}

/// Σ_j 1/β_j(Λ) with absolute error at most tol.
inline double deformed_b1(const DeformedSpectrum& d, double tol = 1e-12) {
  if (d.reg.is_sharp()) {
    const std::size_t end =
        std::max(d.base.head_size(), detail::sharp_tail_end(d.base, d.reg.cutoff_a(), d.Lambda));
    CompensatedSum<> acc;
    for (std::size_t j = end; j >= 1; --j) acc += deformed_beta(d, j).reciprocal();
    return acc.value();
  }
  std::size_t n = std::max<std::size_t>(d.base.head_size(), 64);
  TruncatedWeights w = truncate(d, n);
  while (w.tail[1].radius() > 0.5 * tol) {
    if (n > (std::size_t{1} << 30))
      throw NoConvergence("deformed_b1: tail bracket cannot reach the requested tolerance");
    n *= 2;
    w = truncate(d, n);
  }
  CompensatedSum<> acc(w.tail[1].mid());
  for (auto it = w.head.rbegin(); it != w.head.rend(); ++it) acc += *it;
  return acc.value();
}

/// Singular part r(Λ) of Σ_j 1/β_j(Λ); carries no constant term.
inline double r_of_lambda(const DeformedSpectrum& d) {
  const double c = d.base.tail_c();
  const double p = d.base.tail_p();
  if (p > 1.0) return 0.0;
  if (p == 1.0) return std::log(d.Lambda) / c;
  if (d.reg.is_sharp()) {
    const double a = d.reg.cutoff_a();
    const double n = std::pow(a * a * d.Lambda / c, 1.0 / p);
    return std::pow(n, 1.0 - p) / ((1.0 - p) * c);
  }
  std::ostringstream msg;
  msg << "r(Lambda): no closed form for the exponential regulator with tail exponent p = " << p;
  throw UnsupportedRegulatorTail(msg.str());
}

namespace detail {

// One sweep of Aitken's Δ² over a sequence; entries whose second difference
// is lost in rounding are passed through unchanged.
inline std::vector<double> aitken_sweep(const std::vector<double>& e) {
  std::vector<double> out;
  for (std::size_t i = 2; i < e.size(); ++i) {
    const double d1 = e[i] - e[i - 1];
    const double d0 = e[i - 1] - e[i - 2];
    const double denom = d1 - d0;
    const bool usable = std::abs(denom) > 64 * std::numeric_limits<double>::epsilon() * std::abs(e[i]) &&
                        std::abs(d1) < std::abs(d0);
    out.push_back(usable ? e[i] - d1 * d1 / denom : e[i]);
  }
  return out;
}

}  // namespace detail

struct KappaOptions {
  double tol{1e-9};
  std::size_t base_index{1024};  // cutoff index at the first grid point
  int max_doublings{16};
  int max_aitken_levels{3};
};

/// κ = lim_{Λ→∞} (Σ 1/β_j(Λ) − r(Λ)), extrapolated on a geometric Λ-grid.
///
/// Grid points are placed where the cutoff index N in c·N^p = a²Λ is the
/// integer base_index·2^k, so the estimates carry no floor() jitter.
/// The raw estimates are accelerated by iterated Aitken Δ²; the deepest
/// level with two entries is accepted once those entries agree within tol.
inline double kappa(const Spectrum& spec, const Regulator& reg, const KappaOptions& opt = {}) {
  const double c = spec.tail_c();
  const double p = spec.tail_p();
  const double scale = reg.is_sharp() ? reg.cutoff_a() * reg.cutoff_a() : 1.0;
  const double n0 = static_cast<double>(std::max(opt.base_index, 2 * spec.head_size() + 2));

  std::vector<double> raw;
  for (int k = 0; k <= opt.max_doublings; ++k) {
    const double n = n0 * std::ldexp(1.0, k);
    const double Lambda = c * std::pow(n, p) / scale;
    const DeformedSpectrum d{spec, reg, Lambda};
    raw.push_back(deformed_b1(d, 0.01 * opt.tol) - r_of_lambda(d));

    std::vector<double> level = raw;
    for (int l = 0; l < opt.max_aitken_levels && level.size() >= 4; ++l) level = detail::aitken_sweep(level);
    if (raw.size() >= 4 && level.size() >= 2 && std::abs(level.back() - level[level.size() - 2]) < opt.tol)
      return level.back();
  }
  std::ostringstream msg;
  msg << "kappa: estimates did not stabilise within " << opt.tol << " after " << opt.max_doublings
      << " doublings";
  throw NoConvergence(msg.str());
}

inline void to_json(nlohmann::json& j, const Regulator& reg) {
  if (reg.is_sharp())
    j = {{"kind", "sharp_cutoff"}, {"a", reg.cutoff_a()}};
  else
    j = {{"kind", "exponential"}};
}

inline void from_json(const nlohmann::json& j, Regulator& reg) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sharp_cutoff")
      reg = Regulator(SharpCutoff{j.value("a", 1.0)});
    else if (kind == "exponential")
      reg = Regulator(Exponential{});
    else
      throw ConfigError("regulator: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("regulator descriptor: ") + e.what());
  }
}

}  // namespace renorm
