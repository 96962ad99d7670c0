#pragma once

// Positive sequences β = {β_j} with power-law tails, their inverse-power
// sums b_k(β), minimum μ(β) and class membership B_k.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "renorm/error.hpp"
#include "renorm/numeric.hpp"

namespace renorm {

/// β_j = c·j^p.
struct PowerLaw {
  double c{1.0};
  double p{1.0};
  bool operator==(const PowerLaw&) const = default;
};

/// β_j = head[j-1] for j ≤ head.size(), tail_c·j^tail_p afterwards.
struct ExplicitWithTail {
  std::vector<double> head;
  double tail_c{1.0};
  double tail_p{1.0};
  bool operator==(const ExplicitWithTail&) const = default;
};

class Spectrum {
 public:
  using Family = std::variant<PowerLaw, ExplicitWithTail>;

  Spectrum() : Spectrum(PowerLaw{}) {}
  Spectrum(PowerLaw law) : family_(law) { validate(); }
  Spectrum(ExplicitWithTail law) : family_(std::move(law)) { validate(); }

  static Spectrum harmonic() { return Spectrum(PowerLaw{1.0, 1.0}); }

  const Family& family() const { return family_; }

  /// Number of explicitly listed leading values (0 for PowerLaw).
  std::size_t head_size() const {
    if (const auto* e = std::get_if<ExplicitWithTail>(&family_)) return e->head.size();
    return 0;
  }
  double tail_c() const {
    return std::visit([](const auto& f) {
      if constexpr (std::is_same_v<std::decay_t<decltype(f)>, PowerLaw>) return f.c;
      else return f.tail_c;
    }, family_);
  }
  double tail_p() const {
    return std::visit([](const auto& f) {
      if constexpr (std::is_same_v<std::decay_t<decltype(f)>, PowerLaw>) return f.p;
      else return f.tail_p;
    }, family_);
  }

  /// β_j for j ≥ 1.
  double beta(std::size_t j) const {
    if (j == 0) throw std::invalid_argument("spectrum index starts at 1");
    if (const auto* e = std::get_if<ExplicitWithTail>(&family_)) {
      if (j <= e->head.size()) return e->head[j - 1];
    }
    return tail_c() * std::pow(static_cast<double>(j), tail_p());
  }

  /// β ∈ B_k  ⇔  k·p > 1.
  bool in_class(unsigned k) const { return static_cast<double>(k) * tail_p() > 1.0; }

  /// Smallest element. The tail is increasing, so only the head and the
  /// first tail index need to be inspected.
  double mu() const {
    double m = beta(head_size() + 1);
    if (const auto* e = std::get_if<ExplicitWithTail>(&family_))
      for (double v : e->head) m = std::min(m, v);
    return m;
  }

  bool operator==(const Spectrum&) const = default;

 private:
  void validate() const {
    if (!(tail_c() > 0.0) || !std::isfinite(tail_c()))
      throw ConfigError("spectrum: tail coefficient c must be positive and finite");
    if (!(tail_p() > 0.0) || !std::isfinite(tail_p()))
      throw ConfigError("spectrum: tail exponent p must be positive and finite");
    if (const auto* e = std::get_if<ExplicitWithTail>(&family_)) {
      for (double v : e->head)
        if (!(v > 0.0) || !std::isfinite(v))
          throw ConfigError("spectrum: explicit head values must be positive and finite");
    }
  }

  Family family_;
};

/// Bracket for Σ_{j>n} (c·j^p)^(-q) when q·p > 1 and n lies in the tail.
///
/// x ↦ (c·x^p)^(-q) is convex and decreasing, so the midpoint rule bounds the
/// sum from above and the trapezoid rule from below.
inline Interval power_tail_bracket(double c, double p, double q, std::size_t n) {
  const double s = q * p;
  if (!(s > 1.0)) return {kInfinity, kInfinity};
  const double scale = std::pow(c, -q) / (s - 1.0);
  const double x_hi = static_cast<double>(n) + 0.5;
  const double x_lo = static_cast<double>(n) + 1.0;
  const double hi = scale * std::pow(x_hi, 1.0 - s);
  const double lo = scale * std::pow(x_lo, 1.0 - s) + 0.5 * std::pow(c, -q) * std::pow(x_lo, -s);
  return {lo, std::max(lo, hi)};
}

/// Σ_{j>n} β_j^(-q) for n ≥ head_size().
inline Interval tail_bracket(const Spectrum& spec, double q, std::size_t n) {
  return power_tail_bracket(spec.tail_c(), spec.tail_p(), q, std::max(n, spec.head_size()));
}

/// b_k(β) = Σ_j β_j^(-k) with absolute error at most tol.
inline double b_sum(const Spectrum& spec, unsigned k, double tol = 1e-12) {
  if (k == 0) throw std::invalid_argument("b_sum: k must be positive");
  if (!spec.in_class(k)) {
    std::ostringstream msg;
    msg << "b_" << k << " diverges: k*p = " << k * spec.tail_p() << " <= 1";
    throw DivergentSum(msg.str());
  }
  if (!(tol > 0.0)) throw std::invalid_argument("b_sum: tol must be positive");

  const double q = static_cast<double>(k);
  std::size_t n = std::max<std::size_t>(spec.head_size(), 64);
  Interval tail = tail_bracket(spec, q, n);
  while (tail.radius() > 0.5 * tol && n < (std::size_t{1} << 34)) {
    n *= 2;
    tail = tail_bracket(spec, q, n);
  }
  if (tail.radius() > 0.5 * tol)
    throw NoConvergence("b_sum: tail bracket cannot reach the requested tolerance");

  // Smallest terms first.
  CompensatedSum<> acc(tail.mid());
  for (std::size_t j = n; j >= 1; --j) acc += std::pow(spec.beta(j), -q);
  return acc.value();
}

inline double mu(const Spectrum& spec) { return spec.mu(); }
inline bool in_class(const Spectrum& spec, unsigned k) { return spec.in_class(k); }

// JSON descriptors: {"family":"power_law","c":1,"p":1} or
// {"family":"explicit_tail","head":[...],"tail_c":1,"tail_p":1}.

inline void to_json(nlohmann::json& j, const Spectrum& spec) {
  std::visit([&](const auto& f) {
    using F = std::decay_t<decltype(f)>;
    if constexpr (std::is_same_v<F, PowerLaw>)
      j = {{"family", "power_law"}, {"c", f.c}, {"p", f.p}};
    else
      j = {{"family", "explicit_tail"}, {"head", f.head}, {"tail_c", f.tail_c}, {"tail_p", f.tail_p}};
  }, spec.family());
}

inline void from_json(const nlohmann::json& j, Spectrum& spec) {
  try {
    const std::string family = j.at("family").get<std::string>();
    if (family == "power_law") {
      spec = Spectrum(PowerLaw{j.at("c").get<double>(), j.at("p").get<double>()});
    } else if (family == "explicit_tail") {
      spec = Spectrum(ExplicitWithTail{j.at("head").get<std::vector<double>>(),
                                       j.at("tail_c").get<double>(), j.at("tail_p").get<double>()});
    } else {
      throw ConfigError("spectrum: unknown family '" + family + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("spectrum descriptor: ") + e.what());
  }
}

}  // namespace renorm
