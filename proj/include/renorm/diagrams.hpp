#pragma once

// Exact Wick moments of the vertex S₁ = Σ a_j² as polynomials in the loop
// values b_m, the tadpole-free operator ℍ₁, shifted moments, the
// renormalization identity and numeric formal-series coefficients.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "renorm/error.hpp"
#include "renorm/moment_polynomial.hpp"
#include "renorm/parallel.hpp"

namespace renorm {

namespace detail {

inline mpz_class binomial(unsigned n, unsigned k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline mpz_class factorial(unsigned n) {
  mpz_class out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

inline void check_order(unsigned k, unsigned limit, const char* what) {
  if (k > limit) throw std::invalid_argument(std::string(what) + ": order above the supported limit");
}

}  // namespace detail

/// ℍ(S₁^0), ..., ℍ(S₁^k) by the cumulant recurrence
/// ℍ(S₁^k) = Σ_{m=1..k} C(k−1, m−1)·((m−1)!·b_m/2)·ℍ(S₁^{k−m}).
inline std::vector<MomentPolynomial> wick_moments(unsigned k) {
  detail::check_order(k, 60, "wick_moment");
  std::vector<MomentPolynomial> h;
  h.reserve(k + 1);
  h.push_back(MomentPolynomial::one());
  for (unsigned n = 1; n <= k; ++n) {
    MomentPolynomial acc;
    for (unsigned m = 1; m <= n; ++m) {
      const mpq_class weight(detail::binomial(n - 1, m - 1) * detail::factorial(m - 1), 2);
      acc += (MomentPolynomial::loop(m) * h[n - m]) * weight;
    }
    h.push_back(std::move(acc));
  }
  return h;
}

inline MomentPolynomial wick_moment(unsigned k) { return wick_moments(k).back(); }

/// Outcome of enumerating every perfect matching of the 2k half-lines.
struct PairingCensus {
  std::uint64_t matchings{0};
  /// Loop-length multiset (sorted descending) → number of matchings.
  std::map<std::vector<unsigned>, std::uint64_t> by_loops;
};

namespace detail {

class PairingWalker {
 public:
  explicit PairingWalker(unsigned k) : k_(k), mate_(2 * k, -1) {}

  void fix(unsigned a, unsigned b) {
    mate_[a] = static_cast<int>(b);
    mate_[b] = static_cast<int>(a);
  }

  void run(PairingCensus& out) {
    unsigned first = 0;
    while (first < 2 * k_ && mate_[first] >= 0) ++first;
    if (first == 2 * k_) {
      record(out);
      return;
    }
    for (unsigned other = first + 1; other < 2 * k_; ++other) {
      if (mate_[other] >= 0) continue;
      fix(first, other);
      run(out);
      mate_[first] = mate_[other] = -1;
    }
  }

 private:
  // Half-lines 2v and 2v+1 belong to vertex v. Following a line and then the
  // sibling half-line traces one closed loop.
  void record(PairingCensus& out) const {
    std::vector<bool> seen(k_, false);
    std::vector<unsigned> loops;
    for (unsigned v = 0; v < k_; ++v) {
      if (seen[v]) continue;
      unsigned length = 0;
      unsigned h = 2 * v;
      do {
        seen[h / 2] = true;
        ++length;
        h = static_cast<unsigned>(mate_[h]) ^ 1u;
      } while (h != 2 * v);
      loops.push_back(length);
    }
    std::sort(loops.rbegin(), loops.rend());
    ++out.matchings;
    ++out.by_loops[loops];
  }

  unsigned k_;
  std::vector<int> mate_;
};

}  // namespace detail

/// Enumerates all (2k−1)!! matchings, split over the partner of half-line 0.
inline PairingCensus enumerate_pairings(unsigned k, unsigned threads = 1) {
  detail::check_order(k, 8, "wick_moment_bruteforce");
  PairingCensus total;
  if (k == 0) {
    total.matchings = 1;
    total.by_loops[{}] = 1;
    return total;
  }
  const auto parts = parallel_map(2 * k - 1, threads, [k](std::size_t i) {
    PairingCensus part;
    detail::PairingWalker walker(k);
    walker.fix(0, static_cast<unsigned>(i + 1));
    walker.run(part);
    return part;
  });
  for (const auto& part : parts) {
    total.matchings += part.matchings;
    for (const auto& [loops, count] : part.by_loops) total.by_loops[loops] += count;
  }
  return total;
}

/// ℍ(S₁^k) summed over pairings: an ℓ-loop contributes b_ℓ/2^ℓ.
inline MomentPolynomial moment_from_census(const PairingCensus& census) {
  MomentPolynomial out;
  for (const auto& [loops, count] : census.by_loops) {
    MomentPolynomial term = MomentPolynomial::constant(mpq_class(mpz_class(std::to_string(count))));
    for (unsigned l : loops) {
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 2, l);
      term = term * (MomentPolynomial::loop(l) * mpq_class(1, den));
    }
    out += term;
  }
  return out;
}

inline MomentPolynomial wick_moment_bruteforce(unsigned k, unsigned threads = 1) {
  return moment_from_census(enumerate_pairings(k, threads));
}

/// ℍ₁(S₁^k): ℍ(S₁^k) with every b₁ term removed.
inline MomentPolynomial h1_moment(unsigned k) { return wick_moment(k).without_b1(); }

enum class MomentOperator { H, H1 };

/// Op((S₁ − ζ)^n) = Σ_j C(n, j)·Op(S₁^j)·(−ζ)^{n−j}.
inline MomentPolynomial shifted_moment(MomentOperator op, unsigned n) {
  const auto h = wick_moments(n);
  const MomentPolynomial minus_zeta = MomentPolynomial::zeta() * mpq_class(-1);
  MomentPolynomial out;
  MomentPolynomial power = MomentPolynomial::one();  // (−ζ)^{n−j}, built from j = n downwards
  for (unsigned j = n + 1; j-- > 0;) {
    const MomentPolynomial& moment = op == MomentOperator::H ? h[j] : h[j].without_b1();
    out += (moment * power) * mpq_class(detail::binomial(n, j));
    power = power * minus_zeta;
  }
  return out;
}

/// Checks ℍ((S₁ − ζ)^n) = ℍ₁((S₁ + ξ − ζ)^n) with ξ = b₁/2, exactly.
inline bool verify_renorm_identity(unsigned n) {
  detail::check_order(n, 20, "verify_renorm_identity");
  const auto h = wick_moments(n);
  const MomentPolynomial shift = MomentPolynomial::loop(1) * mpq_class(1, 2) - MomentPolynomial::zeta();
  MomentPolynomial rhs;
  MomentPolynomial power = MomentPolynomial::one();  // (ξ − ζ)^{n−i}
  for (unsigned i = n + 1; i-- > 0;) {
    rhs += (h[i].without_b1() * power) * mpq_class(detail::binomial(n, i));
    power = power * shift;
  }
  return shifted_moment(MomentOperator::H, n) == rhs;
}

/// Numeric loop value b_m; Infinite is a tag, never a float.
class LoopValue {
 public:
  static LoopValue finite(double v) { return LoopValue(false, v); }
  static LoopValue infinite() { return LoopValue(true, 0.0); }

  bool is_infinite() const { return infinite_; }
  double value() const {
    if (infinite_) throw InfiniteCoefficient("loop value is infinite");
    return value_;
  }

 private:
  LoopValue(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_;
  double value_;
};

enum class SeriesKind { PhiSeries, ZSeries, PhiRenormSeries, ZRenormSeries };

/// Exact value of p at the given loop values (index m−1 holds b_m) and ζ.
inline mpq_class evaluate(const MomentPolynomial& p, const std::vector<LoopValue>& b, const mpq_class& zeta) {
  mpq_class total = 0;
  for (const auto& [e, c] : p.terms()) {
    mpq_class term = c;
    for (std::size_t m = 1; m < e.size(); ++m) {
      if (e[m] == 0) continue;
      if (m > b.size()) throw std::invalid_argument("evaluate: missing loop value b" + std::to_string(m));
      if (b[m - 1].is_infinite())
        throw InfiniteCoefficient("coefficient contains the infinite loop value b" + std::to_string(m));
      const mpq_class v(b[m - 1].value());
      for (std::uint32_t r = 0; r < e[m]; ++r) term *= v;
    }
    for (std::uint32_t r = 0; r < MomentPolynomial::zeta_degree(e); ++r) term *= zeta;
    total += term;
  }
  return total;
}

/// Coefficients 0..order of the requested formal series.
///
/// PhiSeries: ℍ(S₁^j)/j!; ZSeries: ℍ(S₁^{2j})/j!; the renormalized kinds use
/// ℍ₁((S₁ + δ)^j)/j! (resp. power 2j) with δ = `zeta_value`.
inline std::vector<double> series_coefficients(SeriesKind kind, unsigned order, const std::vector<LoopValue>& numeric_b,
                                               double zeta_value) {
  const bool doubled = kind == SeriesKind::ZSeries || kind == SeriesKind::ZRenormSeries;
  const bool renormalized = kind == SeriesKind::PhiRenormSeries || kind == SeriesKind::ZRenormSeries;
  const unsigned top = doubled ? 2 * order : order;
  const auto h = wick_moments(top);
  const mpq_class delta(zeta_value);

  std::vector<double> out;
  out.reserve(order + 1);
  for (unsigned j = 0; j <= order; ++j) {
    const unsigned power = doubled ? 2 * j : j;
    mpq_class value;
    if (!renormalized) {
      value = evaluate(h[power], numeric_b, 0);
    } else {
      // ℍ₁((S₁ + δ)^p) = Σ_i C(p, i)·ℍ₁(S₁^i)·δ^{p−i}
      mpq_class delta_power = 1;
      for (unsigned i = power + 1; i-- > 0;) {
        value += mpq_class(detail::binomial(power, i)) * evaluate(h[i].without_b1(), numeric_b, 0) * delta_power;
        delta_power *= delta;
      }
    }
    value /= mpq_class(detail::factorial(j));
    out.push_back(value.get_d());
  }
  return out;
}

struct ScanRow {
  unsigned order{0};
  std::complex<double> partial_sum;
  std::complex<double> reference;
  double abs_error{0.0};
};

/// Partial sums of Σ_k (is)^k/k!·(2k)!/(k!·2^{2k}) against (1 − is)^(−1/2),
/// the single-mode β₁ = 1 characteristic function.
inline std::vector<ScanRow> partial_sum_scan(double s, unsigned max_order) {
  if (max_order == 0 || max_order > 300) throw std::invalid_argument("partial_sum_scan: max_order must lie in [1, 300]");
  const std::complex<double> reference = std::pow(std::complex<double>(1.0, -s), -0.5);
  std::vector<ScanRow> rows;
  rows.reserve(max_order + 1);
  std::complex<double> term{1.0, 0.0};
  std::complex<double> sum = term;
  rows.push_back({0, sum, reference, std::abs(sum - reference)});
  for (unsigned k = 1; k <= max_order; ++k) {
    term *= std::complex<double>(0.0, s) * (2.0 * k - 1.0) / (2.0 * k);
    sum += term;
    rows.push_back({k, sum, reference, std::abs(sum - reference)});
  }
  return rows;
}

}  // namespace renorm
