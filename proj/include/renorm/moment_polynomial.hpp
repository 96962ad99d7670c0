#pragma once

// Exact multivariate polynomials over the loop symbols b_1, b_2, ... and the
// shift symbol ζ, with arbitrary-precision rational coefficients.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

namespace renorm {

class MomentPolynomial {
 public:
  /// exps[0] is the ζ exponent, exps[m] the exponent of b_m. Trailing zeros
  /// are trimmed so equal monomials have equal keys.
  using Exponents = std::vector<std::uint32_t>;
  using Terms = std::map<Exponents, mpq_class>;

  MomentPolynomial() = default;

  static MomentPolynomial constant(const mpq_class& c) {
    MomentPolynomial p;
    p.add_term({}, c);
    return p;
  }
  static MomentPolynomial one() { return constant(1); }

  /// The loop value b_m.
  static MomentPolynomial loop(unsigned m) {
    if (m == 0) throw std::invalid_argument("loop symbols start at b1");
    Exponents e(m + 1, 0);
    e[m] = 1;
    MomentPolynomial p;
    p.add_term(std::move(e), 1);
    return p;
  }

  static MomentPolynomial zeta() {
    MomentPolynomial p;
    p.add_term({1}, 1);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of a monomial (zero when absent).
  mpq_class coefficient(Exponents e) const {
    trim(e);
    const auto it = terms_.find(e);
    return it == terms_.end() ? mpq_class(0) : it->second;
  }

  void add_term(Exponents e, mpq_class c) {
    c.canonicalize();
    if (c == 0) return;
    trim(e);
    auto [it, inserted] = terms_.try_emplace(std::move(e), std::move(c));
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  MomentPolynomial& operator+=(const MomentPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MomentPolynomial& operator-=(const MomentPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  MomentPolynomial& operator*=(mpq_class k) {
    k.canonicalize();
    if (k == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= k;
    return *this;
  }

  friend MomentPolynomial operator+(MomentPolynomial a, const MomentPolynomial& b) { return a += b; }
  friend MomentPolynomial operator-(MomentPolynomial a, const MomentPolynomial& b) { return a -= b; }
  friend MomentPolynomial operator*(MomentPolynomial a, const mpq_class& k) { return a *= k; }
  friend MomentPolynomial operator*(const mpq_class& k, MomentPolynomial a) { return a *= k; }

  friend MomentPolynomial operator*(const MomentPolynomial& a, const MomentPolynomial& b) {
    MomentPolynomial out;
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(std::max(ea.size(), eb.size()), 0);
        for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
        for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
        out.add_term(std::move(e), ca * cb);
      }
    }
    return out;
  }

  MomentPolynomial pow(unsigned n) const {
    MomentPolynomial result = one();
    for (unsigned i = 0; i < n; ++i) result = result * *this;
    return result;
  }

  /// The polynomial with every monomial containing b_1 removed.
  MomentPolynomial without_b1() const {
    MomentPolynomial out;
    for (const auto& [e, c] : terms_)
      if (e.size() < 2 || e[1] == 0) out.terms_.emplace(e, c);
    return out;
  }

  /// Σ_m m·(exponent of b_m) of a monomial.
  static std::uint64_t loop_weight(const Exponents& e) {
    std::uint64_t w = 0;
    for (std::size_t m = 1; m < e.size(); ++m) w += static_cast<std::uint64_t>(m) * e[m];
    return w;
  }
  static std::uint32_t zeta_degree(const Exponents& e) { return e.empty() ? 0 : e[0]; }

  bool operator==(const MomentPolynomial& o) const { return terms_ == o.terms_; }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      out << (first ? "" : " + ") << c.get_str();
      for (std::size_t i = 1; i < e.size(); ++i)
        if (e[i]) out << "*b" << i << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
      if (!e.empty() && e[0]) out << "*zeta" << (e[0] > 1 ? "^" + std::to_string(e[0]) : "");
      first = false;
    }
    return out.str();
  }

 private:
  static void trim(Exponents& e) {
    while (!e.empty() && e.back() == 0) e.pop_back();
  }

  Terms terms_;
};

// [{"exponents":{"b1":2,"zeta":1},"num":"-3","den":"4"}, ...] in monomial order.
inline void to_json(nlohmann::json& j, const MomentPolynomial& p) {
  j = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) {
    nlohmann::json exps = nlohmann::json::object();
    for (std::size_t m = 1; m < e.size(); ++m)
      if (e[m]) exps["b" + std::to_string(m)] = e[m];
    if (!e.empty() && e[0]) exps["zeta"] = e[0];
    j.push_back({{"exponents", exps}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}});
  }
}

inline void from_json(const nlohmann::json& j, MomentPolynomial& p) {
  p = MomentPolynomial();
  for (const auto& term : j) {
    MomentPolynomial::Exponents e;
    for (const auto& [key, value] : term.at("exponents").items()) {
      std::size_t index = 0;
      if (key == "zeta") {
        index = 0;
      } else if (key.size() > 1 && key[0] == 'b') {
        index = std::stoul(key.substr(1));
        if (index == 0) throw std::invalid_argument("moment polynomial: b0 is not a loop symbol");
      } else {
        throw std::invalid_argument("moment polynomial: unknown symbol '" + key + "'");
      }
      if (e.size() <= index) e.resize(index + 1, 0);
      e[index] = value.get<std::uint32_t>();
    }
    mpq_class c(mpz_class(term.at("num").get<std::string>()), mpz_class(term.at("den").get<std::string>()));
    c.canonicalize();
    p.add_term(std::move(e), c);
  }
}

}  // namespace renorm
