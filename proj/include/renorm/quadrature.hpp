#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature with a hard node budget.
// Works for real- and complex-valued integrands.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <type_traits>
#include <vector>

#include "renorm/error.hpp"

namespace renorm::quadrature {

struct Options {
  double abs_tol{1e-12};
  double rel_tol{1e-10};
  std::size_t max_nodes{1u << 16};
  std::size_t initial_panels{1};
};

template <typename T>
struct Result {
  T value{};
  double error{0.0};
  std::size_t nodes{0};
};

namespace detail {

// QUADPACK qk15 abscissae and weights (positive half, centre last).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::size_t kNodesPerPanel = 15;

template <typename T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
Panel<T> gauss_kronrod_15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(centre);
  T result_k = fc * kWgk[7];
  T result_g = fc * kWg[3];
  double resabs = std::abs(fc) * kWgk[7];
  std::array<T, 7> f1{};
  std::array<T, 7> f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(centre - dx);
    f2[j] = f(centre + dx);
    result_k += (f1[j] + f2[j]) * kWgk[j];
    resabs += (std::abs(f1[j]) + std::abs(f2[j])) * kWgk[j];
    if (j % 2 == 1) result_g += (f1[j] + f2[j]) * kWg[j / 2];
  }
  const T mean = result_k * 0.5;
  double resasc = std::abs(fc - mean) * kWgk[7];
  for (std::size_t j = 0; j < 7; ++j)
    resasc += (std::abs(f1[j] - mean) + std::abs(f2[j] - mean)) * kWgk[j];

  const double ah = std::abs(half);
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((result_k - result_g) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  return {a, b, result_k * half, err};
}

}  // namespace detail

/// Integrates f over [a, b]. Throws QuadratureFailure when the error
/// estimate exceeds max(abs_tol, rel_tol*|I|) once the node budget is spent.
template <typename F>
auto integrate(F&& f, double a, double b, const Options& opt)
    -> Result<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  using detail::Panel;
  const std::size_t initial = std::max<std::size_t>(1, opt.initial_panels);
  if (initial * detail::kNodesPerPanel > opt.max_nodes) {
    std::ostringstream msg;
    msg << "quadrature: initial partition needs " << initial * detail::kNodesPerPanel
        << " nodes, budget is " << opt.max_nodes;
    throw QuadratureFailure(msg.str(), std::numeric_limits<double>::infinity());
  }

  std::priority_queue<Panel<T>> queue;
  std::size_t nodes = 0;
  double total_err = 0.0;
  T total{};
  const double step = (b - a) / static_cast<double>(initial);
  for (std::size_t i = 0; i < initial; ++i) {
    const double lo = a + step * static_cast<double>(i);
    const double hi = (i + 1 == initial) ? b : lo + step;
    auto p = detail::gauss_kronrod_15<T>(f, lo, hi);
    nodes += detail::kNodesPerPanel;
    total += p.value;
    total_err += p.error;
    queue.push(p);
  }

  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (total_err > target()) {
    if (nodes + 2 * detail::kNodesPerPanel > opt.max_nodes) break;
    const Panel<T> worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) break;
    queue.pop();
    auto left = detail::gauss_kronrod_15<T>(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15<T>(f, mid, worst.b);
    nodes += 2 * detail::kNodesPerPanel;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  // Re-sum from the panels to drop drift in the running totals.
  T sum{};
  T comp{};
  double err = 0.0;
  while (!queue.empty()) {
    const T y = queue.top().value - comp;
    const T t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    err += queue.top().error;
    queue.pop();
  }
  if (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(sum))) {
    std::ostringstream msg;
    msg << "quadrature: error estimate " << err << " exceeds tolerance after " << nodes
        << " nodes (budget " << opt.max_nodes << ")";
    throw QuadratureFailure(msg.str(), err);
  }
  return {sum, err, nodes};
}

}  // namespace renorm::quadrature
