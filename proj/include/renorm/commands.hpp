#pragma once

// Table producers behind the command-line subcommands. Each returns named
// tables; rows follow grid order and carry the inputs that produced them.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "renorm/characteristic.hpp"
#include "renorm/config.hpp"
#include "renorm/diagrams.hpp"
#include "renorm/error.hpp"
#include "renorm/parallel.hpp"
#include "renorm/partition.hpp"
#include "renorm/regulator.hpp"
#include "renorm/spectrum.hpp"
#include "renorm/table.hpp"

namespace renorm::commands {

using Tables = std::map<std::string, Table>;

namespace detail {

inline std::vector<std::size_t> integer_points(const Grid& g) {
  std::vector<std::size_t> out;
  for (double x : g.points()) {
    const auto n = static_cast<std::size_t>(std::llround(x));
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  return out;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline std::string regulator_name(const Regulator& reg) {
  if (!reg.is_sharp()) return "exponential";
  std::ostringstream out;
  out << "sharp_cutoff(a=" << reg.cutoff_a() << ")";
  return out.str();
}

}  // namespace detail

struct SpectrumReport {
  std::string text;
  Tables tables;
};

/// μ, class memberships, inverse-power sums, r(Λ) on the cutoff grid and κ.
inline SpectrumReport spectrum_report(const RunConfig& cfg) {
  const Spectrum& spec = cfg.spectrum;
  std::ostringstream out;
  out.precision(12);
  nlohmann::json descriptor = spec;
  out << "spectrum: " << descriptor.dump() << '\n';
  out << "regulator: " << detail::regulator_name(cfg.regulator) << '\n';
  out << "mu: " << spec.mu() << '\n';
  for (unsigned k = 1; k <= 4; ++k) out << "B" << k << ": " << (spec.in_class(k) ? "yes" : "no") << '\n';
  for (unsigned k = 1; k <= 4; ++k) {
    out << "b" << k << ": ";
    if (spec.in_class(k))
      out << b_sum(spec, k, 1e-12) << '\n';
    else
      out << "diverges\n";
  }

  Table table{{"Lambda", "b1_regularized", "r", "b1_minus_r"}, {}};
  bool r_supported = true;
  for (double cutoff : cfg.cutoff_grid.points()) {
    const DeformedSpectrum d{spec, cfg.regulator, cutoff};
    try {
      const double r = r_of_lambda(d);
      const double b1 = deformed_b1(d);
      out << "r(Lambda=" << cutoff << "): " << r << '\n';
      table.add_row({cutoff, b1, r, b1 - r});
    } catch (const UnsupportedRegulatorTail& e) {
      out << "r(Lambda=" << cutoff << "): unsupported (" << e.what() << ")\n";
      r_supported = false;
      break;
    }
  }
  if (r_supported) {
    try {
      out << "kappa: " << kappa(spec, cfg.regulator) << '\n';
    } catch (const Error& e) {
      out << "kappa: unavailable (" << e.what() << ")\n";
    }
  }
  return {out.str(), {{"spectrum_flow", table}}};
}

/// s-scans of Φ_n, of the flow at every cutoff, and of the renormalized limit.
inline Tables phi_tables(const RunConfig& cfg) {
  const Spectrum& spec = cfg.spectrum;
  const auto s_points = cfg.s_grid.points();
  const auto n_points = detail::integer_points(cfg.n_grid);
  const double s_max = std::max(detail::max_abs(s_points), 1e-300);
  Tables out;

  Table raw{{"s", "n", "modulus", "phase", "re", "im"}, {}};
  for (std::size_t n : n_points)
    for (double s : s_points) {
      const Polar p = phi_n_polar(spec, s, n);
      const ComplexValue v = p.value();
      raw.add_row({s, static_cast<std::int64_t>(n), p.modulus, p.phase, v.real(), v.imag()});
    }
  out["phi_n"] = std::move(raw);

  const double k = kappa(spec, cfg.regulator);
  const LimitCharacteristic limit(spec, s_max, 1e-12);
  Table renorm{{"s", "theta", "kappa", "modulus", "g_r", "re", "im"}, {}};
  for (double s : s_points) {
    const ComplexValue v = limit.renormalized(s, k, cfg.theta);
    renorm.add_row({s, cfg.theta, k, limit.f(s), limit.g_r(s, k), v.real(), v.imag()});
  }
  out["phi_renormalized"] = std::move(renorm);

  const auto cutoffs = cfg.cutoff_grid.points();
  const auto blocks = parallel_map(cutoffs.size(), cfg.threads, [&](std::size_t i) {
    const FlowCharacteristic flow({spec, cfg.regulator, cutoffs[i]}, s_max, 1e-12);
    std::vector<std::vector<Cell>> rows;
    for (double s : s_points) {
      const ComplexValue v = flow.renormalized(s, cfg.theta);
      const double dist = std::abs(v - limit.renormalized(s, k, cfg.theta));
      rows.push_back({s, cutoffs[i], cfg.theta, flow.r(), v.real(), v.imag(), dist});
    }
    return rows;
  });
  Table flow{{"s", "Lambda", "theta", "r", "re", "im", "distance_to_limit"}, {}};
  for (const auto& block : blocks)
    for (const auto& row : block) flow.add_row(row);
  out["phi_flow"] = std::move(flow);
  return out;
}

/// z_n decay with its bound, the flow at every cutoff, and the renormalized
/// limit over the λ and θ grids.
inline Tables z_tables(const RunConfig& cfg) {
  const Spectrum& spec = cfg.spectrum;
  const auto& q = cfg.quadrature;
  Tables out;

  const auto n_points = detail::integer_points(cfg.n_grid);
  const auto decay_rows = parallel_map(n_points.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t n = n_points[i];
    return std::vector<Cell>{cfg.lambda, static_cast<std::int64_t>(n), z_n(spec, cfg.lambda, n, q),
                             z_n_bound(spec, cfg.lambda, n)};
  });
  Table decay{{"lambda", "n", "z_n", "bound"}, {}};
  for (const auto& row : decay_rows) decay.add_row(row);
  out["z_decay"] = std::move(decay);

  const double k = kappa(spec, cfg.regulator);
  const double limit = z_renormalized(spec, k, cfg.lambda, cfg.theta, q);
  const auto cutoffs = cfg.cutoff_grid.points();
  const auto flow_rows = parallel_map(cutoffs.size(), cfg.threads, [&](std::size_t i) {
    const double z = z_flow({spec, cfg.regulator, cutoffs[i]}, cfg.lambda, cfg.theta, q);
    return std::vector<Cell>{cfg.lambda, cutoffs[i], cfg.theta, z, limit, std::abs(z - limit)};
  });
  Table flow{{"lambda", "Lambda", "theta", "z_flow", "z_renormalized", "distance_to_limit"}, {}};
  for (const auto& row : flow_rows) flow.add_row(row);
  out["z_flow"] = std::move(flow);

  const auto lambdas = cfg.lambda_grid.points();
  const auto thetas = cfg.theta_grid.points();
  const auto renorm_rows = parallel_map(lambdas.size() * thetas.size(), cfg.threads, [&](std::size_t i) {
    const double lambda = lambdas[i / thetas.size()];
    const double theta = thetas[i % thetas.size()];
    return std::vector<Cell>{lambda, theta, k, z_renormalized(spec, k, lambda, theta, q)};
  });
  Table renorm{{"lambda", "theta", "kappa", "z"}, {}};
  for (const auto& row : renorm_rows) renorm.add_row(row);
  out["z_renormalized"] = std::move(renorm);
  return out;
}

/// Summary of the cutoff flow: regularized sums and the distances of Φ (worst
/// over the s-grid) and Z to their renormalized limits.
inline Tables flow_tables(const RunConfig& cfg) {
  const Spectrum& spec = cfg.spectrum;
  const auto s_points = cfg.s_grid.points();
  const double s_max = std::max(detail::max_abs(s_points), 1e-300);
  const double k = kappa(spec, cfg.regulator);
  const LimitCharacteristic limit(spec, s_max, 1e-12);
  const double z_limit = z_renormalized(spec, k, cfg.lambda, cfg.theta, cfg.quadrature);
  const auto cutoffs = cfg.cutoff_grid.points();
  const auto rows = parallel_map(cutoffs.size(), cfg.threads, [&](std::size_t i) {
    const DeformedSpectrum d{spec, cfg.regulator, cutoffs[i]};
    const FlowCharacteristic flow(d, s_max, 1e-12);
    double phi_dist = 0.0;
    for (double s : s_points)
      phi_dist = std::max(phi_dist, std::abs(flow.renormalized(s, cfg.theta) - limit.renormalized(s, k, cfg.theta)));
    const double z_dist = std::abs(z_flow(d, cfg.lambda, cfg.theta, cfg.quadrature) - z_limit);
    const double z_reg = z_regularized(d, cfg.lambda, cfg.quadrature);
    return std::vector<Cell>{cutoffs[i], flow.b1(), flow.r(), flow.b1() - flow.r(), k, phi_dist, z_dist, z_reg};
  });
  Table table{{"Lambda", "b1_regularized", "r", "b1_minus_r", "kappa", "phi_distance", "z_distance", "z_regularized"},
              {}};
  for (const auto& row : rows) table.add_row(row);
  return {{"flow", table}};
}

struct DiagramOutput {
  nlohmann::json moments;
  Tables tables;
  bool identity_holds{true};
  std::vector<std::string> notes;
};

/// Exact moments up to `order`, identity verdicts and numeric series
/// coefficients for the configured spectrum with δ = (κ − θ)/2.
inline DiagramOutput diagrams(const RunConfig& cfg) {
  const unsigned order = cfg.diagram_order;
  DiagramOutput out;
  const auto h = wick_moments(order);
  out.moments = nlohmann::json::array();
  for (unsigned k = 0; k <= order; ++k)
    out.moments.push_back({{"k", k}, {"H", h[k]}, {"H1", h[k].without_b1()}});

  Table identity{{"n", "identity_holds"}, {}};
  for (unsigned n = 0; n <= order; ++n) {
    const bool ok = verify_renorm_identity(n);
    out.identity_holds = out.identity_holds && ok;
    identity.add_row({static_cast<std::int64_t>(n), std::string(ok ? "true" : "false")});
  }
  out.tables["identity"] = std::move(identity);

  // Loop values up to twice the order feed the Z-series.
  const unsigned series_order = std::min(order, 8u);
  std::vector<LoopValue> b;
  for (unsigned m = 1; m <= 2 * series_order; ++m)
    b.push_back(cfg.spectrum.in_class(m) ? LoopValue::finite(b_sum(cfg.spectrum, m, 1e-13)) : LoopValue::infinite());
  std::optional<double> delta;
  if (cfg.spectrum.in_class(2)) delta = 0.5 * (kappa(cfg.spectrum, cfg.regulator) - cfg.theta);

  Table series{{"kind", "order", "coefficient"}, {}};
  const std::pair<SeriesKind, const char*> kinds[] = {{SeriesKind::PhiSeries, "phi"},
                                                      {SeriesKind::ZSeries, "z"},
                                                      {SeriesKind::PhiRenormSeries, "phi_renormalized"},
                                                      {SeriesKind::ZRenormSeries, "z_renormalized"}};
  for (const auto& [kind, name] : kinds) {
    const bool renormalized = kind == SeriesKind::PhiRenormSeries || kind == SeriesKind::ZRenormSeries;
    if (renormalized && !delta) {
      out.notes.push_back(std::string(name) + " series skipped: spectrum is not in B2");
      continue;
    }
    try {
      const auto c = series_coefficients(kind, series_order, b, renormalized ? *delta : 0.0);
      for (std::size_t j = 0; j < c.size(); ++j)
        series.add_row({std::string(name), static_cast<std::int64_t>(j), c[j]});
    } catch (const InfiniteCoefficient& e) {
      out.notes.push_back(std::string(name) + " series skipped: " + e.what());
    }
  }
  out.tables["series"] = std::move(series);
  return out;
}

}  // namespace renorm::commands
