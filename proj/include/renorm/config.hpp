#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "renorm/characteristic.hpp"
#include "renorm/error.hpp"
#include "renorm/regulator.hpp"
#include "renorm/spectrum.hpp"
#include "renorm/table.hpp"

namespace renorm {

/// min..max with `count` points, evenly spaced or log-spaced.
struct Grid {
  double min{0.0};
  double max{0.0};
  std::size_t count{1};
  bool log_spaced{false};

  std::vector<double> points() const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      out[i] = log_spaced ? std::exp(std::log(min) + t * (std::log(max) - std::log(min))) : min + t * (max - min);
    }
    if (count > 1) out.back() = max;
    return out;
  }
};

struct RunConfig {
  Spectrum spectrum{PowerLaw{1.0, 1.0}};
  Regulator regulator{SharpCutoff{1.0}};
  double theta{0.0};
  double lambda{1.0};
  Grid s_grid{0.0, 4.0, 9, false};
  Grid cutoff_grid{1e3, 1e5, 3, true};
  Grid n_grid{10.0, 1000.0, 3, true};
  Grid lambda_grid{0.25, 4.0, 5, true};
  Grid theta_grid{-1.0, 1.0, 5, false};
  QuadratureConfig quadrature{};
  std::uint64_t mc_samples{100000};
  std::uint64_t seed{0x5EEDull};
  unsigned threads{1};
  unsigned diagram_order{12};
  std::string output{"."};
  TableFormat format{TableFormat::Csv};
};

namespace detail {

inline Grid parse_grid(const nlohmann::json& j, const char* name) {
  Grid g;
  g.min = j.at("min").get<double>();
  g.max = j.at("max").get<double>();
  g.count = j.at("count").get<std::size_t>();
  const std::string spacing = j.value("spacing", std::string("linear"));
  if (spacing != "linear" && spacing != "log")
    throw ConfigError(std::string(name) + ": spacing must be 'linear' or 'log'");
  g.log_spaced = spacing == "log";
  if (g.count == 0) throw ConfigError(std::string(name) + ": grid must not be empty");
  if (!std::isfinite(g.min) || !std::isfinite(g.max) || g.max < g.min)
    throw ConfigError(std::string(name) + ": need finite min <= max");
  if (g.log_spaced && !(g.min > 0.0)) throw ConfigError(std::string(name) + ": log grid needs min > 0");
  return g;
}

inline TableFormat parse_format(const std::string& s) {
  if (s == "csv") return TableFormat::Csv;
  if (s == "json") return TableFormat::Json;
  throw ConfigError("format must be 'csv' or 'json', got '" + s + "'");
}

}  // namespace detail

/// Reads a configuration object; absent keys keep their defaults.
inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  try {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    if (j.contains("spectrum")) cfg.spectrum = j.at("spectrum").get<Spectrum>();
    if (j.contains("regulator")) cfg.regulator = j.at("regulator").get<Regulator>();
    cfg.theta = j.value("theta", cfg.theta);
    cfg.lambda = j.value("lambda", cfg.lambda);
    if (!(cfg.lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (j.contains("s_grid")) cfg.s_grid = detail::parse_grid(j.at("s_grid"), "s_grid");
    if (j.contains("cutoff_grid")) cfg.cutoff_grid = detail::parse_grid(j.at("cutoff_grid"), "cutoff_grid");
    if (j.contains("n_grid")) cfg.n_grid = detail::parse_grid(j.at("n_grid"), "n_grid");
    if (j.contains("lambda_grid")) cfg.lambda_grid = detail::parse_grid(j.at("lambda_grid"), "lambda_grid");
    if (j.contains("theta_grid")) cfg.theta_grid = detail::parse_grid(j.at("theta_grid"), "theta_grid");
    if (cfg.cutoff_grid.min <= 0.0) throw ConfigError("cutoff_grid: cutoffs must be positive");
    if (cfg.n_grid.min < 1.0) throw ConfigError("n_grid: n must be at least 1");
    if (cfg.lambda_grid.min <= 0.0) throw ConfigError("lambda_grid: lambda must be positive");
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      cfg.quadrature.half_width_sigmas = q.value("half_width_sigmas", cfg.quadrature.half_width_sigmas);
      cfg.quadrature.max_nodes = q.value("max_nodes", cfg.quadrature.max_nodes);
      cfg.quadrature.abs_tol = q.value("abs_tol", cfg.quadrature.abs_tol);
      cfg.quadrature.rel_tol = q.value("rel_tol", cfg.quadrature.rel_tol);
      if (!(cfg.quadrature.abs_tol > 0.0) || !(cfg.quadrature.rel_tol > 0.0))
        throw ConfigError("quadrature: tolerances must be positive");
      if (!(cfg.quadrature.half_width_sigmas > 0.0)) throw ConfigError("quadrature: half_width_sigmas must be positive");
    }
    if (j.contains("mc")) {
      cfg.mc_samples = j.at("mc").value("samples", cfg.mc_samples);
      cfg.seed = j.at("mc").value("seed", cfg.seed);
      if (cfg.mc_samples < 2) throw ConfigError("mc: need at least two samples");
    }
    cfg.threads = j.value("threads", cfg.threads);
    cfg.diagram_order = j.value("diagram_order", cfg.diagram_order);
    if (cfg.diagram_order > 20) throw ConfigError("diagram_order must be at most 20");
    cfg.output = j.value("output", cfg.output);
    if (j.contains("format")) cfg.format = detail::parse_format(j.at("format").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("configuration '" + path + "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace renorm
