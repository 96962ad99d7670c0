#include <cmath>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "renorm/commands.hpp"
#include "renorm/config.hpp"

using namespace renorm;

namespace {
RunConfig small_config(double p = 2.0) {
  RunConfig cfg = parse_config(nlohmann::json::parse(R"({
    "s_grid": {"min": 0, "max": 2, "count": 5},
    "cutoff_grid": {"min": 100, "max": 10000, "count": 3, "spacing": "log"},
    "n_grid": {"min": 10, "max": 1000, "count": 3, "spacing": "log"},
    "lambda_grid": {"min": 0.5, "max": 2, "count": 2, "spacing": "log"},
    "theta_grid": {"min": -1, "max": 1, "count": 2},
    "diagram_order": 6,
    "threads": 2
  })"));
  cfg.spectrum = Spectrum(PowerLaw{1.0, p});
  return cfg;
}

double real(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  return std::get<double>(c);
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  throw std::out_of_range(name);
}
}  // namespace

TEST(SpectrumReport, Squares) {
  const auto rep = commands::spectrum_report(small_config());
  EXPECT_NE(rep.text.find("B1: yes"), std::string::npos);
  EXPECT_NE(rep.text.find("b1: 1.6449340668"), std::string::npos);
  EXPECT_NE(rep.text.find("r(Lambda=100): 0\n"), std::string::npos);
  EXPECT_NE(rep.text.find("kappa: 1.6449340668"), std::string::npos);
  EXPECT_EQ(rep.tables.at("spectrum_flow").rows.size(), 3u);
}

TEST(SpectrumReport, Harmonic) {
  const auto rep = commands::spectrum_report(small_config(1.0));
  EXPECT_NE(rep.text.find("B1: no"), std::string::npos);
  EXPECT_NE(rep.text.find("b1: diverges"), std::string::npos);
  EXPECT_NE(rep.text.find("kappa: 0.577215664"), std::string::npos);
}

TEST(PhiTables, OriginRowIsOne) {
  const auto tables = commands::phi_tables(small_config());
  const Table& raw = tables.at("phi_n");
  EXPECT_EQ(raw.rows.size(), 15u);
  for (const auto& row : raw.rows)
    if (real(row[column(raw, "s")]) == 0.0) {
      EXPECT_EQ(real(row[column(raw, "modulus")]), 1.0);
      EXPECT_EQ(real(row[column(raw, "phase")]), 0.0);
    }
  const Table& flow = tables.at("phi_flow");
  EXPECT_EQ(flow.rows.size(), 15u);
  for (const auto& row : flow.rows) EXPECT_LT(real(row[column(flow, "distance_to_limit")]), 1e-1);
}

TEST(ZTables, DecayRespectsTheBound) {
  const auto tables = commands::z_tables(small_config());
  const Table& decay = tables.at("z_decay");
  for (const auto& row : decay.rows)
    EXPECT_LE(std::abs(real(row[column(decay, "z_n")])), real(row[column(decay, "bound")]) * (1 + 1e-9));
  EXPECT_EQ(tables.at("z_renormalized").rows.size(), 4u);
}

TEST(FlowTables, DistancesShrink) {
  const Table t = commands::flow_tables(small_config(1.0)).at("flow");
  ASSERT_EQ(t.rows.size(), 3u);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LT(real(t.rows[i][column(t, "phi_distance")]), real(t.rows[i - 1][column(t, "phi_distance")]));
    EXPECT_LT(real(t.rows[i][column(t, "z_distance")]), real(t.rows[i - 1][column(t, "z_distance")]));
  }
}

TEST(Diagrams, MomentsIdentityAndSeries) {
  const auto out = commands::diagrams(small_config(1.0));
  ASSERT_EQ(out.moments.size(), 7u);
  EXPECT_EQ(out.moments[1]["H"].get<MomentPolynomial>(), MomentPolynomial::loop(1) * mpq_class(1, 2));
  EXPECT_TRUE(out.moments[1]["H1"].get<MomentPolynomial>().is_zero());
  EXPECT_EQ(out.moments[3]["H"].get<MomentPolynomial>(), wick_moment(3));
  EXPECT_TRUE(out.identity_holds);
  for (const auto& row : out.tables.at("identity").rows) EXPECT_EQ(std::get<std::string>(row[1]), "true");
  // Harmonic spectrum: b1 diverges, so only the renormalized series survive.
  const Table& series = out.tables.at("series");
  bool saw_origin = false;
  for (const auto& row : series.rows) {
    const auto& kind = std::get<std::string>(row[0]);
    EXPECT_TRUE(kind == "phi_renormalized" || kind == "z_renormalized") << kind;
    if (std::get<std::int64_t>(row[1]) == 0) {
      EXPECT_EQ(real(row[2]), 1.0);
      saw_origin = true;
    }
  }
  EXPECT_TRUE(saw_origin);
  EXPECT_EQ(out.notes.size(), 2u);
}

TEST(Commands, EmittedTablesRoundTrip) {
  const RunConfig cfg = small_config();
  for (const auto& [name, table] : commands::phi_tables(cfg))
    for (auto f : {TableFormat::Csv, TableFormat::Json}) {
      std::istringstream in(render_table(table, f));
      EXPECT_EQ(read_table(in, f), table) << name;
    }
}

TEST(Commands, SameConfigSameBytes) {
  RunConfig a = small_config(1.0);
  RunConfig b = small_config(1.0);
  b.threads = 3;
  const auto ta = commands::z_tables(a);
  const auto tb = commands::z_tables(b);
  for (const auto& [name, table] : ta)
    EXPECT_EQ(render_table(table, TableFormat::Csv), render_table(tb.at(name), TableFormat::Csv)) << name;
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config(nlohmann::json::parse("[]")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"lambda": -1})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"spectrum": {"family": "bogus"}})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"s_grid": {"min": 1, "max": 0, "count": 2}})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"format": "xml"})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"diagram_order": 40})")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, Defaults) {
  const RunConfig cfg = parse_config(nlohmann::json::object());
  EXPECT_EQ(cfg.s_grid.points().size(), 9u);
  EXPECT_EQ(cfg.format, TableFormat::Csv);
  EXPECT_NEAR(cfg.cutoff_grid.points()[1], 1e4, 1e-9);
}
