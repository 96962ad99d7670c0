// renorm: command-line front end. Emits tables only; plotting is left to
// external tools.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numeric failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "renorm/acceptance.hpp"
#include "renorm/commands.hpp"
#include "renorm/config.hpp"
#include "renorm/error.hpp"
#include "renorm/table.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

struct GlobalFlags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

renorm::RunConfig resolve(const GlobalFlags& flags) {
  renorm::RunConfig cfg = flags.config.empty() ? renorm::RunConfig{} : renorm::load_config(flags.config);
  if (flags.out) cfg.output = *flags.out;
  if (flags.format) cfg.format = renorm::detail::parse_format(*flags.format);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.threads) cfg.threads = *flags.threads;
  return cfg;
}

std::filesystem::path output_dir(const renorm::RunConfig& cfg) {
  std::filesystem::path dir(cfg.output);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_tables(const renorm::RunConfig& cfg, const renorm::commands::Tables& tables) {
  const auto dir = output_dir(cfg);
  const char* ext = cfg.format == renorm::TableFormat::Csv ? ".csv" : ".json";
  for (const auto& [name, table] : tables) {
    const auto path = dir / (name + ext);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    renorm::write_table(file, table, cfg.format);
    std::cout << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral regularization and renormalization of Gaussian functionals"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "Output directory for tables");
  app.add_option("--format", flags.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", flags.seed, "Seed for Monte Carlo and randomized checks");
  app.add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* spectrum = app.add_subcommand("spectrum", "Report mu, class memberships, b_k, r(Lambda) and kappa");
  auto* phi = app.add_subcommand("phi", "s-scans of Phi_n, the flow and the renormalized limit");
  auto* z = app.add_subcommand("z", "z_n decay, flow and renormalized Z tables");
  auto* flow = app.add_subcommand("flow", "Cutoff flow summary with distances to the limit");
  auto* diagrams = app.add_subcommand("diagrams", "Exact moments, identity verdicts and series coefficients");
  std::optional<unsigned> order;
  diagrams->add_option("--order", order, "Highest moment order (at most 20)");

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  bool list_only = false;
  std::string golden;
  std::string report_path;
  verify->add_flag("--list", list_only, "List the criteria without running them");
  verify->add_option("--golden", golden, "JSON file overriding reference values")->check(CLI::ExistingFile);
  verify->add_option("--report", report_path, "Also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (verify->parsed()) {
      if (list_only) {
        for (const auto& c : renorm::acceptance::criteria()) std::cout << c.id << ' ' << c.name << ": " << c.description << '\n';
        return kOk;
      }
      renorm::acceptance::Options opt;
      if (flags.seed) opt.seed = *flags.seed;
      if (flags.threads) opt.threads = *flags.threads;
      if (!golden.empty()) opt.goldens = renorm::acceptance::load_goldens(golden);
      const auto report = renorm::acceptance::run(opt);
      const std::string text = report.render();
      std::cout << text;
      if (!report_path.empty()) {
        std::ofstream file(report_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + report_path);
        file << text;
      }
      return report.all_passed() ? kOk : kVerifyFailed;
    }

    renorm::RunConfig cfg = resolve(flags);
    if (spectrum->parsed()) {
      const auto rep = renorm::commands::spectrum_report(cfg);
      std::cout << rep.text;
      if (flags.out) write_tables(cfg, rep.tables);
    } else if (phi->parsed()) {
      write_tables(cfg, renorm::commands::phi_tables(cfg));
    } else if (z->parsed()) {
      write_tables(cfg, renorm::commands::z_tables(cfg));
    } else if (flow->parsed()) {
      write_tables(cfg, renorm::commands::flow_tables(cfg));
    } else if (diagrams->parsed()) {
      if (order) {
        if (*order > 20) throw renorm::ConfigError("--order must be at most 20");
        cfg.diagram_order = *order;
      }
      const auto result = renorm::commands::diagrams(cfg);
      const auto path = output_dir(cfg) / "moments.json";
      std::ofstream file(path, std::ios::binary);
      if (!file) throw std::runtime_error("cannot write " + path.string());
      file << result.moments.dump(1) << '\n';
      std::cout << "wrote " << path.string() << '\n';
      write_tables(cfg, result.tables);
      for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
      if (!result.identity_holds) {
        std::cerr << "error: renormalization identity failed\n";
        return kVerifyFailed;
      }
    }
    return kOk;
  } catch (const renorm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const renorm::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  }
}
