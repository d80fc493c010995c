#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thermoform/cli/acceptance.hpp"
#include "thermoform/cli/commands.hpp"
#include "thermoform/cli/config.hpp"

namespace tf = thermoform;
namespace cli = thermoform::cli;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kNoConvergence = 2 };

int emit(const cli::CommandOutput& out, const cli::ExperimentConfig& cfg, const std::string& out_flag) {
  const std::string path = !out_flag.empty() ? out_flag : cfg.output.value_or("");
  if (path.empty() || path == "-") {
    out.csv.write(std::cout);
  } else {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot open " << path << " for writing\n";
      return kInvalid;
    }
    out.csv.write(f);
  }
  if (!out.summary.empty()) std::cerr << out.summary;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermoform: pressures, rate functions and nonlinear equilibria on the one-sided shift"};
  app.require_subcommand(1);
  std::string config_path, out_path;
  app.add_option("--config", config_path, "TOML experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "CSV output path (default: standard output)");

  auto* pressure = app.add_subcommand("pressure", "t, P(f + t beta A), c_hat, c");
  auto* selfc = app.add_subcommand("selfconsistency", "t, mu_{f + beta t A}(A), t; critical points on stderr");
  auto* rate = app.add_subcommand("rate", "x, I_A(x), tilted rate");
  auto* bog = app.add_subcommand("bogoliubov", "critical points and nonlinear pressure");
  auto* mixture = app.add_subcommand("mixture", "Laplace mixture of eigenprobabilities");
  auto* enumerate = app.add_subcommand("enumerate", "finite-n tilted measures by exact enumeration");
  auto* figure = app.add_subcommand("figure", "curves of Figures 1-4 and 21");
  int figure_id = 0;
  figure->add_option("id", figure_id, "figure number: 1, 2, 3, 4 or 21")->required();
  auto* check = app.add_subcommand("check", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*check) {
      const auto rep = cli::run_acceptance([](const cli::CriterionResult& r) {
        std::cout << cli::format_result(r) << std::endl;
      });
      const auto bad = rep.unexpected_failures();
      std::cout << (bad == 0 ? "acceptance: no unexpected failures" : "acceptance: " + std::to_string(bad) + " unexpected failure(s)")
                << std::endl;
      return bad == 0 ? kOk : kInvalid;
    }
    const cli::ExperimentConfig cfg = config_path.empty() ? cli::ExperimentConfig{} : cli::load_config(config_path);
    if (*pressure) return emit(cli::cmd_pressure(cfg), cfg, out_path);
    if (*selfc) return emit(cli::cmd_selfconsistency(cfg), cfg, out_path);
    if (*rate) return emit(cli::cmd_rate(cfg), cfg, out_path);
    if (*bog) return emit(cli::cmd_bogoliubov(cfg), cfg, out_path);
    if (*mixture) return emit(cli::cmd_mixture(cfg), cfg, out_path);
    if (*enumerate) return emit(cli::cmd_enumerate(cfg), cfg, out_path);
    if (*figure) return emit(cli::cmd_figure(figure_id, cfg), cfg, out_path);
  } catch (const tf::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}
