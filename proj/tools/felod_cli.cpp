#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "felod/experiment.hpp"

namespace {

int workers_from_env() {
  const char* env = std::getenv("FELOD_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  const int n = std::atoi(env);
  if (n < 1) throw std::invalid_argument("FELOD_WORKERS must be a positive integer");
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FE-LOD multiscale solver: experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  felod::RunOptions options;
  bool no_cache = false;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--outdir", options.outdir, "output directory")->capture_default_str();
  run->add_flag("--full-scale", options.full_scale, "allow configs marked scale = full");
  run->add_flag("--no-cache", no_cache, "recompute the reference solution");

  auto* list = app.add_subcommand("list-experiments", "list the experiment ids");

  std::string csv_path;
  auto* fit = app.add_subcommand("fit", "fit log-log slopes to a convergence CSV");
  fit->add_option("--csv", csv_path, "convergence CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      options.workers = workers_from_env();
      options.use_cache = !no_cache;
      const felod::ExperimentConfig config = felod::load_config(config_path);
      const felod::ExperimentResult result = felod::run_experiment(config, options);
      std::cout << "wrote " << (options.outdir / "report.txt").string() << '\n';
      for (const auto& note : result.notes) std::cout << "note: " << note << '\n';
      if (config.H.size() >= 3) {
        std::cout << "slope energy = " << result.energy_slope.slope << ", slope l2 = " << result.l2_slope.slope
                  << '\n';
      }
    } else if (*list) {
      for (const auto& [id, description] : felod::experiment_catalog()) {
        std::cout << id << "\t" << description << '\n';
      }
    } else if (*fit) {
      const auto [energy, l2] = felod::fit_convergence_csv(csv_path);
      std::cout << "energy slope " << energy.slope << " (R2 " << energy.r2 << ")\n";
      std::cout << "l2 slope " << l2.slope << " (R2 " << l2.r2 << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
