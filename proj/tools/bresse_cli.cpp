// Batch front-end: bresse <subcommand> [--config file] [overrides]
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bresse/experiments.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<int> n_cells;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho1, rho2, b, k, k0, l, delta;
  std::optional<std::vector<double>> lambdas;
  std::optional<std::string> lambda_grid;
  std::optional<double> lambda_start, lambda_stop, lambda_ratio;
  std::optional<int> lambda_count;
  std::optional<int> n_eigs;
  std::optional<std::string> eigs_order;
  std::optional<int> n_min, n_max;
  std::optional<double> dt, t_end;
  std::optional<int> sample_every;
  std::optional<std::string> initial_data;
  std::optional<int> mode_number;
  std::optional<std::string> initial_file;
  std::optional<std::string> fit_input;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--n-cells", o.n_cells, "grid cells");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--rho1", o.rho1);
  cmd->add_option("--rho2", o.rho2);
  cmd->add_option("--b", o.b);
  cmd->add_option("--k", o.k);
  cmd->add_option("--k0", o.k0);
  cmd->add_option("--l", o.l, "curvature");
  cmd->add_option("--delta", o.delta, "damping");
}

void add_time(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--dt", o.dt);
  cmd->add_option("--t-end", o.t_end);
  cmd->add_option("--sample-every", o.sample_every);
  cmd->add_option("--initial-data", o.initial_data, "mode | smooth | file");
  cmd->add_option("--mode-number", o.mode_number);
  cmd->add_option("--initial-file", o.initial_file);
}

template <typename T, typename U>
void apply(const std::optional<T>& v, U& target) {
  if (v) target = *v;
}

bresse::ExperimentConfig resolve(const std::string& experiment, const Overrides& o) {
  bresse::ExperimentConfig c = o.config_path.empty() ? bresse::ExperimentConfig{} : bresse::load_config(o.config_path);
  c.experiment = bresse::parse_experiment(experiment);
  apply(o.out, c.output_dir);
  apply(o.n_cells, c.n_cells);
  apply(o.seed, c.seed);
  apply(o.rho1, c.params.rho1);
  apply(o.rho2, c.params.rho2);
  apply(o.b, c.params.b);
  apply(o.k, c.params.k);
  apply(o.k0, c.params.k0);
  apply(o.l, c.params.l);
  apply(o.delta, c.params.delta);
  apply(o.lambdas, c.lambdas);
  apply(o.lambda_grid, c.lambda_grid);
  apply(o.lambda_start, c.lambda_start);
  apply(o.lambda_stop, c.lambda_stop);
  apply(o.lambda_ratio, c.lambda_ratio);
  apply(o.lambda_count, c.lambda_count);
  apply(o.n_eigs, c.n_eigs);
  apply(o.eigs_order, c.eigs_order);
  apply(o.n_min, c.n_min);
  apply(o.n_max, c.n_max);
  apply(o.dt, c.dt);
  apply(o.t_end, c.t_end);
  apply(o.sample_every, c.sample_every);
  apply(o.initial_data, c.initial_data);
  apply(o.mode_number, c.mode_number);
  apply(o.initial_file, c.initial_file);
  apply(o.fit_input, c.fit_input);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped Bresse beam lab: resolvent sweeps, spectra, witnesses and decay runs"};
  app.set_version_flag("--version", BRESSE_VERSION);
  app.require_subcommand(1);
  Overrides o;

  auto* simulate = app.add_subcommand("simulate", "implicit-midpoint trajectory");
  add_common(simulate, o);
  add_time(simulate, o);

  auto* sweep = app.add_subcommand("sweep", "resolvent norm along the imaginary axis");
  add_common(sweep, o);
  sweep->add_option("--lambdas", o.lambdas, "explicit lambda list")->expected(0, -1);
  sweep->add_option("--lambda-grid", o.lambda_grid, "list | geometric | linear");
  sweep->add_option("--lambda-start", o.lambda_start);
  sweep->add_option("--lambda-stop", o.lambda_stop);
  sweep->add_option("--lambda-ratio", o.lambda_ratio);
  sweep->add_option("--lambda-count", o.lambda_count);

  auto* eigs = app.add_subcommand("eigs", "eigenvalues of the discrete generator");
  add_common(eigs, o);
  eigs->add_option("--n-eigs", o.n_eigs, "number of eigenvalues (<= 0: all)");
  eigs->add_option("--order", o.eigs_order, "rightmost | near_imaginary_axis | all");

  auto* witness = app.add_subcommand("witness", "explicit resolvent blow-up sequence");
  add_common(witness, o);
  witness->add_option("--n-min", o.n_min);
  witness->add_option("--n-max", o.n_max);

  auto* static_solve = app.add_subcommand("static-solve", "solve A Z = F for seeded random F");
  add_common(static_solve, o);

  auto* fit = app.add_subcommand("fit", "windowed decay fit of a trajectory");
  add_common(fit, o);
  add_time(fit, o);
  fit->add_option("--input", o.fit_input, "trajectory CSV (simulates when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? bresse::kExitSuccess : bresse::kExitConfigError;
  }

  bresse::ExperimentConfig config;
  try {
    config = resolve(app.get_subcommands().front()->get_name(), o);
  } catch (const bresse::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bresse::kExitConfigError;
  }
  return bresse::run(config, std::cerr);
}
