#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bresse/evolution.hpp"
#include "bresse/params.hpp"

namespace bresse {

enum class Experiment { simulate, sweep, eigs, witness, static_solve, fit };

const char* experiment_name(Experiment e);
/// Accepts the JSON spelling ("static_solve") and the subcommand one ("static-solve").
Experiment parse_experiment(const std::string& name);

/// Flat experiment description; every field has a default and all of them
/// are written back into the output metadata.
///
/// JSON keys (defaults in brackets):
///   experiment          simulate | sweep | eigs | witness | static_solve | fit [simulate]
///   rho1 rho2 b k k0 l delta                          [1 1 1 1 1 0.5 1]
///   n_cells             grid cells                    [128]
///   seed                random data seed              [1]
///   output_dir          artifact directory            ["out"]
///
///   lambda_grid         list | geometric | linear     [list]
///   lambdas             explicit lambda list          [[]]
///   lambda_start        first point (geometric, linear) [1]
///   lambda_stop         last point (linear)           [100]
///   lambda_ratio        ratio (geometric)             [2]
///   lambda_count        number of points              [0]
///   resolvent_tol       relative accuracy             [1e-6]
///   max_iterations      Lanczos iterations            [200]
///
///   n_eigs              eigenvalues (<= 0: all, dense) [0]
///   eigs_order          rightmost | near_imaginary_axis | all [all]
///   eigs_shift_im       shift-invert target (Im)      [0]
///   eigs_dense_limit    cells up to which dense is used [256]
///
///   n_min n_max         witness indices               [1 8]
///
///   dt t_end            time step and horizon         [0.01 10]
///   sample_every        steps between samples         [1]
///   graph_norm_orders   extra graph norm columns      [[]]
///   initial_data        mode | smooth | file          [mode]
///   mode_number         n of sin(n pi x), cos(n pi x) [1]
///   component_weights   phi phi_t psi psi_t w w_t     [1 0 0 0 0 0]
///   initial_file        state CSV for initial_data=file [""]
///
///   windows             [[t0, t1], ...]               [[10,50],[50,250],[250,1250]]
///   rate_ratio_min      verdict factor                [1.5]
///   fit_start fit_end   global fit range (null: last sample) [2 null]
///   fit_input           trajectory CSV to fit ("" simulates first) [""]
struct ExperimentConfig {
  Experiment experiment = Experiment::simulate;
  PhysicalParams params;
  int n_cells = 128;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  std::string lambda_grid = "list";
  std::vector<double> lambdas;
  double lambda_start = 1.0;
  double lambda_stop = 100.0;
  double lambda_ratio = 2.0;
  int lambda_count = 0;
  double resolvent_tol = 1e-6;
  int max_iterations = 200;

  int n_eigs = 0;
  std::string eigs_order = "all";
  double eigs_shift_im = 0.0;
  int eigs_dense_limit = 256;

  int n_min = 1;
  int n_max = 8;

  double dt = 0.01;
  double t_end = 10.0;
  int sample_every = 1;
  std::vector<int> graph_norm_orders;
  std::string initial_data = "mode";
  int mode_number = 1;
  std::vector<double> component_weights{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  std::string initial_file;

  std::vector<FitWindow> windows{{10.0, 50.0}, {50.0, 250.0}, {250.0, 1250.0}};
  double rate_ratio_min = 1.5;
  double fit_start = 2.0;
  std::optional<double> fit_end;
  std::string fit_input;

  /// Throws InvalidInput on any inconsistent field.
  void validate() const;
  /// Sweep abscissae resolved from the lambda_* fields.
  [[nodiscard]] std::vector<double> lambda_values() const;

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Unknown keys and wrongly typed values throw InvalidInput.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// SHA-256 (hex) of the canonical JSON dump, output_dir excluded.
std::string config_hash(const ExperimentConfig& config);

}  // namespace bresse
