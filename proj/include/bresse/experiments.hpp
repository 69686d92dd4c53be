#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bresse/config.hpp"
#include "bresse/spectral_space.hpp"

namespace bresse {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNumericalFailure = 2;

/// Initial state described by the config (mode, smooth or file), projected
/// onto the zero-mean constraints except for file input, which is used as is.
State initial_state(const ExperimentConfig& config, const Grid& grid);

/// Reads the t and energy columns of a trajectory CSV ('#' lines skipped).
void read_trajectory_csv(std::istream& is, std::vector<double>& times, std::vector<double>& energies);

/// Runs the configured experiment and writes into config.output_dir:
///   metadata.json    resolved config, hash, version, timestamp, admissibility, status
///   trajectory.csv   simulate, fit (when simulated)
///   sweep.csv | spectrum.csv | witness.csv
///   static_forcing.csv, static_solution.csv
///   fit.json
/// Every CSV starts with "# config_hash=<sha256>". Returns kExitSuccess,
/// kExitConfigError or kExitNumericalFailure; artifacts written before a
/// failure are kept and the failure is recorded in metadata.json.
int run(const ExperimentConfig& config, std::ostream& log);

}  // namespace bresse
