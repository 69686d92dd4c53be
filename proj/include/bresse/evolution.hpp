#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bresse/generator.hpp"
#include "bresse/shifted_solver.hpp"

namespace bresse {

/// Implicit midpoint rule Phi+ = (I - dt/2 A)^{-1} (I + dt/2 A) Phi, written
/// as Phi+ = 2 s (s - A)^{-1} Phi - Phi with s = 2/dt so that a single
/// factorization of the shifted system serves every step.
class CayleyStepper {
 public:
  CayleyStepper(const GeneratorMatrix& gen, double dt);

  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] State step(const State& s) const;
  [[nodiscard]] ComplexState step(const ComplexState& s) const;

 private:
  double dt_;
  ShiftedSolver<double> solver_;
};

/// One step; factorizes on every call.
State step(const GeneratorMatrix& gen, const State& state, double dt);

/// (sum_{j=0..m} ||A^j Phi||^2)^{1/2}
template <typename Scalar>
double graph_norm(const GeneratorMatrix& gen, const BasicState<Scalar>& state, int m);

struct Trajectory {
  double dt = 0.0;
  long steps = 0;
  std::vector<double> times;
  /// E = 1/2 ||Phi||^2
  std::vector<double> energies;
  /// delta ||phi_t||^2 (nonnegative)
  std::vector<double> dissipation;
  /// (m, ||Phi||_{D(A^m)} at every sample)
  std::vector<std::pair<int, std::vector<double>>> graph_norms;
  std::vector<State> states;
  /// max over samples of |E(t) - E(0) - Q(t)| / E(0), Q the accumulated
  /// dt <A Phi_mid, Phi_mid> over all steps.
  double max_balance_error = 0.0;
  /// Largest per-step energy increase E(Phi+) - E(Phi), relative to E(0).
  double max_step_increase = 0.0;
};

struct EvolveOptions {
  int sample_every = 1;
  std::vector<int> graph_norm_orders;
  bool store_states = false;
};

/// Steps to n = round(t_end / dt) (throws InvalidInput unless t_end >= dt),
/// sampling t = 0 and every sample_every-th step plus the final step.
Trajectory evolve(const GeneratorMatrix& gen, const State& state0, double dt, double t_end,
                  const EvolveOptions& options = {});

// --- decay fitting --------------------------------------------------------

enum class DecayModel { exponential, power_log };
const char* model_name(DecayModel m);

struct FitWindow {
  double t_start = 0.0;
  double t_end = 0.0;

  bool operator==(const FitWindow&) const = default;
};

struct WindowRate {
  double t_start = 0.0;
  double t_end = 0.0;
  /// -slope of ln E over the window (NaN when excluded)
  double rate = 0.0;
  int samples = 0;
  bool excluded = false;
  std::string reason;
};

/// Least squares in ln E.
/// exponential: ln E = ln A - r t, parameter = r.
/// power_log:   ln E = ln C + q ln(ln t / t) + 2 ln ln t, parameter = q.
struct ModelFit {
  DecayModel model = DecayModel::exponential;
  double parameter = 0.0;
  double amplitude = 0.0;
  double rss = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  int samples = 0;
};

struct DecayFit {
  /// The global model with the smaller residual.
  DecayModel model = DecayModel::exponential;
  double parameter = 0.0;
  double amplitude = 0.0;
  double goodness = 0.0;
  FitWindow window;
  ModelFit exponential;
  ModelFit power_log;
  std::vector<WindowRate> window_rates;
  /// Rates of successive valid windows each drop by at least rate_ratio_min.
  bool non_exponential = false;
  /// Smallest r_j / r_{j+1} over successive valid windows (NaN if < 2).
  double min_rate_ratio = 0.0;
};

struct FitOptions {
  double rate_ratio_min = 1.5;
  /// Global fit range; t_end defaults to the last sample.
  double fit_start = 2.0;
  std::optional<double> fit_end;
  int min_samples = 8;
  /// Samples with E below underflow_factor * eps * E(0) are dropped.
  double underflow_factor = 1e2;
};

/// Throws InvalidInput if a window starts before t = 2, is empty or lies
/// outside the samples, or if the series are malformed. Windows that are
/// too short or underflow are kept in window_rates, flagged as excluded.
DecayFit fit_decay(std::span<const double> times, std::span<const double> energies,
                   const std::vector<FitWindow>& windows, const FitOptions& options = {});
DecayFit fit_decay(const Trajectory& traj, const std::vector<FitWindow>& windows, const FitOptions& options = {});

}  // namespace bresse
