#include "bresse/evolution.hpp"

#include <cmath>

namespace bresse {

CayleyStepper::CayleyStepper(const GeneratorMatrix& gen, double dt)
    : dt_(dt), solver_(gen, dt > 0.0 && std::isfinite(dt) ? 2.0 / dt : 1.0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive and finite");
}

State CayleyStepper::step(const State& s) const {
  const double shift = 2.0 / dt_;
  State next = solver_.solve(s);
  next *= 2.0 * shift;
  next -= s;
  return project_constraints(std::move(next));
}

ComplexState CayleyStepper::step(const ComplexState& s) const {
  const State re = step(real_part(s));
  const State im = step(State(s.grid(), s.data().imag()));
  ComplexState out(s.grid());
  out.data().real() = re.data();
  out.data().imag() = im.data();
  return out;
}

State step(const GeneratorMatrix& gen, const State& state, double dt) { return CayleyStepper(gen, dt).step(state); }

template <typename Scalar>
double graph_norm(const GeneratorMatrix& gen, const BasicState<Scalar>& state, int m) {
  if (m < 0) throw InvalidInput("graph_norm: order must be nonnegative");
  double sum = gen.energy().norm_squared(state);
  BasicState<Scalar> power = state;
  for (int j = 1; j <= m; ++j) {
    power = gen.apply(power);
    sum += gen.energy().norm_squared(power);
  }
  return std::sqrt(sum);
}

template double graph_norm(const GeneratorMatrix&, const State&, int);
template double graph_norm(const GeneratorMatrix&, const ComplexState&, int);

Trajectory evolve(const GeneratorMatrix& gen, const State& state0, double dt, double t_end,
                  const EvolveOptions& options) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("evolve: dt must be positive and finite");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw InvalidInput("evolve: t_end must be >= dt");
  if (options.sample_every < 1) throw InvalidInput("evolve: sample_every must be >= 1");
  for (int m : options.graph_norm_orders) {
    if (m < 0) throw InvalidInput("evolve: graph norm orders must be nonnegative");
  }
  gen.energy().check_grid(state0.grid());
  const double scale = state0.data().cwiseAbs().maxCoeff();
  if (constraint_defect(state0) > 1e-10 * std::max(scale, 1e-300)) {
    throw InvalidInput("evolve: initial state violates the zero-mean constraints");
  }

  const CayleyStepper stepper(gen, dt);
  const EnergyProduct& ep = gen.energy();
  const double delta = gen.params().delta;
  const long n_steps = std::lround(t_end / dt);

  Trajectory traj;
  traj.dt = dt;
  traj.steps = n_steps;
  for (int m : options.graph_norm_orders) traj.graph_norms.emplace_back(m, std::vector<double>{});

  State state = state0;
  double energy = 0.5 * ep.norm_squared(state);
  const double e0 = energy;
  double accumulated = 0.0;  // sum of dt <A Phi_mid, Phi_mid>

  auto record = [&](long j) {
    traj.times.push_back(static_cast<double>(j) * dt);
    traj.energies.push_back(energy);
    traj.dissipation.push_back(delta * l2_norm_squared(state.phi_t(), gen.grid()));
    for (auto& [m, values] : traj.graph_norms) values.push_back(graph_norm(gen, state, m));
    if (options.store_states) traj.states.push_back(state);
    if (e0 > 0.0) {
      traj.max_balance_error = std::max(traj.max_balance_error, std::abs(energy - e0 - accumulated) / e0);
    }
  };

  record(0);
  for (long j = 1; j <= n_steps; ++j) {
    State next = stepper.step(state);
    State mid = 0.5 * (state + next);
    accumulated += dt * dissipation_rate(mid, gen.params(), gen.grid());
    const double next_energy = 0.5 * ep.norm_squared(next);
    if (e0 > 0.0) traj.max_step_increase = std::max(traj.max_step_increase, (next_energy - energy) / e0);
    state = std::move(next);
    energy = next_energy;
    if (j % options.sample_every == 0 || j == n_steps) record(j);
  }
  return traj;
}

}  // namespace bresse
