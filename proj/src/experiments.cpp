#include "bresse/experiments.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "bresse/csv.hpp"
#include "bresse/evolution.hpp"
#include "bresse/generator.hpp"
#include "bresse/resolvent.hpp"
#include "bresse/witness.hpp"

namespace bresse {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json admissibility_json(const AdmissibilityReport& r) {
  json coupling{{"coupling_condition", r.coupling.coupling_condition},
                {"short_circuit", r.coupling.short_circuit},
                {"closest_m", r.coupling.closest_m},
                {"closest_distance", r.coupling.closest_distance}};
  coupling["violating_m"] = r.coupling.violating_m ? json(*r.coupling.violating_m) : json(nullptr);
  return json{{"admissible", r.admissible()},
              {"pi", {{"pi_condition", r.pi.pi_condition},
                      {"nearest_multiple", r.pi.nearest_multiple},
                      {"distance", r.pi.distance}}},
              {"coupling", coupling},
              {"resonance_alpha", r.resonance_alpha}};
}

/// Number or null; JSON has no NaN.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Artifacts {
 public:
  Artifacts(const ExperimentConfig& config, std::ostream& log)
      : dir_(config.output_dir), hash_(config_hash(config)), log_(log) {
    meta_ = {{"config", to_json(config)},
             {"config_hash", hash_},
             {"version", BRESSE_VERSION},
             {"timestamp", utc_timestamp()},
             {"status", "running"},
             {"artifacts", json::array()}};
  }

  void create_dir() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InvalidInput("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  json& meta() { return meta_; }

  std::ofstream open_csv(const std::string& name) {
    std::ofstream os = open(name);
    os << "# config_hash=" << hash_ << "\n";
    return os;
  }

  void write_json(const std::string& name, json body) {
    body["config_hash"] = hash_;
    std::ofstream os = open(name);
    os << body.dump(2) << "\n";
  }

  void finish(const std::string& status, const std::string& error = {}) {
    meta_["status"] = status;
    if (!error.empty()) meta_["error"] = error;
    std::ofstream os(dir_ / "metadata.json");
    os << meta_.dump(2) << "\n";
  }

 private:
  std::ofstream open(const std::string& name) {
    const fs::path path = dir_ / name;
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot write '" + path.string() + "'");
    meta_["artifacts"].push_back(name);
    log_ << "writing " << path.string() << "\n";
    return os;
  }

  fs::path dir_;
  std::string hash_;
  std::ostream& log_;
  json meta_;
};

void write_trajectory(Artifacts& out, const Trajectory& traj) {
  std::ofstream os = out.open_csv("trajectory.csv");
  std::vector<std::string> header{"t", "energy", "dissipation_rate"};
  for (const auto& [m, values] : traj.graph_norms) header.push_back("graph_norm_" + std::to_string(m));
  csv::write_row(os, header);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<std::string> row{csv::format(traj.times[i]), csv::format(traj.energies[i]),
                                 csv::format(traj.dissipation[i])};
    for (const auto& [m, values] : traj.graph_norms) row.push_back(csv::format(values[i]));
    csv::write_row(os, row);
  }
}

Trajectory simulate(const ExperimentConfig& config, const GeneratorMatrix& gen, Artifacts& out) {
  const State s0 = initial_state(config, gen.grid());
  EvolveOptions opts;
  opts.sample_every = config.sample_every;
  opts.graph_norm_orders = config.graph_norm_orders;
  const Trajectory traj = evolve(gen, s0, config.dt, config.t_end, opts);
  write_trajectory(out, traj);
  out.meta()["simulation"] = {{"steps", traj.steps},
                              {"max_balance_error", traj.max_balance_error},
                              {"max_step_increase", traj.max_step_increase}};
  return traj;
}

json fit_json(const DecayFit& fit) {
  auto model = [](const ModelFit& m) {
    return json{{"model", model_name(m.model)}, {"parameter", number(m.parameter)},
                {"amplitude", number(m.amplitude)}, {"rss", number(m.rss)},
                {"t_start", m.t_start}, {"t_end", m.t_end}, {"samples", m.samples}};
  };
  json windows = json::array();
  for (const WindowRate& w : fit.window_rates) {
    windows.push_back({{"t_start", w.t_start}, {"t_end", w.t_end}, {"rate", number(w.rate)},
                       {"samples", w.samples}, {"excluded", w.excluded}, {"reason", w.reason}});
  }
  return json{{"model", model_name(fit.model)},
              {"parameters", {{"exponential_rate", number(fit.exponential.parameter)},
                              {"power_log_exponent", number(fit.power_log.parameter)}}},
              {"goodness", number(fit.goodness)},
              {"exponential", model(fit.exponential)},
              {"power_log", model(fit.power_log)},
              {"windows", windows},
              {"non_exponential", fit.non_exponential},
              {"min_rate_ratio", number(fit.min_rate_ratio)}};
}

int run_simulate(const ExperimentConfig& config, const GeneratorMatrix& gen, Artifacts& out) {
  simulate(config, gen, out);
  return kExitSuccess;
}

int run_fit(const ExperimentConfig& config, const GeneratorMatrix& gen, Artifacts& out) {
  std::vector<double> times;
  std::vector<double> energies;
  if (config.fit_input.empty()) {
    const Trajectory traj = simulate(config, gen, out);
    times = traj.times;
    energies = traj.energies;
  } else {
    std::ifstream in(config.fit_input);
    if (!in) throw InvalidInput("cannot open fit_input '" + config.fit_input + "'");
    read_trajectory_csv(in, times, energies);
  }
  FitOptions opts;
  opts.rate_ratio_min = config.rate_ratio_min;
  opts.fit_start = config.fit_start;
  opts.fit_end = config.fit_end;
  const DecayFit fit = fit_decay(times, energies, config.windows, opts);
  out.write_json("fit.json", fit_json(fit));
  return kExitSuccess;
}

int run_sweep(const ExperimentConfig& config, const GeneratorMatrix& gen, Artifacts& out) {
  ResolventOptions opts;
  opts.tol = config.resolvent_tol;
  opts.max_iterations = config.max_iterations;
  opts.seed = config.seed;
  const std::vector<ResolventSample> samples = sweep(gen, config.lambda_values(), opts);
  std::ofstream os = out.open_csv("sweep.csv");
  csv::write_row(os, {"lambda", "norm_estimate", "method", "residual", "iterations"});
  int failed = 0;
  for (const ResolventSample& s : samples) {
    if (!s.ok()) ++failed;
    csv::write_row(os, {csv::format(s.lambda), csv::format(s.norm_estimate), method_name(s.method),
                        csv::format(s.residual), csv::format(s.iterations)});
  }
  out.meta()["sweep"] = {{"points", samples.size()}, {"failed", failed}};
  if (failed > 0) throw NumericalFailure(std::to_string(failed) + " sweep point(s) failed");
  return kExitSuccess;
}

int run_eigs(const ExperimentConfig& config, const GeneratorMatrix& gen, Artifacts& out) {
  SpectrumOrder order = SpectrumOrder::all;
  if (config.eigs_order == "rightmost") order = SpectrumOrder::rightmost;
  if (config.eigs_order == "near_imaginary_axis") order = SpectrumOrder::near_imaginary_axis;
  SpectrumOptions opts;
  opts.dense_limit = config.eigs_dense_limit;
  opts.shift = Complex(0.0, config.eigs_shift_im);
  const SpectrumResult result = spectrum(gen, config.n_eigs, order, opts);
  std::ofstream os = out.open_csv("spectrum.csv");
  csv::write_row(os, {"re_lambda", "im_lambda", "residual"});
  for (const EigenPair& e : result.pairs) {
    csv::write_row(os, {csv::format(e.value.real()), csv::format(e.value.imag()), csv::format(e.residual)});
  }
  out.meta()["spectrum"] = {{"requested", result.requested}, {"converged", result.converged}, {"dense", result.dense}};
  if (result.converged < result.requested) {
    throw NumericalFailure("eigensolver converged " + std::to_string(result.converged) + " of " +
                           std::to_string(result.requested) + " eigenpairs");
  }
  return kExitSuccess;
}

int run_witness(const ExperimentConfig& config, const GeneratorMatrix& gen, Artifacts& out) {
  const std::vector<WitnessSequence> seq = build_witnesses(config.params, config.n_min, config.n_max);
  std::ofstream os = out.open_csv("witness.csv");
  csv::write_row(os, {"case", "n", "lambda_n", "norm_F", "norm_Phi", "ratio", "discrete_residual"});
  for (const WitnessSequence& ws : seq) {
    const WitnessReport r = measure_witness(ws, gen);
    csv::write_row(os, {case_name(ws.case_tag), csv::format(ws.n), csv::format(ws.lambda_n), csv::format(ws.norm_f()),
                        csv::format(ws.norm_phi()), csv::format(ws.norm_phi() / ws.norm_f()),
                        csv::format(r.residual_coarse)});
  }
  return kExitSuccess;
}

int run_static_solve(const ExperimentConfig& config, const GeneratorMatrix& gen, Artifacts& out) {
  const Grid& grid = gen.grid();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  State f(grid);
  for (Eigen::Index i = 0; i < f.data().size(); ++i) f.data()(i) = unif(rng);
  f = project_constraints(std::move(f));
  const State z = static_solve(gen, f);
  {
    std::ofstream os = out.open_csv("static_forcing.csv");
    write_state_csv(os, f);
  }
  {
    std::ofstream os = out.open_csv("static_solution.csv");
    write_state_csv(os, z);
  }
  State r = gen.apply(z);
  r -= f;
  out.meta()["static_solve"] = {{"residual", gen.energy().norm(r) / gen.energy().norm(f)},
                                {"bilinear_form_min_eigenvalue", bilinear_form_min_eigenvalue(gen)}};
  return kExitSuccess;
}

}  // namespace

State initial_state(const ExperimentConfig& config, const Grid& grid) {
  if (config.initial_data == "file") {
    std::ifstream in(config.initial_file);
    if (!in) throw InvalidInput("cannot open initial_file '" + config.initial_file + "'");
    const ComplexState s = read_state_csv(in);
    if (!(s.grid() == grid)) {
      throw InvalidInput("initial_file has " + std::to_string(s.grid().n_cells()) + " cells, config has " +
                         std::to_string(grid.n_cells()));
    }
    return real_part(s);
  }
  if (config.component_weights.size() != 6) throw InvalidInput("component_weights needs six entries");
  const std::vector<double>& wt = config.component_weights;
  std::function<double(double)> odd;
  std::function<double(double)> even;
  if (config.initial_data == "mode") {
    const double nn = config.mode_number * std::numbers::pi;
    odd = [nn](double x) { return std::sin(nn * x); };
    even = [nn](double x) { return std::cos(nn * x); };
  } else if (config.initial_data == "smooth") {
    odd = [](double x) { return x * (1.0 - x); };
    even = [](double x) { return x * x * (1.0 - 2.0 * x / 3.0); };
  } else {
    throw InvalidInput("unknown initial_data '" + config.initial_data + "'");
  }
  auto scaled = [](std::function<double(double)> f, double a) {
    return [f, a](double x) { return Complex(a * f(x)); };
  };
  StateProfile profile;
  profile.phi = scaled(odd, wt[0]);
  profile.phi_t = scaled(odd, wt[1]);
  profile.psi = scaled(even, wt[2]);
  profile.psi_t = scaled(even, wt[3]);
  profile.w = scaled(even, wt[4]);
  profile.w_t = scaled(even, wt[5]);
  return project_constraints(real_part(sample(grid, profile)));
}

void read_trajectory_csv(std::istream& is, std::vector<double>& times, std::vector<double>& energies) {
  times.clear();
  energies.clear();
  std::string line;
  int t_col = -1;
  int e_col = -1;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = csv::split_row(line);
    if (t_col < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "t") t_col = static_cast<int>(i);
        if (fields[i] == "energy") e_col = static_cast<int>(i);
      }
      if (t_col < 0 || e_col < 0) throw InvalidInput("trajectory csv: header needs t and energy columns");
      continue;
    }
    if (static_cast<int>(fields.size()) <= std::max(t_col, e_col)) throw InvalidInput("trajectory csv: short row");
    times.push_back(csv::parse_double(fields[static_cast<std::size_t>(t_col)]));
    energies.push_back(csv::parse_double(fields[static_cast<std::size_t>(e_col)]));
  }
  if (t_col < 0) throw InvalidInput("trajectory csv: missing header");
}

int run(const ExperimentConfig& config, std::ostream& log) {
  Artifacts out(config, log);
  try {
    out.meta()["admissibility"] = admissibility_json(admissibility(config.params));
  } catch (const InvalidInput& e) {
    out.meta()["admissibility"] = {{"error", e.what()}};
  }
  try {
    config.validate();
    out.create_dir();
  } catch (const Error& e) {
    log << "config error: " << e.what() << "\n";
    try {
      out.create_dir();
      out.finish("config_error", e.what());
    } catch (const Error&) {
    }
    return kExitConfigError;
  }

  try {
    const GeneratorMatrix gen(config.params, Grid(config.n_cells));
    int status = kExitSuccess;
    switch (config.experiment) {
      case Experiment::simulate: status = run_simulate(config, gen, out); break;
      case Experiment::sweep: status = run_sweep(config, gen, out); break;
      case Experiment::eigs: status = run_eigs(config, gen, out); break;
      case Experiment::witness: status = run_witness(config, gen, out); break;
      case Experiment::static_solve: status = run_static_solve(config, gen, out); break;
      case Experiment::fit: status = run_fit(config, gen, out); break;
    }
    out.finish("ok");
    return status;
  } catch (const NumericalFailure& e) {
    log << "numerical failure: " << e.what() << "\n";
    out.finish("numerical_failure", e.what());
    return kExitNumericalFailure;
  } catch (const InvalidInput& e) {
    log << "config error: " << e.what() << "\n";
    out.finish("config_error", e.what());
    return kExitConfigError;
  }
}

}  // namespace bresse
