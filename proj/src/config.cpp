#include "bresse/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "bresse/resolvent.hpp"

namespace bresse {

using nlohmann::json;

namespace {

constexpr const char* kExperimentNames[] = {"simulate", "sweep", "eigs", "witness", "static_solve", "fit"};

template <typename T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput("config: " + what);
}

}  // namespace

const char* experiment_name(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment parse_experiment(const std::string& name) {
  std::string key = name;
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  for (int i = 0; i < 6; ++i) {
    if (key == kExperimentNames[i]) return static_cast<Experiment>(i);
  }
  throw InvalidInput("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  params.validate();
  require(n_cells >= Grid::kMinCells, "n_cells must be >= " + std::to_string(Grid::kMinCells));
  require(lambda_grid == "list" || lambda_grid == "geometric" || lambda_grid == "linear",
          "lambda_grid must be list, geometric or linear");
  for (double v : lambdas) require(std::isfinite(v), "lambdas must be finite");
  require(lambda_count >= 0, "lambda_count must be >= 0");
  require(resolvent_tol > 0.0 && resolvent_tol < 1.0, "resolvent_tol must lie in (0, 1)");
  require(max_iterations >= 2, "max_iterations must be >= 2");
  require(eigs_order == "rightmost" || eigs_order == "near_imaginary_axis" || eigs_order == "all",
          "eigs_order must be rightmost, near_imaginary_axis or all");
  require(std::isfinite(eigs_shift_im), "eigs_shift_im must be finite");
  require(n_min >= 1 && n_max >= n_min, "witness range needs 1 <= n_min <= n_max");
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  require(t_end >= dt && std::isfinite(t_end), "t_end must be >= dt");
  require(sample_every >= 1, "sample_every must be >= 1");
  for (int m : graph_norm_orders) require(m >= 0, "graph_norm_orders must be nonnegative");
  require(initial_data == "mode" || initial_data == "smooth" || initial_data == "file",
          "initial_data must be mode, smooth or file");
  require(mode_number >= 1, "mode_number must be >= 1");
  require(component_weights.size() == 6, "component_weights needs six entries");
  require(initial_data != "file" || !initial_file.empty(), "initial_data=file needs initial_file");
  for (const FitWindow& w : windows) require(w.t_start >= 2.0 && w.t_end > w.t_start, "windows need 2 <= t0 < t1");
  require(rate_ratio_min > 0.0, "rate_ratio_min must be positive");
  require(fit_start >= 2.0, "fit_start must be >= 2");
  require(!fit_end || *fit_end > fit_start, "fit_end must exceed fit_start");
}

std::vector<double> ExperimentConfig::lambda_values() const {
  if (lambda_grid == "geometric") return geometric_grid(lambda_start, lambda_ratio, lambda_count);
  if (lambda_grid == "linear") return linear_grid(lambda_start, lambda_stop, lambda_count);
  return lambdas;
}

json to_json(const ExperimentConfig& c) {
  json windows = json::array();
  for (const FitWindow& w : c.windows) windows.push_back({w.t_start, w.t_end});
  return json{
      {"experiment", experiment_name(c.experiment)},
      {"rho1", c.params.rho1},
      {"rho2", c.params.rho2},
      {"b", c.params.b},
      {"k", c.params.k},
      {"k0", c.params.k0},
      {"l", c.params.l},
      {"delta", c.params.delta},
      {"n_cells", c.n_cells},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"lambda_grid", c.lambda_grid},
      {"lambdas", c.lambdas},
      {"lambda_start", c.lambda_start},
      {"lambda_stop", c.lambda_stop},
      {"lambda_ratio", c.lambda_ratio},
      {"lambda_count", c.lambda_count},
      {"resolvent_tol", c.resolvent_tol},
      {"max_iterations", c.max_iterations},
      {"n_eigs", c.n_eigs},
      {"eigs_order", c.eigs_order},
      {"eigs_shift_im", c.eigs_shift_im},
      {"eigs_dense_limit", c.eigs_dense_limit},
      {"n_min", c.n_min},
      {"n_max", c.n_max},
      {"dt", c.dt},
      {"t_end", c.t_end},
      {"sample_every", c.sample_every},
      {"graph_norm_orders", c.graph_norm_orders},
      {"initial_data", c.initial_data},
      {"mode_number", c.mode_number},
      {"component_weights", c.component_weights},
      {"initial_file", c.initial_file},
      {"windows", windows},
      {"rate_ratio_min", c.rate_ratio_min},
      {"fit_start", c.fit_start},
      {"fit_end", c.fit_end ? json(*c.fit_end) : json(nullptr)},
      {"fit_input", c.fit_input},
  };
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("config: top level must be a JSON object");
  static const std::set<std::string> known = [] {
    std::set<std::string> keys;
    const json defaults = to_json(ExperimentConfig{});
    for (const auto& [key, value] : defaults.items()) keys.insert(key);
    return keys;
  }();
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidInput("config: unknown key '" + key + "'");
  }

  ExperimentConfig c;
  std::string experiment = experiment_name(c.experiment);
  read(j, "experiment", experiment);
  c.experiment = parse_experiment(experiment);
  read(j, "rho1", c.params.rho1);
  read(j, "rho2", c.params.rho2);
  read(j, "b", c.params.b);
  read(j, "k", c.params.k);
  read(j, "k0", c.params.k0);
  read(j, "l", c.params.l);
  read(j, "delta", c.params.delta);
  read(j, "n_cells", c.n_cells);
  read(j, "seed", c.seed);
  read(j, "output_dir", c.output_dir);
  read(j, "lambda_grid", c.lambda_grid);
  read(j, "lambdas", c.lambdas);
  read(j, "lambda_start", c.lambda_start);
  read(j, "lambda_stop", c.lambda_stop);
  read(j, "lambda_ratio", c.lambda_ratio);
  read(j, "lambda_count", c.lambda_count);
  read(j, "resolvent_tol", c.resolvent_tol);
  read(j, "max_iterations", c.max_iterations);
  read(j, "n_eigs", c.n_eigs);
  read(j, "eigs_order", c.eigs_order);
  read(j, "eigs_shift_im", c.eigs_shift_im);
  read(j, "eigs_dense_limit", c.eigs_dense_limit);
  read(j, "n_min", c.n_min);
  read(j, "n_max", c.n_max);
  read(j, "dt", c.dt);
  read(j, "t_end", c.t_end);
  read(j, "sample_every", c.sample_every);
  read(j, "graph_norm_orders", c.graph_norm_orders);
  read(j, "initial_data", c.initial_data);
  read(j, "mode_number", c.mode_number);
  read(j, "component_weights", c.component_weights);
  read(j, "initial_file", c.initial_file);
  if (auto it = j.find("windows"); it != j.end()) {
    std::vector<std::vector<double>> raw;
    read(j, "windows", raw);
    c.windows.clear();
    for (const auto& w : raw) {
      if (w.size() != 2) throw InvalidInput("config: each window is a pair [t0, t1]");
      c.windows.push_back({w[0], w[1]});
    }
  }
  read(j, "rate_ratio_min", c.rate_ratio_min);
  read(j, "fit_start", c.fit_start);
  if (auto it = j.find("fit_end"); it != j.end() && !it->is_null()) {
    double v = 0.0;
    read(j, "fit_end", v);
    c.fit_end = v;
  }
  read(j, "fit_input", c.fit_input);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output_dir");
  const std::string text = j.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw NumericalFailure("config_hash: SHA-256 failed");
  }
  std::ostringstream hex;
  hex << std::hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.width(2);
    hex.fill('0');
    hex << static_cast<int>(digest[i]);
  }
  return hex.str();
}

}  // namespace bresse
