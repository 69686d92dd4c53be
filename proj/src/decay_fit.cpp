#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "bresse/evolution.hpp"

namespace bresse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  LineFit f;
  f.intercept = c(0);
  f.slope = c(1);
  f.rss = (a * c - b).squaredNorm();
  return f;
}

}  // namespace

const char* model_name(DecayModel m) {
  switch (m) {
    case DecayModel::exponential: return "exponential";
    case DecayModel::power_log: return "power_log";
  }
  return "?";
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> energies,
                   const std::vector<FitWindow>& windows, const FitOptions& options) {
  if (times.size() != energies.size() || times.empty()) {
    throw InvalidInput("fit_decay: times and energies must be nonempty and of equal length");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidInput("fit_decay: times must be strictly increasing");
  }
  if (options.min_samples < 2) throw InvalidInput("fit_decay: min_samples must be >= 2");
  const double e0 = energies[0];
  if (!(e0 > 0.0)) throw InvalidInput("fit_decay: initial energy must be positive");
  const double floor = options.underflow_factor * std::numeric_limits<double>::epsilon() * e0;
  const double t_first = times.front();
  const double t_last = times.back();

  auto usable = [&](std::size_t i) { return energies[i] > floor && std::isfinite(energies[i]); };

  DecayFit out;
  for (const FitWindow& w : windows) {
    if (!(w.t_start >= 2.0)) throw InvalidInput("fit_decay: windows must start at t >= 2");
    if (!(w.t_end > w.t_start)) throw InvalidInput("fit_decay: window end must exceed its start");
    if (w.t_start < t_first || w.t_end > t_last * (1.0 + 1e-12)) {
      throw InvalidInput("fit_decay: window lies outside the sampled time range");
    }
    WindowRate r;
    r.t_start = w.t_start;
    r.t_end = w.t_end;
    std::vector<double> x;
    std::vector<double> y;
    bool underflow = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < w.t_start || times[i] > w.t_end) continue;
      if (!usable(i)) {
        underflow = true;
        continue;
      }
      x.push_back(times[i]);
      y.push_back(std::log(energies[i]));
    }
    r.samples = static_cast<int>(x.size());
    if (underflow) {
      r.excluded = true;
      r.reason = "energy below underflow threshold";
    } else if (r.samples < options.min_samples) {
      r.excluded = true;
      r.reason = "fewer than " + std::to_string(options.min_samples) + " samples";
    }
    r.rate = r.excluded ? kNaN : -least_squares(x, y).slope;
    out.window_rates.push_back(r);
  }

  // Verdict over successive valid windows.
  std::vector<double> rates;
  for (const WindowRate& r : out.window_rates) {
    if (!r.excluded) rates.push_back(r.rate);
  }
  if (rates.size() >= 2) {
    bool decreasing = true;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < rates.size(); ++j) {
      const double ratio = rates[j + 1] > 0.0 ? rates[j] / rates[j + 1] : kNaN;
      if (!(ratio >= options.rate_ratio_min)) decreasing = false;
      min_ratio = std::isnan(ratio) ? kNaN : std::min(min_ratio, ratio);
      if (std::isnan(min_ratio)) break;
    }
    out.min_rate_ratio = min_ratio;
    out.non_exponential = decreasing && !std::isnan(min_ratio);
  } else {
    out.min_rate_ratio = kNaN;
    out.non_exponential = false;
  }

  // Global fits.
  const double fit_end = options.fit_end.value_or(t_last);
  if (!(options.fit_start >= 2.0) || !(fit_end > options.fit_start)) {
    throw InvalidInput("fit_decay: global fit range must satisfy 2 <= t_start < t_end");
  }
  std::vector<double> t;
  std::vector<double> le;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < options.fit_start || times[i] > fit_end || !usable(i)) continue;
    t.push_back(times[i]);
    le.push_back(std::log(energies[i]));
  }
  if (static_cast<int>(t.size()) < options.min_samples) {
    throw InvalidInput("fit_decay: fewer than " + std::to_string(options.min_samples) +
                       " usable samples in the global fit range");
  }
  out.window = {options.fit_start, fit_end};

  {
    const LineFit f = least_squares(t, le);
    out.exponential = {DecayModel::exponential, -f.slope, std::exp(f.intercept), f.rss, options.fit_start, fit_end,
                       static_cast<int>(t.size())};
  }
  {
    std::vector<double> x(t.size());
    std::vector<double> y(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double lt = std::log(t[i]);
      x[i] = std::log(lt / t[i]);
      y[i] = le[i] - 2.0 * std::log(lt);
    }
    const LineFit f = least_squares(x, y);
    out.power_log = {DecayModel::power_log, f.slope, std::exp(f.intercept), f.rss, options.fit_start, fit_end,
                     static_cast<int>(t.size())};
  }
  const ModelFit& best = out.power_log.rss < out.exponential.rss ? out.power_log : out.exponential;
  out.model = best.model;
  out.parameter = best.parameter;
  out.amplitude = best.amplitude;
  out.goodness = best.rss;
  return out;
}

DecayFit fit_decay(const Trajectory& traj, const std::vector<FitWindow>& windows, const FitOptions& options) {
  return fit_decay(std::span<const double>(traj.times), std::span<const double>(traj.energies), windows, options);
}

}  // namespace bresse
