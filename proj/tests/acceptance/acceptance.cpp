// Acceptance driver: one PASS/FAIL line per criterion, exit 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bresse/evolution.hpp"
#include "bresse/resolvent.hpp"
#include "bresse/witness.hpp"
#include "test_support.hpp"

using namespace bresse;
using namespace bresse::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// 1. <A Phi, Phi> + delta ||phi_t||^2 against C h^2 ||Phi||^2, C = 1.
void dissipativity(Outcome& o) {
  const PhysicalParams p = case2_params();
  double prev_bound = 0.0;
  for (int n : {64, 128, 256}) {
    const Grid g(n);
    const GeneratorMatrix gen(p, g);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const State s = random_state(g, 10000 * n + trial);
      // dissipation_rate is -delta ||phi_t||^2
      const double defect = gen.energy().inner(gen.apply(s), s) - dissipation_rate(s, p, g);
      worst = std::max(worst, std::abs(defect) / gen.energy().norm_squared(s));
    }
    const double bound = g.h() * g.h();
    o.detail << " n=" << n << " defect/||Phi||^2=" << worst << " C_meas=" << worst / bound;
    o.require(worst <= bound, "defect <= h^2 at n=" + std::to_string(n));
    if (prev_bound > 0.0) o.require(std::abs(prev_bound / bound - 4.0) < 1e-12, "bound shrinks x4");
    prev_bound = bound;
  }
}

// 2. Energy at delta = 0 to t = 100.
void conservation(Outcome& o) {
  PhysicalParams p = case2_params();
  p.delta = 0.0;
  const Grid g(128);
  StateProfile prof;
  prof.phi = [](double x) { return Complex(x * (1 - x)); };
  prof.psi_t = [](double x) { return Complex(std::cos(kPi * x)); };
  const State s0 = project_constraints(real_part(sample(g, prof)));
  const Trajectory t = evolve(GeneratorMatrix(p, g), s0, 1e-2, 100.0);
  double worst = 0.0;
  for (double e : t.energies) worst = std::max(worst, std::abs(e - t.energies.front()) / t.energies.front());
  o.detail << " max|E(t)-E(0)|/E(0)=" << worst << " over t<=" << t.times.back();
  o.require(worst <= 1e-9, "relative drift <= 1e-9");
}

// 3. Static solves and a manufactured solution on two grids.
void well_posedness(Outcome& o) {
  const PhysicalParams p{1.3, 0.9, 1.1, 1.7, 2.2, 0.6, 0.8};
  {
    const Grid g(128);
    const GeneratorMatrix gen(p, g);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const State f = random_state(g, 500 + trial);
      State r = gen.apply(static_solve(gen, f));
      r -= f;
      worst = std::max(worst, gen.energy().norm(r) / gen.energy().norm(f));
    }
    o.detail << " max residual=" << worst;
    o.require(worst < 1e-10, "static residual < 1e-10");
  }
  const double N = kPi;
  const double a = 1.0, b = 0.5, c = -0.7, d = 0.2, e = 0.4, f = -0.3;
  const double shear = a * N + b + p.l * c;
  const double axial = -c * N - p.l * a;
  const double r2 = (-p.k * N * shear + p.l * p.k0 * axial - p.delta * d) / p.rho1;
  const double r4 = (-p.b * N * N * b - p.k * shear) / p.rho2;
  const double r6 = (p.k0 * N * axial - p.l * p.k * shear) / p.rho1;
  StateProfile z0;
  z0.phi = [&](double x) { return Complex(a * std::sin(N * x)); };
  z0.phi_t = [&](double x) { return Complex(d * std::sin(N * x)); };
  z0.psi = [&](double x) { return Complex(b * std::cos(N * x)); };
  z0.psi_t = [&](double x) { return Complex(e * std::cos(N * x)); };
  z0.w = [&](double x) { return Complex(c * std::cos(N * x)); };
  z0.w_t = [&](double x) { return Complex(f * std::cos(N * x)); };
  StateProfile f0;
  f0.phi = z0.phi_t;
  f0.psi = z0.psi_t;
  f0.w = z0.w_t;
  f0.phi_t = [&](double x) { return Complex(r2 * std::sin(N * x)); };
  f0.psi_t = [&](double x) { return Complex(r4 * std::cos(N * x)); };
  f0.w_t = [&](double x) { return Complex(r6 * std::cos(N * x)); };
  std::vector<double> errs;
  for (int n : {64, 128}) {
    const Grid g(n);
    const GeneratorMatrix gen(p, g);
    const State zh = static_solve(gen, real_part(sample(g, f0)));
    const State exact = real_part(sample(g, z0));
    errs.push_back(gen.energy().norm(zh - exact) / gen.energy().norm(exact));
  }
  const double order = std::log2(errs[0] / errs[1]);
  o.detail << " manufactured err=" << errs[0] << "," << errs[1] << " order=" << order;
  o.require(std::abs(order - 2.0) < 0.2, "manufactured order 2");
}

// 4. Witness ratios grow like lambda_n and are dominated by the resolvent.
void no_exponential_stability(Outcome& o) {
  const int n_cells = 256;
  const int n_max = n_cells / 20;
  const Grid g(n_cells);
  const Grid coarse(128);
  for (const PhysicalParams& p : {case1_params(), case2_params(), case3_params()}) {
    const GeneratorMatrix gen(p, g);
    const GeneratorMatrix gen_coarse(p, coarse);
    const std::vector<WitnessSequence> seq = build_witnesses(p, 1, n_max);
    std::vector<double> lambdas;
    std::vector<double> ratios;
    double worst_f = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_dense = 0.0;
    double max_gap = -std::numeric_limits<double>::infinity();
    bool increasing = true;
    for (const WitnessSequence& ws : seq) {
      const double ratio = ws.norm_phi() / ws.norm_f();
      worst_f = std::max(worst_f, ws.norm_f());
      if (!ratios.empty() && ratio <= ratios.back()) increasing = false;
      lambdas.push_back(ws.lambda_n);
      ratios.push_back(ratio);
      // ||R|| >= ||Phi_h|| / ||(i lambda - A_h) Phi_h|| >= ||Phi_h|| / (||F_h|| (1 + r_h)),
      // r_h the discrete witness residual, checked to be O(h^2) on h, h/2.
      const WitnessReport rep = verify_witness(ws, gen);
      const double lower = rep.norm_phi / (rep.norm_f * (1.0 + rep.residual_coarse));
      const ResolventSample r = resolvent_norm(gen, ws.lambda_n);
      worst_margin = std::min(worst_margin, r.norm_estimate / lower - 1.0);
      max_gap = std::max(max_gap, (ratio - r.norm_estimate) / ratio);
      o.require(rep.second_order, "witness residual O(h^2) at n=" + std::to_string(ws.n));
      o.require(r.ok() && r.norm_estimate >= lower * (1.0 - 1e-6),
                "resolvent >= ratio - O(h^2) at n=" + std::to_string(ws.n));
      if (ws.n <= coarse.n_cells() / 20) {
        ResolventOptions it_only;
        it_only.dense_fallback = false;
        const ResolventSample it = resolvent_norm(gen_coarse, ws.lambda_n, it_only);
        const ResolventSample dense = resolvent_norm_dense(gen_coarse, ws.lambda_n);
        const double dis = std::abs(it.norm_estimate - dense.norm_estimate) / dense.norm_estimate;
        worst_dense = std::max(worst_dense, dis);
        o.require(it.ok() && dis < 1e-2, "dense cross-check at n=" + std::to_string(ws.n));
      }
    }
    const double slope = loglog_slope(lambdas, ratios);
    o.detail << " " << case_name(select_case(p)) << ": max||F||=" << worst_f << " slope=" << slope
             << " min(resolvent/bound-1)=" << worst_margin << " max (ratio-resolvent)/ratio=" << max_gap
             << " dense/iter=" << worst_dense;
    o.require(worst_f <= 1.0 + 1e-12, "||F_n|| <= 1");
    o.require(increasing, "ratios increasing");
    o.require(slope >= 0.9, "log-log slope >= 0.9");
  }
}

// 5. Algebraic identities of the constructed coefficients.
void witness_identities(Outcome& o) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  double worst_independent = 0.0;
  for (WitnessCase c : {WitnessCase::case1, WitnessCase::case2, WitnessCase::case3}) {
    for (int draw = 0; draw < 100; ++draw) {
      const PhysicalParams p = random_case(c, rng);
      const std::optional<double> sup =
          c == WitnessCase::case3 ? std::optional<double>(case3_sup(p)) : std::nullopt;
      for (int n = 1; n <= 50; ++n) {
        WitnessSequence ws;
        try {
          ws = c == WitnessCase::case1 ? build_case1(p, n)
             : c == WitnessCase::case2 ? build_case2(p, n)
                                       : build_case3(p, n, sup);
        } catch (const Error& e) {
          o.require(false, std::string(case_name(c)) + " build: " + e.what());
          continue;
        }
        worst = std::max(worst, ws.identity_residual);
        worst_independent = std::max(worst_independent, independent_residual(ws));
        if (c == WitnessCase::case2) {
          const auto& a = ws.coefficients.a;
          const auto& d = ws.coefficients.d;
          const double id = std::abs(d[0] * a[2] + d[1] * a[3]) / (std::abs(d[0] * a[2]) + std::abs(d[1] * a[3]));
          worst = std::max(worst, id);
        }
      }
    }
  }
  const PhysicalParams p2 = case2_params();
  const double limit = case2_alpha3_limit(p2);
  const double alpha3 = std::abs(build_case2(p2, 10000).coefficients.alpha3);
  const double limit_err = std::abs(alpha3 - std::abs(limit)) / std::abs(limit);
  o.detail << " max identity residual=" << worst << " independent=" << worst_independent
           << " alpha3 limit rel err=" << limit_err;
  o.require(worst <= 1e-12, "identities to 1e-12");
  o.require(worst_independent <= 1e-12, "independent modal residual to 1e-12");
  o.require(limit_err < 1e-2, "case2 alpha3 limit within 1%");
}

// 6. No eigenvalue on the imaginary axis unless the coupling condition fails.
void imaginary_axis(Outcome& o) {
  const Grid g(256);
  for (const PhysicalParams& p : {case1_params(), case2_params(), case3_params()}) {
    const AdmissibilityReport adm = admissibility(p);
    o.require(adm.admissible(), "admissible set " + to_string(p));
    const SpectrumResult r = spectrum(GeneratorMatrix(p, g), 0, SpectrumOrder::rightmost);
    const double re_max = r.pairs.empty() ? 0.0 : r.pairs.front().value.real();
    o.detail << " " << case_name(select_case(p)) << ": " << r.converged << "/" << r.requested
             << " max Re=" << re_max;
    o.require(r.converged == r.requested && r.converged == g.constrained_dimension(), "all eigenpairs resolved");
    o.require(re_max < 0.0, "Re lambda < 0");
  }
  const PhysicalParams bad = resonant_curvature(case2_params(), 1);
  const double predicted = resonant_frequency(bad);
  const ResonanceReport rep = eigenmode_resonance_check(bad, predicted);
  const SpectrumResult near = spectrum_near(GeneratorMatrix(bad, g), Complex(0.0, predicted), 1);
  o.detail << " resonant l=" << bad.l << " predicted lambda=" << predicted << " detector=" << rep.resonant;
  o.require(rep.resonant && rep.consistent_with_admissibility, "detector fires");
  o.require(!admissibility(bad).admissible(), "constructed set violates coupling");
  o.require(near.converged == 1, "eigenvalue near prediction");
  if (near.converged == 1) {
    const Complex mu = near.pairs[0].value;
    const double offset = std::abs(mu.imag() - predicted) / predicted;
    o.detail << " found " << mu.real() << (mu.imag() < 0 ? "" : "+") << mu.imag() << "i rel offset=" << offset;
    o.require(std::abs(mu.real()) < 1e-6, "|Re lambda| < 1e-6");
    o.require(offset < std::pow(kPi * g.h(), 2), "Im lambda within O(h^2) of prediction");
  }
}

// 7. Band maxima of Re lambda over dyadic |Im lambda| bands approach 0.
void no_spectral_gap(Outcome& o) {
  const PhysicalParams p = case1_params();
  const Grid g(256);
  const SpectrumResult r = spectrum(GeneratorMatrix(p, g), 0, SpectrumOrder::all);
  const double speed = std::sqrt(std::max({p.k / p.rho1, p.b / p.rho2, p.k0 / p.rho1}));
  const double resolved = speed * kPi * g.n_cells() / 10.0;
  std::map<int, double> band_max;
  for (const EigenPair& e : r.pairs) {
    const double im = std::abs(e.value.imag());
    if (im < 1.0) continue;
    const int band = static_cast<int>(std::floor(std::log2(im)));
    if (std::ldexp(1.0, band + 1) > resolved) continue;
    auto [it, fresh] = band_max.emplace(band, e.value.real());
    if (!fresh) it->second = std::max(it->second, e.value.real());
  }
  bool monotone = band_max.size() >= 3;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [band, m] : band_max) {
    o.detail << " [" << (1 << band) << "," << (2 << band) << "):" << m;
    if (!(m > prev)) monotone = false;
    prev = m;
  }
  o.require(monotone, "band maxima increase toward 0 over >= 3 resolved bands");
  o.require(prev < 0.0, "all maxima negative");
}

// 8. Damped trajectory from smooth data decays non-exponentially.
void polynomial_decay(Outcome& o) {
  const PhysicalParams p = case2_params();
  const Grid g(128);
  StateProfile prof;
  prof.phi = [](double x) { return Complex(x * (1 - x)); };
  const State s0 = project_constraints(real_part(sample(g, prof)));
  EvolveOptions opts;
  opts.sample_every = 10;
  const Trajectory t = evolve(GeneratorMatrix(p, g), s0, 1e-2, 1250.0, opts);
  bool monotone = t.max_step_increase <= 0.0;
  for (std::size_t i = 1; i < t.energies.size(); ++i) monotone = monotone && t.energies[i] <= t.energies[i - 1];
  const DecayFit f = fit_decay(t, {{10, 50}, {50, 250}, {250, 1250}});
  bool strict = true;
  for (std::size_t i = 0; i < f.window_rates.size(); ++i) {
    const WindowRate& w = f.window_rates[i];
    o.detail << " rate[" << w.t_start << "," << w.t_end << "]=" << w.rate;
    strict = strict && !w.excluded;
    if (i > 0) strict = strict && w.rate < f.window_rates[i - 1].rate;
  }
  o.detail << " min ratio=" << f.min_rate_ratio << " rss exp=" << f.exponential.rss << " powlog=" << f.power_log.rss
           << " q=" << f.power_log.parameter;
  o.require(monotone, "energy nonincreasing");
  o.require(strict && f.non_exponential, "window rates drop by >= 1.5");
  o.require(f.power_log.rss < f.exponential.rss, "power-log fit beats exponential");
}

// 9. Fitter on manufactured curves.
void fitter_oracle(Outcome& o) {
  std::vector<double> t;
  std::vector<double> e;
  for (double x = 2.0; x <= 1e4; x *= 1.005) {
    t.push_back(x);
    const double lt = std::log(x);
    e.push_back(std::pow(lt / x, 2.0 / 3.0) * lt * lt);
  }
  const DecayFit pl = fit_decay(t, e, {{10, 50}, {50, 250}, {250, 1250}});
  t.clear();
  e.clear();
  for (double x = 0.0; x <= 30.0; x += 0.01) {
    t.push_back(x);
    e.push_back(std::exp(-x));
  }
  const DecayFit ex = fit_decay(t, e, {{2, 6}, {6, 12}, {12, 24}});
  o.detail << " power-log q=" << pl.power_log.parameter << " model=" << model_name(pl.model)
           << "; exponential rate=" << ex.parameter << " model=" << model_name(ex.model)
           << " non_exponential=" << ex.non_exponential;
  o.require(std::abs(pl.power_log.parameter - 2.0 / 3.0) <= 0.1 * 2.0 / 3.0, "q within 10% of 2/3");
  o.require(ex.model == DecayModel::exponential && !ex.non_exponential, "exponential verdict");
  o.require(std::abs(ex.parameter - 1.0) <= 1e-2, "rate within 1% of 1");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"dissipativity identity", dissipativity},
      {"conservation at delta=0", conservation},
      {"well-posedness (0 in resolvent set)", well_posedness},
      {"lack of exponential stability", no_exponential_stability},
      {"witness algebraic identities", witness_identities},
      {"imaginary-axis regularity", imaginary_axis},
      {"no spectral gap", no_spectral_gap},
      {"polynomial-type decay", polynomial_decay},
      {"decay-fitter oracle", fitter_oracle},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu (%s):%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
