#include "bresse/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bresse {

namespace {

constexpr double kPi = std::numbers::pi;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void require_case(const PhysicalParams& p, WitnessCase c, int n) {
  if (n < 1) throw InvalidInput("witness: mode index must be >= 1");
  if (select_case(p) != c) {
    throw InvalidInput(std::string("witness: parameters do not belong to ") + case_name(c));
  }
}

void require_identity(double residual, const char* what, int n) {
  if (!(residual <= kIdentityTol)) {
    throw NumericalFailure(std::string("witness: ") + what + " fails at n = " + std::to_string(n) +
                           " (relative residual " + std::to_string(residual) + ")");
  }
}

double relative(Complex sum, double scale) { return scale > 0.0 ? std::abs(sum) / scale : 0.0; }

}  // namespace

const char* case_name(WitnessCase c) {
  switch (c) {
    case WitnessCase::case1: return "case1";
    case WitnessCase::case2: return "case2";
    case WitnessCase::case3: return "case3";
  }
  return "?";
}

WitnessCase select_case(const PhysicalParams& p) {
  p.validate();
  if (nearly_equal(p.b * p.rho1, p.k0 * p.rho2)) return WitnessCase::case1;
  if (nearly_equal(p.k, p.k0)) return WitnessCase::case3;
  return WitnessCase::case2;
}

double modal_residual(const PhysicalParams& p, double N, double lambda, const Eigen::Vector3cd& x, Complex f4,
                      Complex f6) {
  const Complex mu(0.0, -p.delta * lambda / (N * N));
  const double l = p.l;
  const double lam2 = lambda * lambda;
  // Diagonal coefficients are split into their products so the scale
  // reflects cancellation inside them as well.
  const Complex row_phi[] = {p.k * N * N * x(0), -mu * N * N * x(0), -p.rho1 * lam2 * x(0), l * l * p.k0 * x(0),
                             p.k * N * x(1), l * (p.k + p.k0) * N * x(2)};
  const Complex row_psi[] = {p.k * N * x(0), p.b * N * N * x(1), -p.rho2 * lam2 * x(1), p.k * x(1),
                             p.k * l * x(2), -p.rho2 * f4};
  const Complex row_w[] = {l * (p.k + p.k0) * N * x(0), l * p.k * x(1), p.k0 * N * N * x(2), -p.rho1 * lam2 * x(2),
                           l * l * p.k * x(2), -p.rho1 * f6};
  auto rel = [](const auto& terms) {
    Complex sum{};
    double scale = 0.0;
    for (const Complex& t : terms) {
      sum += t;
      scale += std::abs(t);
    }
    return relative(sum, scale);
  };
  return std::max({rel(row_phi), rel(row_psi), rel(row_w)});
}

ComplexState WitnessSequence::phi(const Grid& grid) const {
  const double nn = N;
  const Complex il(0.0, lambda_n);
  const Eigen::Vector3cd a = amplitude;
  StateProfile prof;
  prof.phi = [=](double x) { return a(0) * std::sin(nn * x); };
  prof.phi_t = [=](double x) { return il * a(0) * std::sin(nn * x); };
  prof.psi = [=](double x) { return a(1) * std::cos(nn * x); };
  prof.psi_t = [=](double x) { return il * a(1) * std::cos(nn * x); };
  prof.w = [=](double x) { return a(2) * std::cos(nn * x); };
  prof.w_t = [=](double x) { return il * a(2) * std::cos(nn * x); };
  return sample(grid, prof);
}

ComplexState WitnessSequence::forcing(const Grid& grid) const {
  const double nn = N;
  const Complex g4 = f4;
  const Complex g6 = f6;
  StateProfile prof;
  prof.psi_t = [=](double x) { return g4 * std::cos(nn * x); };
  prof.w_t = [=](double x) { return g6 * std::cos(nn * x); };
  return sample(grid, prof);
}

double WitnessSequence::norm_f() const {
  return std::sqrt(0.5 * (params.rho2 * std::norm(f4) + params.rho1 * std::norm(f6)));
}

double WitnessSequence::norm_phi() const {
  const PhysicalParams& p = params;
  const Complex shear = N * amplitude(0) + amplitude(1) + p.l * amplitude(2);
  const Complex axial = N * amplitude(2) + p.l * amplitude(0);
  const double potential = p.k * std::norm(shear) + p.b * N * N * std::norm(amplitude(1)) + p.k0 * std::norm(axial);
  const double kinetic = lambda_n * lambda_n *
                         (p.rho1 * std::norm(amplitude(0)) + p.rho2 * std::norm(amplitude(1)) +
                          p.rho1 * std::norm(amplitude(2)));
  return std::sqrt(0.5 * (potential + kinetic));
}

WitnessSequence build_case1(const PhysicalParams& p, int n) {
  require_case(p, WitnessCase::case1, n);
  WitnessSequence ws;
  ws.case_tag = WitnessCase::case1;
  ws.params = p;
  ws.n = n;
  ws.N = n * kPi;
  ws.lambda_n = ws.N * std::sqrt(p.k0 / p.rho1);
  const double a2 = p.rho1 * p.rho2 / (p.l * p.k0 * std::sqrt(p.rho1 * p.rho1 + p.l * p.l * p.rho2 * p.rho2));
  const double a1 = -p.l * (1.0 + p.k0 / p.k) * a2;
  ws.coefficients.alpha1 = a1;
  ws.coefficients.alpha2 = a2;
  ws.amplitude = Eigen::Vector3cd(0.0, a1, a2);
  ws.f4 = -(p.l * p.k0 / p.rho2) * a2;
  ws.f6 = -(p.l * p.l * p.k0 / p.rho1) * a2;
  ws.identity_residual = modal_residual(p, ws.N, ws.lambda_n, ws.amplitude, ws.f4, ws.f6);
  require_identity(ws.identity_residual, "case1 linear system", n);
  return ws;
}

namespace {

struct Case2Tables {
  std::array<double, 6> a;
  std::array<double, 4> d;
};

// a1, a2 depend on N; a3..a6 and d0..d3 do not.
Case2Tables case2_tables(const PhysicalParams& p, double N) {
  const double k = p.k, k0 = p.k0, l = p.l, r1 = p.rho1, r2 = p.rho2, b = p.b;
  const double x = r2 * k0 / r1 - b;
  Case2Tables t;
  t.a[0] = (k + k0) / (l * k * k) * (-x) * N * N + k0 / (l * k) - l * r2 * (k + k0) / (r1 * k);
  t.a[1] = r1 / ((l * k) * (l * k)) * (x * N * N + l * l * r2 * k / r1 - k);
  t.a[2] = r1 * (k + k0) / (l * k * k) * x;
  t.a[3] = (k + k0) * (k + k0) / (k * k) * x;
  t.a[4] = l * r2 * (k + k0) / k - k0 * r1 / (l * k);
  t.a[5] = l * l * r2 * (k + k0) * (k + k0) / (r1 * k) + k0 * (k - k0) / k;
  t.d[0] = (k + k0) / (l * k * k) * (-x);
  t.d[1] = r1 / ((l * k) * (l * k)) * x;
  t.d[2] = k0 / (l * k) - l * r2 * (k + k0) / (r1 * k);
  t.d[3] = r1 / (l * l * k) * (l * l * r2 / r1 - 1.0);
  return t;
}

}  // namespace

double case2_alpha3_limit(const PhysicalParams& p) {
  const Case2Tables t = case2_tables(p, kPi);
  const auto& a = t.a;
  const auto& d = t.d;
  return (d[0] * a[4] + d[2] * a[2] + d[3] * a[3] + d[1] * a[5]) / a[3];
}

WitnessSequence build_case2(const PhysicalParams& p, int n) {
  require_case(p, WitnessCase::case2, n);
  WitnessSequence ws;
  ws.case_tag = WitnessCase::case2;
  ws.params = p;
  ws.n = n;
  ws.N = n * kPi;
  const double N = ws.N;
  const double k = p.k, k0 = p.k0, l = p.l, r1 = p.rho1;
  ws.lambda_n = std::sqrt(k0 / r1 * N * N + l * l * k / r1);
  const Complex mu(0.0, -p.delta * ws.lambda_n / (N * N));
  const Case2Tables t = case2_tables(p, N);
  const auto& a = t.a;
  const auto& d = t.d;

  const Complex denom = (2.0 * k0 + mu - l * (k + k0) * a[0]) * N * N + l * l * (k - k0);
  if (std::abs(denom) <= 1e-14 * (std::abs(2.0 * k0 + mu) + std::abs(l * (k + k0) * a[0])) * N * N) {
    throw NumericalFailure("witness: case2 denominator vanishes at n = " + std::to_string(n));
  }
  const Complex alpha1 = (l * (k + k0) * a[1] + r1 / l) * N / denom;
  // alpha2 = -(k+k0)/k N alpha1 + rho1/(lk) and alpha3 = a1 N alpha1 + a2
  // both cancel to O(1) from O(N^2) terms; they are evaluated as single
  // rational functions of N^2 with the cancelling leading terms removed.
  const double n2 = N * N;
  const double kk = l * l * (k - k0);
  const Complex den = a[3] * n2 * n2 + (mu + a[5]) * n2 + kk;
  const Complex alpha2 = ((-(k + k0) / k * a[4] + r1 / (l * k) * (mu + a[5])) * n2 + r1 / (l * k) * kk) / den;
  const Complex alpha3 =
      ((d[0] * a[4] + d[2] * a[2] + d[3] * a[3] + d[1] * a[5] + d[1] * mu) * n2 * n2 +
       (d[2] * a[4] + d[3] * a[5] + kk * d[1] + d[3] * mu) * n2 + kk * d[3]) /
      den;

  ws.coefficients.alpha1 = alpha1;
  ws.coefficients.alpha2 = alpha2;
  ws.coefficients.alpha3 = alpha3;
  ws.coefficients.mu = mu;
  ws.coefficients.a = a;
  ws.coefficients.d = d;
  ws.amplitude = Eigen::Vector3cd(alpha1, alpha2, alpha3);
  ws.f4 = 0.0;
  ws.f6 = 1.0;

  const double id = relative(d[0] * a[2] + d[1] * a[3], std::abs(d[0] * a[2]) + std::abs(d[1] * a[3]));
  require_identity(id, "case2 identity d0 a3 + d1 a4 = 0", n);
  const double sys = modal_residual(p, N, ws.lambda_n, ws.amplitude, ws.f4, ws.f6);
  require_identity(sys, "case2 linear system", n);
  ws.identity_residual = std::max(id, sys);
  return ws;
}

std::pair<Complex, Complex> case3_cd(const PhysicalParams& p, int n) {
  const double N = n * kPi;
  const double lambda = std::sqrt(p.b / p.rho2 * N * N + p.k / (2.0 * p.rho2));
  const Complex mu(0.0, -p.delta * lambda / (N * N));
  const Complex dn = 2.0 * p.l * p.k / p.rho1 *
                     (0.5 - p.k / (p.k + p.l * p.l * p.k / (N * N) - mu - p.rho1 * lambda * lambda / (N * N)));
  const Complex cn = p.rho1 / (2.0 * p.l * p.rho2) * dn;
  return {cn, dn};
}

std::pair<double, double> case3_cd_limit(const PhysicalParams& p) {
  const double q = 0.5 - p.k / (p.k - p.rho1 * p.b / p.rho2);
  return {p.k / p.rho2 * q, 2.0 * p.l * p.k / p.rho1 * q};
}

double case3_sup(const PhysicalParams& p, int n_sup) {
  if (n_sup < 1) throw InvalidInput("case3_sup: n_sup must be >= 1");
  const auto [cl, dl] = case3_cd_limit(p);
  if (!std::isfinite(cl) || !std::isfinite(dl)) throw NumericalFailure("case3: limits of C_n, D_n are not finite");
  double sup = cl * cl + dl * dl;
#pragma omp parallel for reduction(max : sup)
  for (int n = 1; n <= n_sup; ++n) {
    const auto [cn, dn] = case3_cd(p, n);
    sup = std::max(sup, std::norm(cn) + std::norm(dn));
  }
  return sup;
}

WitnessSequence build_case3(const PhysicalParams& p, int n, std::optional<double> sup_cd) {
  require_case(p, WitnessCase::case3, n);
  WitnessSequence ws;
  ws.case_tag = WitnessCase::case3;
  ws.params = p;
  ws.n = n;
  ws.N = n * kPi;
  const double N = ws.N;
  ws.lambda_n = std::sqrt(p.b / p.rho2 * N * N + p.k / (2.0 * p.rho2));
  const double sup = sup_cd ? *sup_cd : case3_sup(p);
  const auto [cn, dn] = case3_cd(p, n);
  if (!(sup >= std::norm(cn) + std::norm(dn))) {
    throw InvalidInput("case3: supplied supremum is below |C_n|^2 + |D_n|^2");
  }
  const double alpha2 = 1.0 / std::sqrt(sup);
  const Complex alpha1 = (p.rho1 * dn / (2.0 * p.l * p.k) - 0.5) * alpha2 / N;

  ws.coefficients.alpha1 = alpha1;
  ws.coefficients.alpha2 = alpha2;
  ws.coefficients.alpha3 = 0.0;
  ws.coefficients.mu = Complex(0.0, -p.delta * ws.lambda_n / (N * N));
  ws.coefficients.c_n = cn;
  ws.coefficients.d_n = dn;
  ws.coefficients.sup_cd = sup;
  ws.amplitude = Eigen::Vector3cd(alpha1, alpha2, 0.0);
  ws.f4 = alpha2 * cn;
  ws.f6 = alpha2 * dn;
  ws.identity_residual = modal_residual(p, N, ws.lambda_n, ws.amplitude, ws.f4, ws.f6);
  require_identity(ws.identity_residual, "case3 linear system", n);
  return ws;
}

WitnessSequence build_witness(const PhysicalParams& params, int n) {
  switch (select_case(params)) {
    case WitnessCase::case1: return build_case1(params, n);
    case WitnessCase::case2: return build_case2(params, n);
    case WitnessCase::case3: return build_case3(params, n);
  }
  throw InvalidInput("witness: unknown case");
}

std::vector<WitnessSequence> build_witnesses(const PhysicalParams& params, int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw InvalidInput("witness: bad index range");
  const WitnessCase c = select_case(params);
  const std::optional<double> sup = c == WitnessCase::case3 ? std::optional<double>(case3_sup(params)) : std::nullopt;
  std::vector<WitnessSequence> out;
  out.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
  for (int n = n_lo; n <= n_hi; ++n) {
    out.push_back(c == WitnessCase::case3 ? build_case3(params, n, sup) : build_witness(params, n));
  }
  return out;
}

namespace {

double discrete_residual(const WitnessSequence& ws, const GeneratorMatrix& gen, double* norm_f, double* norm_phi) {
  const ComplexState phi = ws.phi(gen.grid());
  const ComplexState f = ws.forcing(gen.grid());
  ComplexState r = Complex(0.0, ws.lambda_n) * phi;
  r -= gen.apply(phi);
  r -= f;
  const double nf = gen.energy().norm(f);
  if (norm_f) *norm_f = nf;
  if (norm_phi) *norm_phi = gen.energy().norm(phi);
  return gen.energy().norm(r) / nf;
}

}  // namespace

WitnessReport measure_witness(const WitnessSequence& ws, const GeneratorMatrix& gen) {
  if (!(ws.params == gen.params())) throw InvalidInput("witness: parameters differ from the generator's");
  if (ws.n >= gen.grid().n_cells()) throw InvalidInput("witness: mode is not representable on this grid");
  WitnessReport r;
  r.case_tag = ws.case_tag;
  r.n = ws.n;
  r.lambda_n = ws.lambda_n;
  r.residual_coarse = discrete_residual(ws, gen, &r.norm_f, &r.norm_phi);
  r.ratio = r.norm_phi / r.norm_f;
  return r;
}

WitnessReport verify_witness(const WitnessSequence& ws, const GeneratorMatrix& gen) {
  if (ws.n * 20 > gen.grid().n_cells()) {
    throw InvalidInput("verify_witness: mode n = " + std::to_string(ws.n) + " is not resolved on " +
                       std::to_string(gen.grid().n_cells()) + " cells (need n <= n_cells / 20)");
  }
  WitnessReport r = measure_witness(ws, gen);
  const GeneratorMatrix fine(gen.params(), Grid(2 * gen.grid().n_cells()));
  r.residual_fine = discrete_residual(ws, fine, nullptr, nullptr);
  r.convergence_ratio = r.residual_coarse / r.residual_fine;
  r.second_order = r.convergence_ratio >= 3.5 && r.convergence_ratio <= 4.5;
  return r;
}

ResonanceReport eigenmode_resonance_check(const PhysicalParams& p, double lambda, double tol) {
  p.validate();
  if (lambda == 0.0 || !std::isfinite(lambda)) throw InvalidInput("resonance check: lambda must be finite and nonzero");
  ResonanceReport r;
  r.alpha = resonance_alpha(p);
  r.alpha_lambda = r.alpha * std::abs(lambda);
  r.nearest_m = static_cast<int>(std::lround(r.alpha_lambda / kPi));
  r.mode_distance = std::abs(r.alpha_lambda - r.nearest_m * kPi);
  r.mode_condition = r.nearest_m != 0 && r.mode_distance <= tol * std::max(1.0, r.alpha_lambda);

  const double lhs = (p.k0 * p.rho2 - p.b * p.rho1) * lambda * lambda;
  const double rhs = p.k0 / (p.k + p.k0) * (p.b * p.l * p.l * (p.k + p.k0) + p.k * p.k0);
  r.frequency_defect = lhs - rhs;
  r.frequency_condition = std::abs(r.frequency_defect) <= tol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  r.resonant = r.mode_condition && r.frequency_condition;
  r.consistent_with_admissibility = !(r.resonant && check_coupling(p, kDefaultCouplingMMax, tol).coupling_condition);
  return r;
}

PhysicalParams resonant_curvature(PhysicalParams params, int m) {
  params.validate();
  const double rhs = coupling_rhs(params, m);
  if (!(rhs > 0.0)) throw InvalidInput("resonant_curvature: no positive l solves the coupling equality at this m");
  params.l = std::sqrt(rhs);
  return params;
}

double resonant_frequency(const PhysicalParams& p) {
  p.validate();
  const double speed_gap = p.k0 * p.rho2 - p.b * p.rho1;
  if (!(speed_gap > 0.0)) throw InvalidInput("resonant_frequency: requires k0 rho2 > b rho1");
  const double rhs = p.k0 / (p.k + p.k0) * (p.b * p.l * p.l * (p.k + p.k0) + p.k * p.k0);
  return std::sqrt(rhs / speed_gap);
}

}  // namespace bresse
