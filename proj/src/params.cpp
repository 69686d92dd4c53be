#include "bresse/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bresse {

void PhysicalParams::validate() const {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidInput(std::string("parameter ") + name + " must be positive and finite");
    }
  };
  require_positive(rho1, "rho1");
  require_positive(rho2, "rho2");
  require_positive(b, "b");
  require_positive(k, "k");
  require_positive(k0, "k0");
  require_positive(l, "l");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidInput("parameter delta must be nonnegative and finite");
  }
}

bool PhysicalParams::equal_speeds() const {
  const double lhs = b * rho1;
  const double rhs = k0 * rho2;
  return std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
}

PiCheck check_pi(const PhysicalParams& params, double tol) {
  params.validate();
  const double pi = std::numbers::pi;
  PiCheck out;
  out.nearest_multiple = static_cast<int>(std::lround(params.l / pi));
  out.distance = std::abs(params.l - out.nearest_multiple * pi);
  out.pi_condition = out.distance > tol * std::max(1.0, params.l);
  return out;
}

double coupling_rhs(const PhysicalParams& p, int m) {
  const double mpi = m * std::numbers::pi;
  return (p.k0 * p.rho2 - p.b * p.rho1) / (p.k0 * p.rho2) * mpi * mpi -
         p.k * p.rho1 / (p.rho2 * (p.k + p.k0));
}

CouplingCheck check_coupling(const PhysicalParams& params, int m_max, double tol) {
  params.validate();
  if (m_max < 1) throw InvalidInput("check_coupling: m_max must be >= 1");
  CouplingCheck out;
  const double l2 = params.l * params.l;
  const double band = tol * std::max(1.0, l2);

  // RHS(m) is even in m, so m >= 0 covers every |m| <= m_max.
  out.closest_m = 0;
  out.closest_distance = std::abs(l2 - coupling_rhs(params, 0));
  if (params.k0 * params.rho2 - params.b * params.rho1 <= 0.0) {
    out.short_circuit = true;
    out.coupling_condition = true;
    return out;
  }

  // RHS is increasing in m >= 0: only the m bracketing l^2 can come close.
  const double slope = (params.k0 * params.rho2 - params.b * params.rho1) / (params.k0 * params.rho2);
  const double offset = params.k * params.rho1 / (params.rho2 * (params.k + params.k0));
  const double m_star = std::sqrt((l2 + offset) / slope) / std::numbers::pi;
  const int lo = std::max(0, static_cast<int>(std::floor(m_star)) - 1);
  const int hi = std::min(m_max, static_cast<int>(std::ceil(m_star)) + 1);
  for (int m = lo; m <= hi; ++m) {
    const double d = std::abs(l2 - coupling_rhs(params, m));
    if (d < out.closest_distance) {
      out.closest_distance = d;
      out.closest_m = m;
    }
  }
  if (out.closest_distance <= band) {
    out.coupling_condition = false;
    out.violating_m = out.closest_m;
  }
  return out;
}

double resonance_alpha(const PhysicalParams& p) {
  p.validate();
  const double l2 = p.l * p.l;
  return std::sqrt((p.rho2 * l2 * (p.k + p.k0) + p.k * p.rho1) /
                   (p.b * l2 * (p.k + p.k0) + p.k * p.k0));
}

AdmissibilityReport admissibility(const PhysicalParams& params, double tol, int m_max) {
  AdmissibilityReport r;
  r.pi = check_pi(params, tol);
  r.coupling = check_coupling(params, m_max, tol);
  r.resonance_alpha = resonance_alpha(params);
  return r;
}

std::string to_string(const PhysicalParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "rho1=" << p.rho1 << " rho2=" << p.rho2 << " b=" << p.b << " k=" << p.k << " k0=" << p.k0
     << " l=" << p.l << " delta=" << p.delta;
  return os.str();
}

}  // namespace bresse
