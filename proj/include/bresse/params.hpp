#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace bresse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameters, bad grid, malformed config.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (non-convergence, singular factorization).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Coefficients of the damped Bresse system on (0,1).
///
/// rho1 and rho2 are the mass and rotational inertia densities, b the
/// bending stiffness, k the shear stiffness, k0 the longitudinal stiffness,
/// l the curvature and delta the frictional damping acting on the vertical
/// velocity.
struct PhysicalParams {
  double rho1 = 1.0;
  double rho2 = 1.0;
  double b = 1.0;
  double k = 1.0;
  double k0 = 1.0;
  double l = 0.5;
  double delta = 1.0;

  /// Throws InvalidInput unless rho1, rho2, b, k, k0, l > 0 and delta >= 0.
  void validate() const;

  /// b / rho2 == k0 / rho1, tested as |b rho1 - k0 rho2| <= 1e-12 max(b rho1, k0 rho2).
  [[nodiscard]] bool equal_speeds() const;

  bool operator==(const PhysicalParams&) const = default;
};

struct PiCheck {
  bool pi_condition = true;
  int nearest_multiple = 0;
  double distance = 0.0;
};

struct CouplingCheck {
  bool coupling_condition = true;
  // k0 rho2 - b rho1 <= 0 makes the right-hand side negative for every m.
  bool short_circuit = false;
  std::optional<int> violating_m;
  // |l^2 - RHS(m)| at the closest m examined.
  double closest_distance = 0.0;
  int closest_m = 0;
};

struct AdmissibilityReport {
  PiCheck pi;
  CouplingCheck coupling;
  double resonance_alpha = 0.0;

  [[nodiscard]] bool admissible() const { return pi.pi_condition && coupling.coupling_condition; }
};

inline constexpr double kDefaultAdmissibilityTol = 1e-9;
inline constexpr int kDefaultCouplingMMax = 10000;

/// l != m pi for every integer m, within tol * max(1, l).
PiCheck check_pi(const PhysicalParams& params, double tol = kDefaultAdmissibilityTol);

/// Right-hand side of the second admissibility condition for a given m:
/// (k0 rho2 - b rho1)/(k0 rho2) (m pi)^2 - k rho1 / (rho2 (k + k0)).
double coupling_rhs(const PhysicalParams& params, int m);

/// l^2 != coupling_rhs(m) for all |m| <= m_max, within tol * max(1, l^2).
CouplingCheck check_coupling(const PhysicalParams& params, int m_max = kDefaultCouplingMMax,
                            double tol = kDefaultAdmissibilityTol);

/// alpha = sqrt((rho2 l^2 (k+k0) + k rho1) / (b l^2 (k+k0) + k k0)).
double resonance_alpha(const PhysicalParams& params);

AdmissibilityReport admissibility(const PhysicalParams& params,
                                  double tol = kDefaultAdmissibilityTol,
                                  int m_max = kDefaultCouplingMMax);

std::string to_string(const PhysicalParams& params);

}  // namespace bresse
