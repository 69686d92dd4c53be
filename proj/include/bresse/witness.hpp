#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bresse/generator.hpp"

namespace bresse {

/// The three parameter regimes of the explicit counterexample:
/// case1 b/rho2 == k0/rho1; case2 speeds differ and k != k0;
/// case3 speeds differ and k == k0.
enum class WitnessCase { case1, case2, case3 };

const char* case_name(WitnessCase c);

/// Equality tests use 1e-12 relative.
WitnessCase select_case(const PhysicalParams& params);

/// Named constants of a witness. Labels follow the construction: in case1
/// alpha1, alpha2 are the psi and w amplitudes; in cases 2 and 3 alpha1,
/// alpha2, alpha3 are the phi, psi and w amplitudes.
struct WitnessCoefficients {
  Complex alpha1{}, alpha2{}, alpha3{};
  Complex mu{};
  std::array<double, 6> a{};  // case2 a1..a6
  std::array<double, 4> d{};  // case2 d0..d3
  Complex c_n{}, d_n{};       // case3
  double sup_cd = 0.0;        // case3: sup_n |C_n|^2 + |D_n|^2
};

/// Closed-form pair (lambda_n, F_n, Phi_n) with i lambda_n Phi_n - A Phi_n = F_n.
///
/// Phi_n = (a_phi sin(Nx), i lambda a_phi sin(Nx), a_psi cos(Nx),
///          i lambda a_psi cos(Nx), a_w cos(Nx), i lambda a_w cos(Nx)),
/// F_n = (0, 0, 0, f4 cos(Nx), 0, f6 cos(Nx)), N = n pi.
struct WitnessSequence {
  WitnessCase case_tag = WitnessCase::case1;
  int n = 1;
  double N = 0.0;
  double lambda_n = 0.0;
  Eigen::Vector3cd amplitude = Eigen::Vector3cd::Zero();  // (phi, psi, w)
  Complex f4{}, f6{};
  WitnessCoefficients coefficients;
  /// Largest relative residual of the algebraic identities checked at build.
  double identity_residual = 0.0;
  PhysicalParams params;

  [[nodiscard]] ComplexState phi(const Grid& grid) const;
  [[nodiscard]] ComplexState forcing(const Grid& grid) const;
  /// Continuum energy norms (cos^2 and sin^2 integrate to 1/2).
  [[nodiscard]] double norm_f() const;
  [[nodiscard]] double norm_phi() const;
};

/// Residual of the modal system: rows phi, psi, w of
/// i lambda Phi - A Phi = F for a single trigonometric mode, relative to the
/// sum of the absolute values of the terms in each row (max over rows).
double modal_residual(const PhysicalParams& params, double N, double lambda, const Eigen::Vector3cd& amplitude,
                      Complex f4, Complex f6);

/// Tolerance on the algebraic identities.
inline constexpr double kIdentityTol = 1e-12;
inline constexpr int kDefaultSupCount = 1000000;

/// Each build throws InvalidInput on a case mismatch or n < 1 and
/// NumericalFailure if an identity fails kIdentityTol.
WitnessSequence build_case1(const PhysicalParams& params, int n);
/// Also throws NumericalFailure (naming n) on a vanishing denominator.
WitnessSequence build_case2(const PhysicalParams& params, int n);
/// sup_cd defaults to case3_sup(params).
WitnessSequence build_case3(const PhysicalParams& params, int n, std::optional<double> sup_cd = std::nullopt);
WitnessSequence build_witness(const PhysicalParams& params, int n);
/// n = n_lo..n_hi, sharing the case3 supremum.
std::vector<WitnessSequence> build_witnesses(const PhysicalParams& params, int n_lo, int n_hi);

/// Case 3 constants for mode n.
std::pair<Complex, Complex> case3_cd(const PhysicalParams& params, int n);
/// Limits of (C_n, D_n).
std::pair<double, double> case3_cd_limit(const PhysicalParams& params);
/// max(sup over n <= n_sup of |C_n|^2 + |D_n|^2, value of the limit).
double case3_sup(const PhysicalParams& params, int n_sup = kDefaultSupCount);

/// Case 2: (d0 a5 + d2 a3 + d3 a4 + d1 a6) / a4, the limit of alpha3.
double case2_alpha3_limit(const PhysicalParams& params);

struct WitnessReport {
  WitnessCase case_tag = WitnessCase::case1;
  int n = 0;
  double lambda_n = 0.0;
  double norm_f = 0.0;    // discrete energy norm on the coarse grid
  double norm_phi = 0.0;  // discrete energy norm on the coarse grid
  double ratio = 0.0;
  double residual_coarse = 0.0;  // ||(i lambda - A_h) Phi - F|| / ||F||
  double residual_fine = 0.0;    // same on h/2
  double convergence_ratio = 0.0;  // residual_coarse / residual_fine
  bool second_order = false;       // convergence_ratio in [3.5, 4.5]
};

/// Discrete norms and residual of the sampled witness on gen's grid.
WitnessReport measure_witness(const WitnessSequence& ws, const GeneratorMatrix& gen);

/// measure_witness plus the same residual on the grid with twice the
/// cells. Throws InvalidInput if n > n_cells / 20 (mode not resolved).
WitnessReport verify_witness(const WitnessSequence& ws, const GeneratorMatrix& gen);

struct ResonanceReport {
  double alpha = 0.0;
  double alpha_lambda = 0.0;
  int nearest_m = 0;
  /// |alpha lambda - m pi|
  double mode_distance = 0.0;
  bool mode_condition = false;
  /// (k0 rho2 - b rho1) lambda^2 - k0/(k+k0) (b l^2 (k+k0) + k k0)
  double frequency_defect = 0.0;
  bool frequency_condition = false;
  /// Both conditions: the candidate mode is an imaginary eigenvalue.
  bool resonant = false;
  /// False only if resonant while the coupling condition holds.
  bool consistent_with_admissibility = true;
};

/// Detector for imaginary eigenvalues i lambda of the continuum operator
/// (the only candidates are the modes psi ~ cos(alpha lambda x)).
ResonanceReport eigenmode_resonance_check(const PhysicalParams& params, double lambda, double tol = 1e-9);

/// Parameters violating the coupling condition at m: l solved from
/// l^2 = coupling_rhs(m), others kept. Throws InvalidInput if impossible.
PhysicalParams resonant_curvature(PhysicalParams params, int m);
/// The lambda > 0 solving the frequency condition.
double resonant_frequency(const PhysicalParams& params);

}  // namespace bresse
