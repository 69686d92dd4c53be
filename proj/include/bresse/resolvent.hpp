#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bresse/generator.hpp"
#include "bresse/shifted_solver.hpp"

namespace bresse {

enum class NormMethod { dense_svd_oracle, inverse_iteration };

const char* method_name(NormMethod m);

/// One point of an imaginary-axis resolvent scan.
struct ResolventSample {
  double lambda = 0.0;
  /// ||(i lambda - A)^{-1}|| in the energy operator norm.
  double norm_estimate = 0.0;
  NormMethod method = NormMethod::inverse_iteration;
  /// Relative solve residual at the maximizing vector.
  double residual = 0.0;
  int iterations = 0;
  /// Set when the point failed; norm_estimate is then NaN.
  std::optional<std::string> error;

  [[nodiscard]] bool ok() const { return !error.has_value(); }
};

struct ResolventOptions {
  int max_iterations = 200;
  /// Relative accuracy of the returned norm.
  double tol = 1e-6;
  std::uint64_t seed = 1;
  /// Retry with the dense oracle on non-convergence when the grid is small enough.
  bool dense_fallback = true;
  int dense_limit = 128;
  /// Reject shifts whose condition estimate exceeds kNearSingularCondition.
  bool check_condition = true;
};

/// Solves (i lambda I - A) Phi = F. F must satisfy the mean constraints.
/// Throws NearSpectralPoint close to an eigenvalue and NumericalFailure if
/// the residual bound 1e-10 is not met.
ComplexState solve_shifted(const GeneratorMatrix& gen, double lambda, const ComplexState& f);

/// Largest singular value of T = (i lambda - A)^{-1} in the energy metric:
/// Lanczos on T* T with full reorthogonalization, T* = R (conj(s) - A)^{-1} R,
/// R = diag(I, -I). One factorization serves both T and T*.
ResolventSample resolvent_norm(const GeneratorMatrix& gen, double lambda, const ResolventOptions& options = {});

/// 1 / sigma_min(i lambda - a_hat) with a_hat the energy-orthonormal dense
/// form. Reference for grids up to a few hundred cells.
ResolventSample resolvent_norm_dense(const GeneratorMatrix& gen, double lambda);

/// Evaluates resolvent_norm at every lambda, in input order. Failed
/// points carry an error message and never abort the sweep.
std::vector<ResolventSample> sweep(const GeneratorMatrix& gen, const std::vector<double>& lambdas,
                                   const ResolventOptions& options = {});

/// start * ratio^j, j = 0..count-1.
std::vector<double> geometric_grid(double start, double ratio, int count);
/// count points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, int count);

/// Solves A Z = F via the reduced elliptic problem: Z_p = F_q and the
/// zero-mean displacement block from the bilinear form a(z, v) = -L(v),
/// L(v) = <delta f1 + rho1 f2, v1> + <rho2 f4, v2> + <rho1 f6, v3>.
/// F must satisfy the mean constraints.
State static_solve(const GeneratorMatrix& gen, const State& f);
ComplexState static_solve(const GeneratorMatrix& gen, const ComplexState& f);

/// Smallest eigenvalue of the stiffness form on zero-mean displacements,
/// relative to the discrete L2 mass (generalized Rayleigh quotient).
double bilinear_form_min_eigenvalue(const GeneratorMatrix& gen);

}  // namespace bresse
