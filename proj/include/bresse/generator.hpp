#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bresse/spectral_space.hpp"

namespace bresse {

/// Discrete semigroup generator on the staggered grid.
///
/// With q = (phi, psi, w), p = (phi_t, psi_t, w_t) the action is
///   A (q, p) = (p, -Pi M^{-1} (K q + D p)),
/// K the stiffness of EnergyProduct, M the diagonal kinetic weights,
/// D = delta h on the phi_t entries and Pi the M-orthogonal projection onto
/// zero-mean psi_t, w_t (subtracting the cell mean). Interior rows are the
/// second-order central differences of
///   row2 = (k/rho1)(phi_x+psi+l w)_x + (l k0/rho1)(w_x - l phi) - (delta/rho1) phi_t
///   row4 = (b/rho2) psi_xx - (k/rho2)(phi_x+psi+l w)
///   row6 = (k0/rho1)(w_x - l phi)_x - (l k/rho1)(phi_x+psi+l w)
/// and G A = [[0, K], [-K, -D]] on the constrained space, so
/// <A Phi, Phi> = -delta ||phi_t||^2 holds exactly.
class GeneratorMatrix {
 public:
  GeneratorMatrix(const PhysicalParams& params, const Grid& grid);

  [[nodiscard]] const PhysicalParams& params() const { return energy_.params(); }
  [[nodiscard]] const Grid& grid() const { return energy_.grid(); }
  [[nodiscard]] const EnergyProduct& energy() const { return energy_; }

  /// Dimension of the constrained state space (6 n_cells - 6).
  [[nodiscard]] int dimension() const { return grid().constrained_dimension(); }

  /// Diagonal damping weights on the velocity block (delta h on phi_t).
  [[nodiscard]] const Eigen::VectorXd& damping() const { return damping_; }

  /// Mean constraints on a displacement-sized block: row 0 integrates the
  /// psi cells, row 1 the w cells (midpoint rule).
  [[nodiscard]] const SparseMatrix& constraints() const { return constraints_; }

  template <typename Scalar>
  BasicState<Scalar> apply(const BasicState<Scalar>& s) const;

  /// J = G A restricted to the constrained space, [[0, K], [-K, -D]].
  [[nodiscard]] SparseMatrix energy_form() const;

  /// Sparse basis of the zero-mean displacement space (3n-1 x 3n-3):
  /// identity on phi, differences e_j - e_{j+1} on the psi and w cells.
  [[nodiscard]] const SparseMatrix& displacement_basis() const { return displacement_basis_; }
  /// Block diagonal basis of the constrained state space.
  [[nodiscard]] SparseMatrix state_basis() const;

 private:
  EnergyProduct energy_;
  Eigen::VectorXd damping_;
  SparseMatrix constraints_;
  SparseMatrix displacement_basis_;
};

GeneratorMatrix assemble(const PhysicalParams& params, const Grid& grid);

/// -delta * ||phi_t||^2 with the discrete L2 norm of the interior nodes.
template <typename Scalar>
double dissipation_rate(const BasicState<Scalar>& state, const PhysicalParams& params, const Grid& grid) {
  if (!(state.grid() == grid)) throw GridMismatch("dissipation_rate: state grid mismatch");
  return -params.delta * l2_norm_squared(state.phi_t(), grid);
}

/// Dense representation in energy-orthonormal coordinates.
///
/// With P the constrained basis and P^T G P = L L^T, coordinates
/// y = L^T c for Phi = P c make the energy norm Euclidean, and the
/// generator becomes a_hat = L^{-1} (P^T J P) L^{-T}.
struct DenseGenerator {
  Eigen::MatrixXd a_hat;
  Eigen::MatrixXd lower;  // L
  SparseMatrix basis;     // P

  [[nodiscard]] ComplexState lift(const Grid& grid, const Eigen::VectorXcd& y) const;
};

DenseGenerator dense_form(const GeneratorMatrix& gen);

// --- spectrum -------------------------------------------------------------

enum class SpectrumOrder { rightmost, near_imaginary_axis, all };

struct EigenPair {
  Complex value;
  ComplexState vector;
  /// ||A v - lambda v||_H / ||v||_H
  double residual = 0.0;
};

struct SpectrumResult {
  std::vector<EigenPair> pairs;
  int requested = 0;
  int converged = 0;
  bool dense = true;
};

struct SpectrumOptions {
  /// Dense eigensolve up to this many cells, shift-invert Arnoldi above.
  int dense_limit = 256;
  /// Target of the shift-invert path.
  Complex shift{0.0, 0.0};
  double residual_tol = 1e-8;
  int max_restarts = 30;
  /// Dense path without vectors skips the residual filter (residual NaN).
  bool with_vectors = true;
};

/// Eigenpairs of the discrete generator. n_eigs <= 0 means all (dense only).
/// Sorted by descending real part (rightmost), ascending |Re| (near axis)
/// or ascending imaginary part (all). Pairs whose residual exceeds
/// residual_tol are dropped and counted as not converged.
SpectrumResult spectrum(const GeneratorMatrix& gen, int n_eigs, SpectrumOrder which,
                        const SpectrumOptions& options = {});

/// Eigenvalues only, dense path (no residual filtering).
Eigen::VectorXcd dense_eigenvalues(const GeneratorMatrix& gen);

/// Shift-invert Arnoldi: the n_eigs eigenvalues closest to `shift`.
SpectrumResult spectrum_near(const GeneratorMatrix& gen, Complex shift, int n_eigs,
                             const SpectrumOptions& options = {});

}  // namespace bresse
