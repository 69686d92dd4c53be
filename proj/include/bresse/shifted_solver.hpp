#pragma once

#include <memory>

#include <Eigen/SparseCore>

#include "bresse/generator.hpp"

namespace bresse {

/// The shift is (numerically) in the spectrum of the generator.
class NearSpectralPoint : public NumericalFailure {
 public:
  NearSpectralPoint(const std::string& what, double condition_estimate)
      : NumericalFailure(what), condition_(condition_estimate) {}
  [[nodiscard]] double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

inline constexpr double kNearSingularCondition = 1e14;

/// Factorized solver for (s I - A) Phi = F on the constrained space.
///
/// Eliminating p = s q - f_q leaves the bordered system
///   [ s^2 M + s D + K   C^T ] [ q  ]   [ M f_p + (s M + D) f_q ]
///   [ C                 0   ] [ mu ] = [ 0                     ]
/// with C the two mean constraints. s = 0 gives -A^{-1}.
template <typename Scalar>
class ShiftedSolver {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Throws NearSpectralPoint if the factorization breaks down or, when
  /// estimate_condition is set, the equilibrated 1-norm condition number
  /// exceeds kNearSingularCondition.
  ShiftedSolver(const GeneratorMatrix& gen, Scalar shift, bool estimate_condition = false);
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver&&) noexcept;
  ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

  [[nodiscard]] Scalar shift() const { return shift_; }
  /// NaN unless estimated.
  [[nodiscard]] double condition_estimate() const { return condition_; }

  /// F must satisfy the mean constraints (InvalidInput otherwise).
  BasicState<Scalar> solve(const BasicState<Scalar>& f) const;

  /// Solves with the conjugate shift: (conj(s) I - A)^{-1} F. Uses the same
  /// factorization since A is real.
  BasicState<Scalar> solve_conjugate(const BasicState<Scalar>& f) const;

  /// ||(s I - A) Phi - F||_H / ||F||_H.
  double residual(const BasicState<Scalar>& phi, const BasicState<Scalar>& f) const;

 private:
  struct Impl;
  const GeneratorMatrix* gen_;
  Scalar shift_;
  double condition_;
  std::unique_ptr<Impl> impl_;
};

extern template class ShiftedSolver<double>;
extern template class ShiftedSolver<Complex>;

}  // namespace bresse
