#include "bresse/shifted_solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseLU>

namespace bresse {

namespace {

template <typename Scalar>
using Sparse = Eigen::SparseMatrix<Scalar>;

template <typename Scalar>
Sparse<Scalar> bordered_matrix(const GeneratorMatrix& gen, Scalar s) {
  const EnergyProduct& ep = gen.energy();
  const int half = gen.grid().displacement_size();
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(ep.stiffness().nonZeros() + half + 4 * gen.grid().n_cells());
  const SparseMatrix& k = ep.stiffness();
  for (int c = 0; c < k.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) t.emplace_back(it.row(), it.col(), Scalar(it.value()));
  }
  for (int j = 0; j < half; ++j) {
    const Scalar diag = s * s * ep.mass()(j) + s * gen.damping()(j);
    if (diag != Scalar(0)) t.emplace_back(j, j, diag);
  }
  const SparseMatrix& c = gen.constraints();
  for (int col = 0; col < c.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(c, col); it; ++it) {
      t.emplace_back(half + it.row(), it.col(), Scalar(it.value()));
      t.emplace_back(it.col(), half + it.row(), Scalar(it.value()));
    }
  }
  Sparse<Scalar> b(half + 2, half + 2);
  b.setFromTriplets(t.begin(), t.end());
  b.makeCompressed();
  return b;
}

template <typename Scalar>
Scalar unit_sign(Scalar v) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return v >= 0.0 ? 1.0 : -1.0;
  } else {
    const double a = std::abs(v);
    return a == 0.0 ? Scalar(1.0) : v / a;
  }
}

}  // namespace

template <typename Scalar>
struct ShiftedSolver<Scalar>::Impl {
  Eigen::SparseLU<Sparse<Scalar>> lu;
  Sparse<Scalar> matrix;
};

template <typename Scalar>
ShiftedSolver<Scalar>::ShiftedSolver(const GeneratorMatrix& gen, Scalar shift, bool estimate_condition)
    : gen_(&gen), shift_(shift), condition_(std::numeric_limits<double>::quiet_NaN()), impl_(std::make_unique<Impl>()) {
  impl_->matrix = bordered_matrix(gen, shift);
  impl_->lu.analyzePattern(impl_->matrix);
  impl_->lu.factorize(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success) {
    throw NearSpectralPoint("shifted system is singular: " + impl_->lu.lastErrorMessage(),
                            std::numeric_limits<double>::infinity());
  }
  if (!estimate_condition) return;

  // Row/column equilibration, then a Hager-Higham 1-norm estimate of the
  // inverse of the equilibrated matrix.
  const Sparse<Scalar>& b = impl_->matrix;
  const Eigen::Index n = b.rows();
  Eigen::VectorXd rs = Eigen::VectorXd::Zero(n);
  for (int col = 0; col < b.outerSize(); ++col) {
    for (typename Sparse<Scalar>::InnerIterator it(b, col); it; ++it) {
      rs(it.row()) = std::max(rs(it.row()), static_cast<double>(std::abs(it.value())));
    }
  }
  rs = rs.cwiseMax(std::numeric_limits<double>::min()).cwiseInverse();
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(n);
  for (int col = 0; col < b.outerSize(); ++col) {
    for (typename Sparse<Scalar>::InnerIterator it(b, col); it; ++it) {
      cs(col) = std::max(cs(col), rs(it.row()) * std::abs(it.value()));
    }
  }
  cs = cs.cwiseMax(std::numeric_limits<double>::min()).cwiseInverse();
  double norm1 = 0.0;
  {
    Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
    for (int col = 0; col < b.outerSize(); ++col) {
      for (typename Sparse<Scalar>::InnerIterator it(b, col); it; ++it) {
        colsum(col) += rs(it.row()) * std::abs(it.value()) * cs(col);
      }
    }
    norm1 = colsum.maxCoeff();
  }
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  // Bs = Rs B Cs, Bs^{-1} x = Cs B^{-1} Rs^{-1} x, Bs^{-H} x = Rs B^{-H} Cs^{-1} x
  auto inv = [&](const Vec& x) -> Vec {
    Vec y = impl_->lu.solve((x.array() / rs.array().template cast<Scalar>()).matrix());
    return (y.array() * cs.array().template cast<Scalar>()).matrix();
  };
  auto inv_adj = [&](const Vec& x) -> Vec {
    Vec y = impl_->lu.adjoint().solve((x.array() / cs.array().template cast<Scalar>()).matrix());
    return (y.array() * rs.array().template cast<Scalar>()).matrix();
  };
  Vec x = Vec::Constant(n, Scalar(1.0 / static_cast<double>(n)));
  double est = 0.0;
  Eigen::Index last = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const Vec y = inv(x);
    if (!y.allFinite()) {
      est = std::numeric_limits<double>::infinity();
      break;
    }
    est = y.template lpNorm<1>();
    Vec xi(n);
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = unit_sign(y(i));
    const Vec z = inv_adj(xi);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= std::real(z.dot(x)) || j == last) break;
    last = j;
    x.setZero();
    x(j) = Scalar(1.0);
  }
  // Alternative probe with alternating signs guards against unlucky starts.
  Vec alt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    alt(i) = Scalar((i % 2 == 0 ? 1.0 : -1.0) * (1.0 + static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  const Vec ya = inv(alt);
  est = std::max(est, 2.0 * ya.template lpNorm<1>() / (3.0 * static_cast<double>(n)));
  condition_ = norm1 * est;
  if (!std::isfinite(condition_) || condition_ > kNearSingularCondition) {
    throw NearSpectralPoint("shift is numerically in the spectrum (condition estimate " +
                                std::to_string(condition_) + ")",
                            condition_);
  }
}

template <typename Scalar>
ShiftedSolver<Scalar>::~ShiftedSolver() = default;
template <typename Scalar>
ShiftedSolver<Scalar>::ShiftedSolver(ShiftedSolver&&) noexcept = default;
template <typename Scalar>
ShiftedSolver<Scalar>& ShiftedSolver<Scalar>::operator=(ShiftedSolver&&) noexcept = default;

template <typename Scalar>
BasicState<Scalar> ShiftedSolver<Scalar>::solve(const BasicState<Scalar>& f) const {
  gen_->energy().check_grid(f.grid());
  const double scale = f.data().cwiseAbs().maxCoeff();
  if (constraint_defect(f) > 1e-10 * std::max(scale, 1e-300)) {
    throw InvalidInput("shifted solve: right-hand side violates the zero-mean constraints");
  }
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int half = gen_->grid().displacement_size();
  const Eigen::VectorXd& m = gen_->energy().mass();
  const Eigen::VectorXd& d = gen_->damping();
  Vec rhs = Vec::Zero(half + 2);
  rhs.head(half) = (m.array().template cast<Scalar>() * f.p().array() +
                    (shift_ * m.array().template cast<Scalar>() + d.array().template cast<Scalar>()) * f.q().array())
                       .matrix();
  const Vec sol = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success || !sol.allFinite()) {
    throw NumericalFailure("shifted solve failed");
  }
  BasicState<Scalar> out(f.grid());
  out.q() = sol.head(half);
  out.p() = shift_ * out.q() - f.q();
  return project_constraints(std::move(out));
}

template <typename Scalar>
BasicState<Scalar> ShiftedSolver<Scalar>::solve_conjugate(const BasicState<Scalar>& f) const {
  if constexpr (std::is_same_v<Scalar, double>) {
    return solve(f);
  } else {
    BasicState<Scalar> g(f.grid(), f.data().conjugate());
    BasicState<Scalar> x = solve(g);
    x.data() = x.data().conjugate();
    return x;
  }
}

template <typename Scalar>
double ShiftedSolver<Scalar>::residual(const BasicState<Scalar>& phi, const BasicState<Scalar>& f) const {
  BasicState<Scalar> r = shift_ * phi;
  r -= gen_->apply(phi);
  r -= f;
  const double fn = gen_->energy().norm(f);
  const double rn = gen_->energy().norm(r);
  return fn > 0.0 ? rn / fn : rn;
}

template class ShiftedSolver<double>;
template class ShiftedSolver<Complex>;

}  // namespace bresse
