#include "bresse/generator.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>

namespace bresse {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void append(Triplets& t, const SparseMatrix& m, int row0, int col0, double scale) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
    }
  }
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(const PhysicalParams& params, const Grid& grid) : energy_(params, grid) {
  const int n = grid.n_cells();
  const int ni = n - 1;
  const int half = grid.displacement_size();
  const double h = grid.h();

  damping_ = Eigen::VectorXd::Zero(half);
  damping_.head(ni).setConstant(params.delta * h);

  Triplets c;
  for (int j = 0; j < n; ++j) {
    c.emplace_back(0, ni + j, h);
    c.emplace_back(1, ni + n + j, h);
  }
  constraints_.resize(2, half);
  constraints_.setFromTriplets(c.begin(), c.end());

  Triplets p;
  for (int j = 0; j < ni; ++j) p.emplace_back(j, j, 1.0);
  for (int block = 0; block < 2; ++block) {
    const int row0 = ni + block * n;
    const int col0 = ni + block * (n - 1);
    for (int j = 0; j < n - 1; ++j) {
      p.emplace_back(row0 + j, col0 + j, 1.0);
      p.emplace_back(row0 + j + 1, col0 + j, -1.0);
    }
  }
  displacement_basis_.resize(half, half - 2);
  displacement_basis_.setFromTriplets(p.begin(), p.end());
}

template <typename Scalar>
BasicState<Scalar> GeneratorMatrix::apply(const BasicState<Scalar>& s) const {
  energy_.check_grid(s.grid());
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  BasicState<Scalar> out(s.grid());
  out.q() = s.p();
  Vec force = energy_.stiffness() * s.q();
  force.array() += damping_.array() * s.p().array();
  out.p() = -(force.array() / energy_.mass().array()).matrix();
  for (Component c : {Component::psi_t, Component::w_t}) {
    auto seg = out.component(c);
    const Scalar mean = discrete_mean(seg, s.grid());
    seg.array() -= mean;
  }
  return out;
}

template State GeneratorMatrix::apply(const State&) const;
template ComplexState GeneratorMatrix::apply(const ComplexState&) const;

SparseMatrix GeneratorMatrix::energy_form() const {
  const int half = grid().displacement_size();
  Triplets t;
  t.reserve(2 * energy_.stiffness().nonZeros() + half);
  append(t, energy_.stiffness(), 0, half, 1.0);
  append(t, energy_.stiffness(), half, 0, -1.0);
  for (int j = 0; j < half; ++j) {
    if (damping_(j) != 0.0) t.emplace_back(half + j, half + j, -damping_(j));
  }
  SparseMatrix j(2 * half, 2 * half);
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

SparseMatrix GeneratorMatrix::state_basis() const {
  const int half = grid().displacement_size();
  const int cols = static_cast<int>(displacement_basis_.cols());
  Triplets t;
  append(t, displacement_basis_, 0, 0, 1.0);
  append(t, displacement_basis_, half, cols, 1.0);
  SparseMatrix p(2 * half, 2 * cols);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

GeneratorMatrix assemble(const PhysicalParams& params, const Grid& grid) { return GeneratorMatrix(params, grid); }

ComplexState DenseGenerator::lift(const Grid& grid, const Eigen::VectorXcd& y) const {
  const auto upper = lower.transpose().triangularView<Eigen::Upper>();
  Eigen::VectorXcd c(y.size());
  c.real() = upper.solve(Eigen::VectorXd(y.real()));
  c.imag() = upper.solve(Eigen::VectorXd(y.imag()));
  return ComplexState(grid, basis.cast<Complex>() * c);
}

namespace {

// Euclidean-orthonormal basis of the zero-mean displacements: columns of the
// Householder reflector taking 1/sqrt(n) to the last unit vector, last one
// dropped. The mass is constant on each cell block, so Mr comes out diagonal.
SparseMatrix orthonormal_displacement_basis(const Grid& grid) {
  const int n = grid.n_cells();
  const int ni = n - 1;
  const int half = grid.displacement_size();
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  u(n - 1) -= 1.0;
  const double scale = 2.0 / u.squaredNorm();
  Triplets t;
  t.reserve(ni + 2 * static_cast<std::size_t>(n) * (n - 1));
  for (int j = 0; j < ni; ++j) t.emplace_back(j, j, 1.0);
  for (int block = 0; block < 2; ++block) {
    const int row0 = ni + block * n;
    const int col0 = ni + block * (n - 1);
    for (int j = 0; j < n - 1; ++j) {
      for (int i = 0; i < n; ++i) {
        const double v = (i == j ? 1.0 : 0.0) - scale * u(i) * u(j);
        if (v != 0.0) t.emplace_back(row0 + i, col0 + j, v);
      }
    }
  }
  SparseMatrix p(half, half - 2);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

}  // namespace

DenseGenerator dense_form(const GeneratorMatrix& gen) {
  // P^T G P and P^T J P are block structured: diag(Kr, Mr) and
  // [[0, Kr], [-Kr, -Dr]]. With Kr = Lk Lk^T, Mr = Lm Lm^T the
  // orthonormal form is [[0, Lk^T Lm^{-T}], [-Lm^{-1} Lk, -Lm^{-1} Dr Lm^{-T}]].
  const SparseMatrix pq = orthonormal_displacement_basis(gen.grid());
  const Eigen::MatrixXd kr = Eigen::MatrixXd(pq.transpose() * gen.energy().stiffness() * pq);
  const Eigen::MatrixXd mr =
      Eigen::MatrixXd(pq.transpose() * gen.energy().mass().asDiagonal() * pq);
  const Eigen::MatrixXd dr = Eigen::MatrixXd(pq.transpose() * gen.damping().asDiagonal() * pq);

  Eigen::LLT<Eigen::MatrixXd> llt_k(kr);
  if (llt_k.info() != Eigen::Success) {
    throw NumericalFailure("dense_form: stiffness is not positive definite on zero-mean displacements");
  }
  Eigen::LLT<Eigen::MatrixXd> llt_m(mr);
  if (llt_m.info() != Eigen::Success) throw NumericalFailure("dense_form: mass matrix factorization failed");
  const Eigen::MatrixXd lk = llt_k.matrixL();
  const Eigen::MatrixXd lm = llt_m.matrixL();

  const Eigen::Index r = kr.rows();
  DenseGenerator out;
  out.a_hat = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  // Lk^T Lm^{-T} = (Lm^{-1} Lk)^T
  const Eigen::MatrixXd coupling = lm.triangularView<Eigen::Lower>().solve(lk);
  out.a_hat.topRightCorner(r, r) = coupling.transpose();
  out.a_hat.bottomLeftCorner(r, r) = -coupling;
  Eigen::MatrixXd damp = lm.triangularView<Eigen::Lower>().solve(dr);
  damp = lm.triangularView<Eigen::Lower>().solve(damp.transpose()).transpose();
  out.a_hat.bottomRightCorner(r, r) = -damp;

  out.lower = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  out.lower.topLeftCorner(r, r) = lk;
  out.lower.bottomRightCorner(r, r) = lm;
  const Eigen::Index half = gen.grid().displacement_size();
  Triplets t;
  append(t, pq, 0, 0, 1.0);
  append(t, pq, static_cast<int>(half), static_cast<int>(r), 1.0);
  out.basis.resize(2 * half, 2 * r);
  out.basis.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace bresse
