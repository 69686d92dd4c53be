#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "bresse/generator.hpp"
#include "bresse/shifted_solver.hpp"

namespace bresse {

namespace {

// Strict weak ordering of eigenvalues for the requested order.
bool value_less(SpectrumOrder which, Complex target, Complex a, Complex b) {
  switch (which) {
    case SpectrumOrder::rightmost:
      if (a.real() != b.real()) return a.real() > b.real();
      return a.imag() < b.imag();
    case SpectrumOrder::near_imaginary_axis:
      if (std::abs(a.real()) != std::abs(b.real())) return std::abs(a.real()) < std::abs(b.real());
      return a.imag() < b.imag();
    case SpectrumOrder::all:
      break;
  }
  if (target != Complex(0.0, 0.0)) {
    const double da = std::abs(a - target);
    const double db = std::abs(b - target);
    if (da != db) return da < db;
  }
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

void sort_pairs(std::vector<EigenPair>& pairs, SpectrumOrder which, Complex target) {
  std::stable_sort(pairs.begin(), pairs.end(), [&](const EigenPair& a, const EigenPair& b) {
    return value_less(which, target, a.value, b.value);
  });
}

double pair_residual(const GeneratorMatrix& gen, const ComplexState& v, Complex lambda) {
  ComplexState r = gen.apply(v);
  r -= lambda * v;
  const double vn = gen.energy().norm(v);
  return vn > 0.0 ? gen.energy().norm(r) / vn : 0.0;
}

}  // namespace

Eigen::VectorXcd dense_eigenvalues(const GeneratorMatrix& gen) {
  const DenseGenerator dense = dense_form(gen);
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense.a_hat, false);
  if (es.info() != Eigen::Success) throw NumericalFailure("dense eigensolve did not converge");
  return es.eigenvalues();
}

SpectrumResult spectrum(const GeneratorMatrix& gen, int n_eigs, SpectrumOrder which, const SpectrumOptions& options) {
  const int dim = gen.dimension();
  if (n_eigs > dim) throw InvalidInput("spectrum: n_eigs exceeds the dimension of the state space");
  if (gen.grid().n_cells() > options.dense_limit) {
    if (n_eigs <= 0) throw InvalidInput("spectrum: the iterative path needs a finite n_eigs");
    SpectrumResult r = spectrum_near(gen, options.shift, n_eigs, options);
    sort_pairs(r.pairs, which, options.shift);
    return r;
  }

  const DenseGenerator dense = dense_form(gen);
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense.a_hat, options.with_vectors);
  if (es.info() != Eigen::Success) throw NumericalFailure("dense eigensolve did not converge");

  const Eigen::VectorXcd values = es.eigenvalues();
  std::vector<int> order(values.size());
  for (int i = 0; i < static_cast<int>(order.size()); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return value_less(which, options.shift, values(a), values(b)); });

  SpectrumResult out;
  out.dense = true;
  out.requested = n_eigs > 0 ? n_eigs : dim;
  const int take = out.requested;
  for (int idx = 0; idx < dim && static_cast<int>(out.pairs.size()) < take; ++idx) {
    const int i = order[idx];
    EigenPair pair{values(i), ComplexState(gen.grid()), std::numeric_limits<double>::quiet_NaN()};
    if (options.with_vectors) {
      pair.vector = dense.lift(gen.grid(), es.eigenvectors().col(i));
      const double vn = gen.energy().norm(pair.vector);
      if (vn > 0.0) pair.vector *= Complex(1.0 / vn);
      pair.residual = pair_residual(gen, pair.vector, pair.value);
      if (!(pair.residual < options.residual_tol)) continue;
    }
    out.pairs.push_back(std::move(pair));
  }
  out.converged = static_cast<int>(out.pairs.size());
  return out;
}

SpectrumResult spectrum_near(const GeneratorMatrix& gen, Complex shift, int n_eigs, const SpectrumOptions& options) {
  if (n_eigs < 1) throw InvalidInput("spectrum_near: n_eigs must be positive");
  const int dim = gen.dimension();
  if (n_eigs > dim) throw InvalidInput("spectrum_near: n_eigs exceeds the dimension of the state space");
  const ShiftedSolver<Complex> solver(gen, shift);
  const EnergyProduct& ep = gen.energy();
  const Grid& grid = gen.grid();

  const int m = std::min(dim, std::max(2 * n_eigs + 20, 40));
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  ComplexState start(grid);
  for (Eigen::Index i = 0; i < start.data().size(); ++i) start.data()(i) = Complex(normal(rng), normal(rng));
  start = project_constraints(start);

  SpectrumResult out;
  out.dense = false;
  out.requested = n_eigs;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    // Arnoldi for (shift - A)^{-1} in the energy inner product.
    std::vector<ComplexState> v;
    v.reserve(m + 1);
    Eigen::MatrixXcd hm = Eigen::MatrixXcd::Zero(m + 1, m);
    start *= Complex(1.0 / ep.norm(start));
    v.push_back(start);
    int steps = m;
    for (int j = 0; j < m; ++j) {
      ComplexState w = solver.solve(v[j]);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const Complex c = ep.inner(w, v[i]);
          hm(i, j) += c;
          w -= c * v[i];
        }
      }
      const double beta = ep.norm(w);
      hm(j + 1, j) = beta;
      if (beta < 1e-14 * std::abs(hm(j, j)) || beta == 0.0) {
        steps = j + 1;
        break;
      }
      w *= Complex(1.0 / beta);
      v.push_back(project_constraints(w));
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(hm.topLeftCorner(steps, steps));
    if (ces.info() != Eigen::Success) throw NumericalFailure("Arnoldi: Hessenberg eigensolve failed");
    std::vector<int> idx(steps);
    for (int i = 0; i < steps; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(ces.eigenvalues()(a)) > std::abs(ces.eigenvalues()(b)); });

    std::vector<EigenPair> pairs;
    ComplexState next(grid);
    for (int r = 0; r < std::min(n_eigs, steps); ++r) {
      const Complex theta = ces.eigenvalues()(idx[r]);
      if (std::abs(theta) == 0.0) continue;
      const Eigen::VectorXcd y = ces.eigenvectors().col(idx[r]);
      ComplexState x(grid);
      for (int i = 0; i < steps; ++i) x.data() += y(i) * v[i].data();
      x *= Complex(1.0 / ep.norm(x));
      const Complex lambda = shift - 1.0 / theta;
      const double res = pair_residual(gen, x, lambda);
      if (res < options.residual_tol) {
        pairs.push_back({lambda, x, res});
      } else {
        next += x;
      }
    }
    if (static_cast<int>(pairs.size()) >= std::min(n_eigs, steps) || restart == options.max_restarts ||
        ep.norm(next) == 0.0) {
      out.pairs = std::move(pairs);
      break;
    }
    // Restart from the sum of converged and unconverged wanted Ritz vectors.
    for (const EigenPair& p : pairs) next += p.vector;
    start = project_constraints(next);
  }
  out.converged = static_cast<int>(out.pairs.size());
  if (!options.with_vectors) {
    for (EigenPair& p : out.pairs) p.vector = ComplexState(grid);
  }
  return out;
}

}  // namespace bresse
