#include "bresse/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

namespace bresse {

namespace {

constexpr double kSolveResidualTol = 1e-10;

// R = diag(I, -I)
ComplexState reflect(ComplexState s) {
  s.p() = -s.p();
  return s;
}

ResolventSample failed_sample(double lambda, NormMethod method, const std::string& why) {
  ResolventSample s;
  s.lambda = lambda;
  s.method = method;
  s.norm_estimate = std::numeric_limits<double>::quiet_NaN();
  s.residual = std::numeric_limits<double>::quiet_NaN();
  s.error = why;
  return s;
}

}  // namespace

const char* method_name(NormMethod m) {
  switch (m) {
    case NormMethod::dense_svd_oracle: return "dense_svd_oracle";
    case NormMethod::inverse_iteration: return "inverse_iteration";
  }
  return "?";
}

ComplexState solve_shifted(const GeneratorMatrix& gen, double lambda, const ComplexState& f) {
  const ShiftedSolver<Complex> solver(gen, Complex(0.0, lambda), true);
  ComplexState phi = solver.solve(f);
  const double res = solver.residual(phi, f);
  if (!(res < kSolveResidualTol)) {
    throw NumericalFailure("solve_shifted: residual " + std::to_string(res) + " exceeds 1e-10 at lambda " +
                           std::to_string(lambda));
  }
  return phi;
}

ResolventSample resolvent_norm(const GeneratorMatrix& gen, double lambda, const ResolventOptions& options) {
  const Complex s(0.0, lambda);
  const ShiftedSolver<Complex> solver(gen, s, options.check_condition);
  const EnergyProduct& ep = gen.energy();
  const Grid& grid = gen.grid();
  const int dim = gen.dimension();
  const int max_steps = std::min(options.max_iterations, dim);

  auto apply_tt = [&](const ComplexState& x) {
    const ComplexState y = solver.solve(x);
    return project_constraints(reflect(solver.solve_conjugate(reflect(y))));
  };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  ComplexState v0(grid);
  for (Eigen::Index i = 0; i < v0.data().size(); ++i) v0.data()(i) = Complex(normal(rng), normal(rng));
  v0 = project_constraints(v0);
  v0 *= Complex(1.0 / ep.norm(v0));

  std::vector<ComplexState> basis;
  basis.push_back(v0);
  std::vector<double> alpha;
  std::vector<double> beta;
  double theta = 0.0;
  Eigen::VectorXd ritz;
  bool converged = false;
  int steps = 0;
  for (int j = 0; j < max_steps; ++j) {
    ComplexState w = apply_tt(basis[j]);
    const double a = std::real(ep.inner(w, basis[j]));
    alpha.push_back(a);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) {
      for (const ComplexState& b : basis) w -= ep.inner(w, b) * b;
    }
    const double bnext = ep.norm(w);
    steps = j + 1;

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 < steps; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::Index top = steps - 1;
    theta = es.eigenvalues()(top);
    ritz = es.eigenvectors().col(top);
    const double bound = bnext * std::abs(ritz(top));
    // |theta - true eigenvalue| <= bound for the Ritz pair
    if (bound <= options.tol * theta || bnext <= 1e-14 * theta) {
      converged = true;
      break;
    }
    beta.push_back(bnext);
    w *= Complex(1.0 / bnext);
    basis.push_back(w);
  }

  if (!converged) {
    if (options.dense_fallback && grid.n_cells() <= options.dense_limit) {
      ResolventSample r = resolvent_norm_dense(gen, lambda);
      r.iterations = steps;
      return r;
    }
    return failed_sample(lambda, NormMethod::inverse_iteration,
                         "Lanczos did not converge in " + std::to_string(steps) + " iterations");
  }

  ComplexState x(grid);
  for (int i = 0; i < steps; ++i) x.data() += ritz(i) * basis[i].data();
  x *= Complex(1.0 / ep.norm(x));
  const ComplexState tx = solver.solve(x);

  ResolventSample out;
  out.lambda = lambda;
  out.method = NormMethod::inverse_iteration;
  out.norm_estimate = std::sqrt(theta);
  out.residual = solver.residual(tx, x);
  out.iterations = steps;
  return out;
}

ResolventSample resolvent_norm_dense(const GeneratorMatrix& gen, double lambda) {
  const DenseGenerator dense = dense_form(gen);
  const Eigen::Index n = dense.a_hat.rows();
  Eigen::MatrixXcd shifted = -dense.a_hat.cast<Complex>();
  shifted.diagonal().array() += Complex(0.0, lambda);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smin = sv(n - 1);
  ResolventSample out;
  out.lambda = lambda;
  out.method = NormMethod::dense_svd_oracle;
  out.iterations = 0;
  if (!(smin > 0.0)) {
    out = failed_sample(lambda, NormMethod::dense_svd_oracle, "shift is an eigenvalue");
    return out;
  }
  out.norm_estimate = 1.0 / smin;
  const Eigen::VectorXcd u = svd.matrixU().col(n - 1);
  const Eigen::VectorXcd v = svd.matrixV().col(n - 1);
  out.residual = (shifted * v - smin * u).norm() / smin;
  return out;
}

std::vector<ResolventSample> sweep(const GeneratorMatrix& gen, const std::vector<double>& lambdas,
                                   const ResolventOptions& options) {
  std::vector<ResolventSample> out(lambdas.size());
  const auto count = static_cast<long>(lambdas.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    const double lambda = lambdas[static_cast<std::size_t>(i)];
    if (!std::isfinite(lambda)) {
      out[i] = failed_sample(lambda, NormMethod::inverse_iteration, "non-finite lambda");
      continue;
    }
    try {
      out[i] = resolvent_norm(gen, lambda, options);
    } catch (const NearSpectralPoint& e) {
      out[i] = failed_sample(lambda, NormMethod::inverse_iteration, std::string("near spectral point: ") + e.what());
    } catch (const std::exception& e) {
      out[i] = failed_sample(lambda, NormMethod::inverse_iteration, e.what());
    }
  }
  return out;
}

std::vector<double> geometric_grid(double start, double ratio, int count) {
  if (count < 0 || !(start > 0.0) || !(ratio > 0.0)) throw InvalidInput("geometric_grid: bad range");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out[j] = start * std::pow(ratio, j);
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 0 || !(hi >= lo)) throw InvalidInput("linear_grid: bad range");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out[j] = count == 1 ? lo : lo + (hi - lo) * j / (count - 1);
  return out;
}

namespace {

template <typename Scalar>
BasicState<Scalar> static_solve_impl(const GeneratorMatrix& gen, const BasicState<Scalar>& f) {
  gen.energy().check_grid(f.grid());
  const double scale = f.data().cwiseAbs().maxCoeff();
  if (constraint_defect(f) > 1e-10 * std::max(scale, 1e-300)) {
    throw InvalidInput("static_solve: right-hand side violates the zero-mean constraints");
  }
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const SparseMatrix& pq = gen.displacement_basis();
  const SparseMatrix kr = pq.transpose() * gen.energy().stiffness() * pq;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(kr);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
    throw NumericalFailure("static_solve: bilinear form is not positive definite (l close to a multiple of pi?)");
  }
  const Vec load = (gen.energy().mass().array().template cast<Scalar>() * f.p().array() +
                    gen.damping().array().template cast<Scalar>() * f.q().array())
                       .matrix();
  const Vec rhs = -(pq.transpose().template cast<Scalar>() * load);
  const auto ldlt_solve = [&ldlt](const Vec& b) {
    if constexpr (std::is_same_v<Scalar, double>) {
      return Vec(ldlt.solve(b));
    } else {
      Vec x(b.size());
      x.real() = ldlt.solve(Eigen::VectorXd(b.real()));
      x.imag() = ldlt.solve(Eigen::VectorXd(b.imag()));
      return x;
    }
  };
  // refinement recovers the digits lost to the 1/h^2 conditioning
  Vec c = ldlt_solve(rhs);
  for (int it = 0; it < 3; ++it) {
    const Vec q = pq.template cast<Scalar>() * c;
    const Vec r = -(pq.transpose().template cast<Scalar>() * (gen.energy().stiffness().template cast<Scalar>() * q + load));
    c += ldlt_solve(r);
  }
  BasicState<Scalar> z(f.grid());
  z.q() = pq.template cast<Scalar>() * c;
  z.p() = f.q();

  BasicState<Scalar> r = gen.apply(z);
  r -= f;
  const double fn = gen.energy().norm(f);
  const double res = fn > 0.0 ? gen.energy().norm(r) / fn : gen.energy().norm(r);
  if (!(res < kSolveResidualTol)) {
    std::ostringstream msg;
    msg << "static_solve: residual " << res << " exceeds 1e-10";
    throw NumericalFailure(msg.str());
  }
  return z;
}

}  // namespace

State static_solve(const GeneratorMatrix& gen, const State& f) { return static_solve_impl(gen, f); }
ComplexState static_solve(const GeneratorMatrix& gen, const ComplexState& f) { return static_solve_impl(gen, f); }

double bilinear_form_min_eigenvalue(const GeneratorMatrix& gen) {
  const SparseMatrix& pq = gen.displacement_basis();
  const Eigen::MatrixXd kr = Eigen::MatrixXd(pq.transpose() * gen.energy().stiffness() * pq);
  const Eigen::MatrixXd mr = Eigen::MatrixXd(pq.transpose() * gen.energy().mass().asDiagonal() * pq);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kr, mr, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("bilinear_form_min_eigenvalue: eigensolve failed");
  return es.eigenvalues()(0);
}

}  // namespace bresse
