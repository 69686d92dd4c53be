#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bresse/generator.hpp"
#include "test_support.hpp"

using namespace bresse;
using bresse::testing::random_state;

constexpr double kPi = std::numbers::pi;

namespace {

// Continuum velocity rows for phi = a sin(Nx), psi = b cos(Nx), w = c cos(Nx)
// and phi_t = d sin(Nx): coefficients of sin, cos, cos in rows 2, 4, 6.
Eigen::Vector3d continuum_rows(const PhysicalParams& p, double N, double a, double b, double c, double d) {
  const double shear = a * N + b + p.l * c;     // phi_x + psi + l w, times cos
  const double axial = -c * N - p.l * a;        // w_x - l phi, times sin
  const double row2 = (-p.k * N * shear + p.l * p.k0 * axial - p.delta * d) / p.rho1;
  const double row4 = (-p.b * N * N * b - p.k * shear) / p.rho2;
  const double row6 = (p.k0 * N * axial - p.l * p.k * shear) / p.rho1;
  return {row2, row4, row6};
}

}  // namespace

TEST(Generator, ZeroMapsToZero) {
  const GeneratorMatrix gen(PhysicalParams{}, Grid(16));
  EXPECT_EQ(gen.apply(State(Grid(16))).data().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(gen.dimension(), 6 * 16 - 6);
}

TEST(Generator, DisplacementRowsCopyVelocities) {
  const Grid g(20);
  const GeneratorMatrix gen(PhysicalParams{}, g);
  const State s = random_state(g, 4);
  const State as = gen.apply(s);
  EXPECT_EQ(as.q(), s.p());
}

TEST(Generator, MatchesContinuumOperatorAtSecondOrder) {
  const PhysicalParams p{1.2, 0.8, 1.5, 2.0, 1.1, 0.7, 0.6};
  const double N = 2 * kPi;
  const double a = 0.9, b = -0.4, c = 0.3, d = 1.7;
  const Eigen::Vector3d exact = continuum_rows(p, N, a, b, c, d);
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    const Grid g(n);
    StateProfile prof;
    prof.phi = [&](double x) { return Complex(a * std::sin(N * x)); };
    prof.phi_t = [&](double x) { return Complex(d * std::sin(N * x)); };
    prof.psi = [&](double x) { return Complex(b * std::cos(N * x)); };
    prof.w = [&](double x) { return Complex(c * std::cos(N * x)); };
    const State s = real_part(sample(g, prof));
    const State as = GeneratorMatrix(p, g).apply(s);
    double err = 0.0;
    for (int j = 1; j < n; ++j) err = std::max(err, std::abs(as.phi_t()(j - 1) - exact(0) * std::sin(N * g.node(j))));
    for (int j = 0; j < n; ++j) {
      const double cs = std::cos(N * g.cell_center(j));
      err = std::max(err, std::abs(as.psi_t()(j) - exact(1) * cs));
      err = std::max(err, std::abs(as.w_t()(j) - exact(2) * cs));
    }
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.3) << "n_cells " << n;
    prev = err;
  }
}

TEST(Generator, PreservesConstraints) {
  const Grid g(40);
  const GeneratorMatrix gen(PhysicalParams{1, 2, 3, 1, 2, 0.5, 1}, g);
  for (int trial = 0; trial < 10; ++trial) {
    const State as = gen.apply(random_state(g, trial));
    EXPECT_LT(constraint_defect(as), 1e-13 * as.data().cwiseAbs().maxCoeff());
  }
}

TEST(Generator, DissipationIdentityOnUnitState) {
  const Grid g(64);
  const GeneratorMatrix gen(PhysicalParams{}, g);
  State s = random_state(g, 17);
  s *= 1.0 / gen.energy().norm(s);
  const double lhs = gen.energy().inner(gen.apply(s), s);
  EXPECT_NEAR(lhs + l2_norm_squared(s.phi_t(), g), 0.0, 1e-3);
  EXPECT_NEAR(lhs, dissipation_rate(s, gen.params(), g), 1e-12);
}

TEST(Generator, SkewWithoutDamping) {
  PhysicalParams p{1.5, 0.5, 2.0, 1.0, 3.0, 0.5, 0.0};
  for (int n : {32, 64}) {
    const Grid g(n);
    const GeneratorMatrix gen(p, g);
    for (int trial = 0; trial < 5; ++trial) {
      const State a = random_state(g, 2 * trial);
      const State b = random_state(g, 2 * trial + 1);
      const double s = gen.energy().inner(gen.apply(a), b) + gen.energy().inner(a, gen.apply(b));
      EXPECT_LE(std::abs(s), 1e-12 * gen.energy().norm(gen.apply(a)) * gen.energy().norm(b) +
                                 1e-12 * gen.energy().norm(a) * gen.energy().norm(gen.apply(b)));
    }
  }
}

TEST(Generator, DissipativeOnManyRandomStates) {
  const Grid g(32);
  const GeneratorMatrix gen(PhysicalParams{1, 1, 1, 1, 2, 0.5, 2.0}, g);
  for (int trial = 0; trial < 1000; ++trial) {
    const State s = random_state(g, 5000 + trial);
    EXPECT_LE(gen.energy().inner(gen.apply(s), s), 1e-10 * gen.energy().norm_squared(s));
  }
}

TEST(Generator, EnergyFormIsGramTimesGenerator) {
  const Grid g(16);
  const GeneratorMatrix gen(PhysicalParams{1, 2, 1, 3, 1, 0.5, 1}, g);
  const SparseMatrix j = gen.energy_form();
  for (int trial = 0; trial < 3; ++trial) {
    const State x = random_state(g, trial);
    const State y = random_state(g, 10 + trial);
    const double via_j = x.data().dot(j * y.data());
    const double via_apply = gen.energy().inner(gen.apply(y), x);
    EXPECT_NEAR(via_j, via_apply, 1e-10 * std::abs(via_apply) + 1e-10);
  }
}

TEST(Generator, BasisSpansConstrainedSpace) {
  const Grid g(12);
  const GeneratorMatrix gen(PhysicalParams{}, g);
  const SparseMatrix p = gen.state_basis();
  EXPECT_EQ(p.cols(), g.constrained_dimension());
  const Eigen::MatrixXd dense = Eigen::MatrixXd(p);
  EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(dense).rank(), g.constrained_dimension());
  for (int c = 0; c < dense.cols(); ++c) {
    EXPECT_LT(constraint_defect(State(g, dense.col(c))), 1e-15);
  }
}

TEST(DissipationRate, Examples) {
  const Grid g(32);
  State s = random_state(g, 1);
  PhysicalParams p;
  p.delta = 0.0;
  EXPECT_EQ(dissipation_rate(s, p, g), 0.0);
  p.delta = 2.0;
  State ones(g);
  ones.phi_t().setOnes();
  EXPECT_NEAR(dissipation_rate(ones, p, g), -2.0 * 31.0 / 32.0, 1e-14);
  EXPECT_THROW(dissipation_rate(State(Grid(16)), p, g), GridMismatch);
}

TEST(DenseForm, OrthonormalCoordinatesPreserveNorm) {
  const Grid g(12);
  const GeneratorMatrix gen(PhysicalParams{1, 2, 1, 3, 2, 0.5, 1}, g);
  const DenseGenerator d = dense_form(gen);
  ASSERT_EQ(d.a_hat.rows(), gen.dimension());
  const Eigen::VectorXcd y = Eigen::VectorXcd::Random(gen.dimension());
  const ComplexState phi = d.lift(g, y);
  EXPECT_NEAR(gen.energy().norm(phi), y.norm(), 1e-10 * y.norm());
  // A lift(y) = lift(a_hat y)
  const ComplexState lhs = gen.apply(phi);
  const ComplexState rhs = d.lift(g, d.a_hat.cast<Complex>() * y);
  EXPECT_LT(gen.energy().norm(lhs - rhs), 1e-9 * gen.energy().norm(lhs));
  // symmetric part is -diag(0, D)
  const Eigen::MatrixXd sym = 0.5 * (d.a_hat + d.a_hat.transpose());
  EXPECT_LE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().maxCoeff(), 1e-12);
}

TEST(Spectrum, ConservativeSystemIsOnImaginaryAxis) {
  PhysicalParams p;
  p.delta = 0.0;
  const GeneratorMatrix gen(p, Grid(32));
  const SpectrumResult r = spectrum(gen, 0, SpectrumOrder::all);
  EXPECT_EQ(r.converged, gen.dimension());
  for (const EigenPair& e : r.pairs) EXPECT_LT(std::abs(e.value.real()), 1e-8);
}

TEST(Spectrum, DampedAdmissibleIsStrictlyStable) {
  const GeneratorMatrix gen(PhysicalParams{}, Grid(48));
  ASSERT_TRUE(admissibility(gen.params()).admissible());
  const SpectrumResult r = spectrum(gen, 0, SpectrumOrder::rightmost);
  ASSERT_FALSE(r.pairs.empty());
  EXPECT_LT(r.pairs.front().value.real(), 0.0);
  for (const EigenPair& e : r.pairs) EXPECT_LT(e.residual, 1e-8);
}

TEST(Spectrum, ConjugatePairs) {
  const Eigen::VectorXcd ev = dense_eigenvalues(GeneratorMatrix(PhysicalParams{1, 1, 1, 1, 2, 0.5, 1}, Grid(16)));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double best = 1e300;
    for (Eigen::Index j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev(j) - std::conj(ev(i))));
    EXPECT_LT(best, 1e-9 * std::max(1.0, std::abs(ev(i))));
  }
}

TEST(Spectrum, OrderingAndCount) {
  const GeneratorMatrix gen(PhysicalParams{}, Grid(16));
  const SpectrumResult r = spectrum(gen, 6, SpectrumOrder::rightmost);
  ASSERT_EQ(r.pairs.size(), 6u);
  for (std::size_t i = 1; i < r.pairs.size(); ++i) EXPECT_GE(r.pairs[i - 1].value.real(), r.pairs[i].value.real());
  const SpectrumResult near = spectrum(gen, 6, SpectrumOrder::near_imaginary_axis);
  for (std::size_t i = 1; i < near.pairs.size(); ++i) {
    EXPECT_LE(std::abs(near.pairs[i - 1].value.real()), std::abs(near.pairs[i].value.real()));
  }
  EXPECT_THROW(spectrum(gen, gen.dimension() + 1, SpectrumOrder::all), InvalidInput);
}

TEST(Spectrum, ArnoldiAgreesWithDense) {
  const GeneratorMatrix gen(PhysicalParams{1, 1, 1, 1, 2, 0.5, 1}, Grid(40));
  const Eigen::VectorXcd dense = dense_eigenvalues(gen);
  const Complex shift(0.0, 12.0);
  const SpectrumResult r = spectrum_near(gen, shift, 6);
  ASSERT_EQ(r.converged, 6);
  std::vector<double> dist(dense.size());
  for (Eigen::Index i = 0; i < dense.size(); ++i) dist[i] = std::abs(dense(i) - shift);
  std::sort(dist.begin(), dist.end());
  for (const EigenPair& e : r.pairs) {
    double best = 1e300;
    for (Eigen::Index i = 0; i < dense.size(); ++i) best = std::min(best, std::abs(dense(i) - e.value));
    EXPECT_LT(best, 1e-8 * std::abs(e.value));
    EXPECT_LE(std::abs(e.value - shift), dist[5] * (1 + 1e-9));
  }
}

TEST(Spectrum, LargeGridUsesShiftInvert) {
  SpectrumOptions opts;
  opts.dense_limit = 16;
  opts.shift = Complex(0.0, 5.0);
  const GeneratorMatrix gen(PhysicalParams{}, Grid(32));
  const SpectrumResult r = spectrum(gen, 4, SpectrumOrder::all, opts);
  EXPECT_FALSE(r.dense);
  EXPECT_EQ(r.converged, 4);
  EXPECT_THROW(spectrum(gen, 0, SpectrumOrder::all, opts), InvalidInput);
}

TEST(Spectrum, LowModesConvergeAtSecondOrder) {
  const PhysicalParams p{};
  auto low_modes = [&](int n) {
    const SpectrumResult r = spectrum_near(GeneratorMatrix(p, Grid(n)), Complex(0.0, 0.0), 10);
    std::vector<Complex> v;
    for (const EigenPair& e : r.pairs) v.push_back(e.value);
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
      return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    return v;
  };
  const auto a = low_modes(32);
  const auto b = low_modes(64);
  const auto c = low_modes(128);
  ASSERT_EQ(a.size(), 10u);
  ASSERT_EQ(c.size(), 10u);
  for (int i = 0; i < 10; ++i) {
    const double e1 = std::abs(a[i] - b[i]);
    const double e2 = std::abs(b[i] - c[i]);
    EXPECT_NEAR(e1 / e2, 4.0, 0.5) << "mode " << i;
  }
}
