#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bresse/spectral_space.hpp"
#include "test_support.hpp"

using namespace bresse;
using bresse::testing::random_state;

constexpr double kPi = std::numbers::pi;

TEST(Grid, SpacingAndNodes) {
  const Grid g(8);
  EXPECT_DOUBLE_EQ(g.h(), 0.125);
  EXPECT_EQ(g.nodes().size(), 9u);
  EXPECT_DOUBLE_EQ(g.nodes().back(), 1.0);
  EXPECT_DOUBLE_EQ(Grid(200).h(), 0.005);
  EXPECT_THROW(Grid(4), InvalidInput);
}

TEST(Grid, Dimensions) {
  const Grid g(10);
  EXPECT_EQ(g.interior_nodes(), 9);
  EXPECT_EQ(g.displacement_size(), 29);
  EXPECT_EQ(g.state_size(), 58);
  EXPECT_EQ(g.constrained_dimension(), 54);
  EXPECT_EQ(g.cell_centers().front(), 0.05);
}

TEST(ZeroMean, ConstantVanishes) {
  const Grid g(16);
  EXPECT_LT(project_zero_mean(Eigen::VectorXd(Eigen::VectorXd::Constant(16, 5.0)), g).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(project_zero_mean(Eigen::VectorXd(Eigen::VectorXd::Constant(17, 5.0)), g).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ZeroMean, CosineUnchangedToQuadratureError) {
  for (int n : {16, 64}) {
    const Grid g(n);
    Eigen::VectorXd v(n + 1);
    for (int j = 0; j <= n; ++j) v(j) = std::cos(kPi * g.node(j));
    const Eigen::VectorXd p = project_zero_mean(v, g);
    EXPECT_LE((p - v).cwiseAbs().maxCoeff(), g.h() * g.h());
  }
}

TEST(ZeroMean, Idempotent) {
  const Grid g(32);
  const Eigen::VectorXd v = Eigen::VectorXd::Random(32).array() + 3.0;
  const Eigen::VectorXd once = project_zero_mean(v, g);
  EXPECT_LT((project_zero_mean(once, g) - once).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ZeroMean, WrongLengthThrows) {
  EXPECT_THROW(project_zero_mean(Eigen::VectorXd(Eigen::VectorXd::Zero(5)), Grid(16)), GridMismatch);
}

TEST(State, ComponentLayout) {
  const Grid g(8);
  State s(g);
  EXPECT_EQ(s.phi().size(), 7);
  EXPECT_EQ(s.psi().size(), 8);
  EXPECT_EQ(s.w_t().size(), 8);
  s.w_t().setConstant(1.0);
  EXPECT_EQ(s.data().tail(8).sum(), 8.0);
  EXPECT_EQ(s.offset(Component::phi_t), g.displacement_size());
}

TEST(State, ConstraintProjection) {
  const Grid g(16);
  State s(g);
  s.data().setConstant(2.0);
  EXPECT_GT(constraint_defect(s), 1.0);
  const State p = project_constraints(s);
  EXPECT_LT(constraint_defect(p), 1e-15);
  EXPECT_EQ(p.phi(), s.phi());
  EXPECT_EQ(p.phi_t(), s.phi_t());
}

TEST(State, GridMismatchDetected) {
  State a(Grid(8));
  const State b(Grid(16));
  EXPECT_THROW(a += b, GridMismatch);
  const EnergyProduct ep(PhysicalParams{}, Grid(8));
  EXPECT_THROW(energy_norm(b, ep), GridMismatch);
}

TEST(EnergyNorm, ZeroState) {
  const Grid g(16);
  const EnergyProduct ep(PhysicalParams{}, g);
  EXPECT_EQ(energy_norm(State(g), ep), 0.0);
}

TEST(EnergyNorm, VerticalVelocityOnly) {
  PhysicalParams p;
  p.rho1 = 2.0;
  const Grid g(32);
  const EnergyProduct ep(p, g);
  State s(g);
  s.phi_t().setOnes();
  const double l2 = l2_norm_squared(s.phi_t(), g);
  EXPECT_NEAR(l2, (32 - 1) / 32.0, 1e-15);
  EXPECT_NEAR(ep.norm_squared(s), 2.0 * l2, 1e-14);
}

// phi = sin(pi x), psi = w = cos(pi x), velocities a sin / cos as well:
// every term integrates to (amplitude)^2 / 2.
double continuum_energy(const PhysicalParams& p) {
  const double shear = p.k * std::pow(kPi + 1.0 + p.l, 2) / 2;
  const double bending = p.b * kPi * kPi / 2;
  const double axial = p.k0 * std::pow(kPi + p.l, 2) / 2;
  const double kinetic = (p.rho1 * 4.0 + p.rho2 * 9.0 + p.rho1 * 16.0) / 2;
  return shear + bending + axial + kinetic;
}

TEST(EnergyNorm, ConvergesAtSecondOrder) {
  const PhysicalParams p{1.3, 0.7, 1.1, 2.0, 0.9, 0.5, 1.0};
  StateProfile prof;
  prof.phi = [](double x) { return Complex(std::sin(kPi * x)); };
  prof.phi_t = [](double x) { return Complex(2 * std::sin(kPi * x)); };
  prof.psi = [](double x) { return Complex(std::cos(kPi * x)); };
  prof.psi_t = [](double x) { return Complex(3 * std::cos(kPi * x)); };
  prof.w = [](double x) { return Complex(std::cos(kPi * x)); };
  prof.w_t = [](double x) { return Complex(4 * std::cos(kPi * x)); };
  const double exact = continuum_energy(p);
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    const Grid g(n);
    const EnergyProduct ep(p, g);
    const double err = std::abs(ep.norm_squared(sample(g, prof)) - exact);
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.2);
    prev = err;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(EnergyNorm, ParallelogramLaw) {
  const Grid g(48);
  const EnergyProduct ep(PhysicalParams{}, g);
  for (int trial = 0; trial < 5; ++trial) {
    const State a = random_state(g, 10 + trial);
    const State b = random_state(g, 100 + trial);
    const double lhs = ep.norm_squared(a + b) + ep.norm_squared(a - b);
    const double rhs = 2 * ep.norm_squared(a) + 2 * ep.norm_squared(b);
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
    EXPECT_NEAR(ep.inner(a, b), ep.inner(b, a), 1e-12 * rhs);
  }
}

TEST(EnergyNorm, MatchesGramMatrix) {
  const Grid g(24);
  const EnergyProduct ep(PhysicalParams{1, 2, 3, 4, 5, 0.5, 1}, g);
  const State a = random_state(g, 3);
  const State b = random_state(g, 4);
  const double via_gram = a.data().dot(ep.gram() * b.data());
  EXPECT_NEAR(ep.inner(a, b), via_gram, 1e-12 * std::abs(via_gram));
}

TEST(EnergyNorm, PositiveOnRandomStates) {
  const Grid g(32);
  const EnergyProduct ep(PhysicalParams{}, g);
  for (int trial = 0; trial < 20; ++trial) {
    State s = random_state(g, 1000 + trial);
    s.p().setZero();
    EXPECT_GT(ep.norm_squared(s), 0.0);
  }
}

TEST(EnergyNorm, ComplexConjugateSymmetry) {
  const Grid g(16);
  const EnergyProduct ep(PhysicalParams{}, g);
  const ComplexState a = bresse::testing::random_complex_state(g, 5);
  const ComplexState b = bresse::testing::random_complex_state(g, 6);
  EXPECT_NEAR(std::abs(ep.inner(a, b) - std::conj(ep.inner(b, a))), 0.0, 1e-12);
  EXPECT_NEAR(ep.inner(a, a).imag(), 0.0, 1e-12);
}

TEST(StateCsv, RealRoundTrip) {
  const Grid g(12);
  const State s = random_state(g, 9);
  std::stringstream ss;
  write_state_csv(ss, s);
  const ComplexState back = read_state_csv(ss);
  EXPECT_EQ(back.grid(), g);
  EXPECT_EQ(back.data().real(), s.data());
  EXPECT_EQ(back.data().imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(StateCsv, ComplexRoundTripWithCommentLine) {
  const Grid g(10);
  const ComplexState s = bresse::testing::random_complex_state(g, 2);
  std::stringstream ss;
  ss << "# comment\n";
  write_state_csv(ss, s);
  const ComplexState back = read_state_csv(ss);
  EXPECT_EQ(back.data(), s.data());
}

TEST(StateCsv, HeaderColumns) {
  std::stringstream ss;
  write_state_csv(ss, State(Grid(8)));
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "x,phi,phi_t,psi,psi_t,w,w_t");
}

TEST(StateCsv, MalformedInputThrows) {
  std::stringstream bad("a,b\n1,2\n");
  EXPECT_THROW(read_state_csv(bad), InvalidInput);
  std::stringstream empty;
  EXPECT_THROW(read_state_csv(empty), InvalidInput);
}
