#include "bresse/spectral_space.hpp"

#include <vector>

namespace bresse {

Grid::Grid(int n_cells) : n_cells_(n_cells), h_(0.0) {
  if (n_cells < kMinCells) {
    throw InvalidInput("grid needs at least " + std::to_string(kMinCells) + " cells, got " +
                       std::to_string(n_cells));
  }
  h_ = 1.0 / n_cells;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(n_cells_ + 1);
  for (int j = 0; j <= n_cells_; ++j) x[j] = node(j);
  return x;
}

std::vector<double> Grid::cell_centers() const {
  std::vector<double> x(n_cells_);
  for (int j = 0; j < n_cells_; ++j) x[j] = cell_center(j);
  return x;
}

Grid make_grid(int n_cells) { return Grid(n_cells); }

const char* component_name(Component c) {
  switch (c) {
    case Component::phi: return "phi";
    case Component::phi_t: return "phi_t";
    case Component::psi: return "psi";
    case Component::psi_t: return "psi_t";
    case Component::w: return "w";
    case Component::w_t: return "w_t";
  }
  return "?";
}

ComplexState to_complex(const State& s) {
  return ComplexState(s.grid(), s.data().cast<Complex>());
}

State real_part(const ComplexState& s) { return State(s.grid(), s.data().real()); }

ComplexState sample(const Grid& grid, const StateProfile& profile) {
  ComplexState s(grid);
  auto fill = [&](Component c, const std::function<Complex(double)>& f) {
    if (!f) return;
    auto seg = s.component(c);
    for (Eigen::Index j = 0; j < seg.size(); ++j) {
      const double x = is_nodal(c) ? grid.node(static_cast<int>(j) + 1) : grid.cell_center(static_cast<int>(j));
      seg(j) = f(x);
    }
  };
  fill(Component::phi, profile.phi);
  fill(Component::phi_t, profile.phi_t);
  fill(Component::psi, profile.psi);
  fill(Component::psi_t, profile.psi_t);
  fill(Component::w, profile.w);
  fill(Component::w_t, profile.w_t);
  return s;
}

namespace {

template <typename Vec>
Vec project_impl(const Vec& v, const Grid& grid) {
  Vec out = v;
  out.array() -= discrete_mean(v, grid);
  return out;
}

}  // namespace

Eigen::VectorXd project_zero_mean(const Eigen::VectorXd& v, const Grid& grid) {
  return project_impl(v, grid);
}

Eigen::VectorXcd project_zero_mean(const Eigen::VectorXcd& v, const Grid& grid) {
  return project_impl(v, grid);
}

template <typename Scalar>
BasicState<Scalar> project_constraints(BasicState<Scalar> s) {
  for (Component c : {Component::psi, Component::psi_t, Component::w, Component::w_t}) {
    auto seg = s.component(c);
    const Scalar mean = discrete_mean(seg, s.grid());
    seg.array() -= mean;
  }
  return s;
}

template <typename Scalar>
double constraint_defect(const BasicState<Scalar>& s) {
  double worst = 0.0;
  for (Component c : {Component::psi, Component::psi_t, Component::w, Component::w_t}) {
    worst = std::max(worst, static_cast<double>(std::abs(discrete_mean(s.component(c), s.grid()))));
  }
  return worst;
}

template State project_constraints(State);
template ComplexState project_constraints(ComplexState);
template double constraint_defect(const State&);
template double constraint_defect(const ComplexState&);

SparseMatrix node_to_cell_difference(const Grid& grid) {
  const int n = grid.n_cells();
  const double inv_h = 1.0 / grid.h();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * n);
  for (int c = 0; c < n; ++c) {
    // cell c spans nodes c and c+1; interior node j is column j-1
    if (c + 1 <= n - 1) t.emplace_back(c, c, inv_h);
    if (c >= 1) t.emplace_back(c, c - 1, -inv_h);
  }
  SparseMatrix d(n, n - 1);
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

SparseMatrix cell_to_node_difference(const Grid& grid) {
  const int n = grid.n_cells();
  const double inv_h = 1.0 / grid.h();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * n);
  for (int j = 1; j <= n - 1; ++j) {
    t.emplace_back(j - 1, j, inv_h);
    t.emplace_back(j - 1, j - 1, -inv_h);
  }
  SparseMatrix d(n - 1, n);
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

EnergyProduct::EnergyProduct(const PhysicalParams& params, const Grid& grid)
    : params_(params), grid_(grid) {
  params_.validate();
  const int n = grid.n_cells();
  const int ni = n - 1;
  const double h = grid.h();
  const double l = params_.l;

  // Columns: phi [0, ni), psi [ni, ni+n), w [ni+n, ni+2n).
  // Rows: shear [0, n), bending [n, n+ni), axial [n+ni, n+2ni).
  const SparseMatrix dn = node_to_cell_difference(grid);
  const SparseMatrix dc = cell_to_node_difference(grid);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(8 * n);
  for (int k = 0; k < dn.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(dn, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int c = 0; c < n; ++c) {
    t.emplace_back(c, ni + c, 1.0);
    t.emplace_back(c, ni + n + c, l);
  }
  for (int k = 0; k < dc.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(dc, k); it; ++it) {
      t.emplace_back(n + it.row(), ni + it.col(), it.value());
      t.emplace_back(n + ni + it.row(), ni + n + it.col(), it.value());
    }
  }
  for (int j = 0; j < ni; ++j) t.emplace_back(n + ni + j, j, -l);
  strain_.resize(n + 2 * ni, grid.displacement_size());
  strain_.setFromTriplets(t.begin(), t.end());

  strain_weights_.resize(n + 2 * ni);
  strain_weights_.head(n).setConstant(h * params_.k);
  strain_weights_.segment(n, ni).setConstant(h * params_.b);
  strain_weights_.tail(ni).setConstant(h * params_.k0);

  stiffness_ = SparseMatrix(strain_.transpose() * strain_weights_.asDiagonal() * strain_);
  stiffness_.makeCompressed();

  mass_.resize(grid.displacement_size());
  mass_.head(ni).setConstant(h * params_.rho1);
  mass_.segment(ni, n).setConstant(h * params_.rho2);
  mass_.tail(n).setConstant(h * params_.rho1);
}

SparseMatrix EnergyProduct::gram() const {
  const int half = grid_.displacement_size();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(stiffness_.nonZeros() + half);
  for (int k = 0; k < stiffness_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(stiffness_, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int j = 0; j < half; ++j) t.emplace_back(half + j, half + j, mass_(j));
  SparseMatrix g(2 * half, 2 * half);
  g.setFromTriplets(t.begin(), t.end());
  return g;
}

template <typename Scalar>
Strains<Scalar> EnergyProduct::strains(const BasicState<Scalar>& s) const {
  check_grid(s.grid());
  const int n = grid_.n_cells();
  const int ni = n - 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> all = strain_ * s.q();
  return {all.head(n), all.segment(n, ni), all.tail(ni)};
}

template <typename Scalar>
Scalar EnergyProduct::inner(const BasicState<Scalar>& a, const BasicState<Scalar>& b) const {
  check_grid(a.grid());
  check_grid(b.grid());
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ea = strain_ * a.q();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eb = strain_ * b.q();
  // conj(x)^T y via dot(x, y); we want sum a conj(b) = dot(b, a)
  Scalar potential = eb.dot(strain_weights_.cast<Scalar>().asDiagonal() * ea);
  Scalar kinetic = b.p().dot(mass_.cast<Scalar>().asDiagonal() * a.p());
  return potential + kinetic;
}

template <typename Scalar>
double EnergyProduct::norm_squared(const BasicState<Scalar>& s) const {
  check_grid(s.grid());
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = strain_ * s.q();
  return (strain_weights_.array() * e.array().abs2()).sum() +
         (mass_.array() * s.p().array().abs2()).sum();
}

template Strains<double> EnergyProduct::strains(const State&) const;
template Strains<Complex> EnergyProduct::strains(const ComplexState&) const;
template double EnergyProduct::inner(const State&, const State&) const;
template Complex EnergyProduct::inner(const ComplexState&, const ComplexState&) const;
template double EnergyProduct::norm_squared(const State&) const;
template double EnergyProduct::norm_squared(const ComplexState&) const;

}  // namespace bresse
