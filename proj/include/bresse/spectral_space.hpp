#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "bresse/params.hpp"

namespace bresse {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Thrown when two objects built on different grids are combined.
class GridMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Uniform grid on [0,1].
///
/// Unknowns are staggered: phi and phi_t live at the interior nodes
/// x_j = j h (j = 1..n-1; the Dirichlet endpoint values are eliminated),
/// psi, w and their velocities live at the cell centres x_{j+1/2}
/// (j = 0..n-1). The Neumann condition is a mirror ghost across each
/// endpoint, so psi_x and w_x vanish at x = 0 and x = 1.
class Grid {
 public:
  static constexpr int kMinCells = 8;

  /// Throws InvalidInput for n_cells < 8.
  explicit Grid(int n_cells);

  [[nodiscard]] int n_cells() const { return n_cells_; }
  [[nodiscard]] double h() const { return h_; }
  [[nodiscard]] double node(int j) const { return static_cast<double>(j) / n_cells_; }
  [[nodiscard]] double cell_center(int j) const { return (j + 0.5) / n_cells_; }

  /// n_cells + 1 abscissae j h.
  [[nodiscard]] std::vector<double> nodes() const;
  [[nodiscard]] std::vector<double> cell_centers() const;

  [[nodiscard]] int interior_nodes() const { return n_cells_ - 1; }
  /// Length of the displacement block (phi, psi, w).
  [[nodiscard]] int displacement_size() const { return 3 * n_cells_ - 1; }
  /// Length of a full state vector, before the four zero-mean constraints.
  [[nodiscard]] int state_size() const { return 2 * displacement_size(); }
  /// Dimension of the constrained (zero-mean) state space.
  [[nodiscard]] int constrained_dimension() const { return state_size() - 4; }

  bool operator==(const Grid&) const = default;

 private:
  int n_cells_;
  double h_;
};

Grid make_grid(int n_cells);

enum class Component { phi, phi_t, psi, psi_t, w, w_t };

inline constexpr Component kAllComponents[] = {Component::phi, Component::phi_t, Component::psi,
                                               Component::psi_t, Component::w, Component::w_t};

const char* component_name(Component c);

/// True for components sampled at nodes (phi, phi_t).
constexpr bool is_nodal(Component c) { return c == Component::phi || c == Component::phi_t; }

/// Discrete state Phi = (phi, phi_t, psi, psi_t, w, w_t).
///
/// Storage is one contiguous vector laid out as
/// [phi | psi | w | phi_t | psi_t | w_t], i.e. displacements q followed by
/// velocities p, so that the generator has the block form [[0, I], [., .]].
template <typename Scalar>
class BasicState {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicState(const Grid& grid) : grid_(grid), data_(Vector::Zero(grid.state_size())) {}
  BasicState(const Grid& grid, Vector data) : grid_(grid), data_(std::move(data)) {
    if (data_.size() != grid.state_size()) throw GridMismatch("state vector length does not match grid");
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  auto q() { return data_.head(grid_.displacement_size()); }
  auto q() const { return data_.head(grid_.displacement_size()); }
  auto p() { return data_.tail(grid_.displacement_size()); }
  auto p() const { return data_.tail(grid_.displacement_size()); }

  auto component(Component c) { return data_.segment(offset(c), length(c)); }
  auto component(Component c) const { return data_.segment(offset(c), length(c)); }

  auto phi() { return component(Component::phi); }
  auto phi() const { return component(Component::phi); }
  auto phi_t() { return component(Component::phi_t); }
  auto phi_t() const { return component(Component::phi_t); }
  auto psi() { return component(Component::psi); }
  auto psi() const { return component(Component::psi); }
  auto psi_t() { return component(Component::psi_t); }
  auto psi_t() const { return component(Component::psi_t); }
  auto w() { return component(Component::w); }
  auto w() const { return component(Component::w); }
  auto w_t() { return component(Component::w_t); }
  auto w_t() const { return component(Component::w_t); }

  [[nodiscard]] int offset(Component c) const {
    const int n = grid_.n_cells();
    const int half = grid_.displacement_size();
    switch (c) {
      case Component::phi: return 0;
      case Component::psi: return n - 1;
      case Component::w: return 2 * n - 1;
      case Component::phi_t: return half;
      case Component::psi_t: return half + n - 1;
      case Component::w_t: return half + 2 * n - 1;
    }
    return 0;
  }
  [[nodiscard]] int length(Component c) const { return is_nodal(c) ? grid_.n_cells() - 1 : grid_.n_cells(); }

  BasicState& operator+=(const BasicState& o) {
    check_same_grid(o);
    data_ += o.data_;
    return *this;
  }
  BasicState& operator-=(const BasicState& o) {
    check_same_grid(o);
    data_ -= o.data_;
    return *this;
  }
  BasicState& operator*=(Scalar s) {
    data_ *= s;
    return *this;
  }
  friend BasicState operator+(BasicState a, const BasicState& b) { return a += b; }
  friend BasicState operator-(BasicState a, const BasicState& b) { return a -= b; }
  friend BasicState operator*(Scalar s, BasicState a) { return a *= s; }

  void check_same_grid(const BasicState& o) const {
    if (!(grid_ == o.grid_)) throw GridMismatch("states live on different grids");
  }

 private:
  Grid grid_;
  Vector data_;
};

using State = BasicState<double>;
using ComplexState = BasicState<Complex>;

ComplexState to_complex(const State& s);
State real_part(const ComplexState& s);

/// Per-component profiles used to sample a state onto a grid.
struct StateProfile {
  std::function<Complex(double)> phi, phi_t, psi, psi_t, w, w_t;
};

/// Samples each profile at the locations of its component. Missing
/// profiles leave the component at zero. No projection is applied.
ComplexState sample(const Grid& grid, const StateProfile& profile);

/// Discrete mean of a component array: midpoint rule for cell-centred
/// arrays (length n), trapezoidal rule for full nodal arrays (length n+1).
template <typename Derived>
typename Derived::Scalar discrete_mean(const Eigen::MatrixBase<Derived>& v, const Grid& grid) {
  const int n = grid.n_cells();
  if (v.size() == n) return v.sum() / static_cast<double>(n);
  if (v.size() == n + 1) return (v.sum() - 0.5 * (v(0) + v(n))) / static_cast<double>(n);
  throw GridMismatch("discrete_mean: array length matches neither cells nor nodes");
}

/// Subtracts the discrete mean. Accepts cell-centred (length n) or full
/// nodal (length n + 1) arrays; idempotent.
Eigen::VectorXd project_zero_mean(const Eigen::VectorXd& v, const Grid& grid);
Eigen::VectorXcd project_zero_mean(const Eigen::VectorXcd& v, const Grid& grid);

/// Imposes the four zero-mean constraints on psi, psi_t, w, w_t.
template <typename Scalar>
BasicState<Scalar> project_constraints(BasicState<Scalar> s);

/// Largest |mean| over psi, psi_t, w, w_t.
template <typename Scalar>
double constraint_defect(const BasicState<Scalar>& s);

/// h * sum |v_j|^2 over the stored samples (discrete L2 norm squared).
template <typename Derived>
double l2_norm_squared(const Eigen::MatrixBase<Derived>& v, const Grid& grid) {
  return grid.h() * v.squaredNorm();
}

/// Difference operators of the staggered grid (entries +-1/h).
/// Interior nodal phi -> cell values phi_x (Dirichlet endpoints eliminated).
SparseMatrix node_to_cell_difference(const Grid& grid);
/// Cell values -> interior nodal derivative (mirror ghost makes the
/// endpoint derivatives vanish, so they are not stored).
SparseMatrix cell_to_node_difference(const Grid& grid);

/// Strain measures of the displacement block.
template <typename Scalar>
struct Strains {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> shear;    // phi_x + psi + l w   (cells)
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bending;  // psi_x               (interior nodes)
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> axial;    // w_x - l phi         (interior nodes)
};

/// Discrete energy inner product on the staggered state space:
///   ||Phi||^2 = k||phi_x + psi + l w||^2 + b||psi_x||^2 + k0||w_x - l phi||^2
///             + rho1||phi_t||^2 + rho2||psi_t||^2 + rho1||w_t||^2,
/// every L2 norm being h times the sum of squares at the natural location.
/// The potential part equals q^T K q with K = B^T W B, B the strain map.
class EnergyProduct {
 public:
  EnergyProduct(const PhysicalParams& params, const Grid& grid);

  [[nodiscard]] const PhysicalParams& params() const { return params_; }
  [[nodiscard]] const Grid& grid() const { return grid_; }

  /// Strain map B: displacements (3n-1) -> strains (3n-2).
  [[nodiscard]] const SparseMatrix& strain_operator() const { return strain_; }
  /// Stiffness K = B^T W B (symmetric positive semidefinite; definite on
  /// zero-mean displacements when l != m pi at grid scale).
  [[nodiscard]] const SparseMatrix& stiffness() const { return stiffness_; }
  /// Diagonal kinetic weights h (rho1 | rho2 | rho1) on the velocity block.
  [[nodiscard]] const Eigen::VectorXd& mass() const { return mass_; }
  /// Block diagonal Gram matrix diag(K, M) on full state vectors.
  [[nodiscard]] SparseMatrix gram() const;

  template <typename Scalar>
  Strains<Scalar> strains(const BasicState<Scalar>& s) const;

  /// <a, b> = sum over weights of a * conj(b); linear in the first slot.
  template <typename Scalar>
  Scalar inner(const BasicState<Scalar>& a, const BasicState<Scalar>& b) const;

  template <typename Scalar>
  double norm_squared(const BasicState<Scalar>& s) const;

  template <typename Scalar>
  double norm(const BasicState<Scalar>& s) const {
    return std::sqrt(norm_squared(s));
  }

  void check_grid(const Grid& g) const {
    if (!(g == grid_)) throw GridMismatch("state grid does not match energy product grid");
  }

 private:
  PhysicalParams params_;
  Grid grid_;
  SparseMatrix strain_;
  Eigen::VectorXd strain_weights_;
  SparseMatrix stiffness_;
  Eigen::VectorXd mass_;
};

template <typename Scalar>
double energy_norm(const BasicState<Scalar>& state, const EnergyProduct& ep) {
  ep.check_grid(state.grid());
  return ep.norm(state);
}

// CSV serialization. Columns: x, phi, phi_t, psi, psi_t, w, w_t for real
// states; re_*/im_* pairs for complex ones. One row per node and per cell
// centre in increasing x; a component not defined at a row's location is
// left empty. Dirichlet endpoint rows carry explicit zeros for phi, phi_t.
void write_state_csv(std::ostream& os, const State& s);
void write_state_csv(std::ostream& os, const ComplexState& s);
/// Reads either layout; a real file yields zero imaginary parts.
ComplexState read_state_csv(std::istream& is);

}  // namespace bresse
