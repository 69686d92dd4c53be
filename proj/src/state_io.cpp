#include <istream>
#include <ostream>
#include <string>

#include "bresse/csv.hpp"
#include "bresse/spectral_space.hpp"

namespace bresse {

namespace {

constexpr Component kCsvOrder[] = {Component::phi, Component::phi_t, Component::psi,
                                   Component::psi_t, Component::w, Component::w_t};

// Row r = 2j is node j, row r = 2j + 1 is cell j.
template <typename Scalar, typename Emit>
void write_rows(std::ostream& os, const BasicState<Scalar>& s, Emit&& emit) {
  const Grid& g = s.grid();
  const int n = g.n_cells();
  for (int r = 0; r <= 2 * n; ++r) {
    const bool node_row = (r % 2 == 0);
    const int j = r / 2;
    std::vector<std::string> fields{csv::format(node_row ? g.node(j) : g.cell_center(j))};
    for (Component c : kCsvOrder) {
      if (is_nodal(c) != node_row) {
        emit(fields, std::nullopt);
      } else if (node_row) {
        const bool boundary = (j == 0 || j == n);
        emit(fields, boundary ? Scalar(0) : s.component(c)(j - 1));
      } else {
        emit(fields, s.component(c)(j));
      }
    }
    csv::write_row(os, fields);
  }
}

}  // namespace

void write_state_csv(std::ostream& os, const State& s) {
  std::vector<std::string> header{"x"};
  for (Component c : kCsvOrder) header.emplace_back(component_name(c));
  csv::write_row(os, header);
  write_rows(os, s, [](std::vector<std::string>& f, std::optional<double> v) {
    f.push_back(v ? csv::format(*v) : std::string());
  });
}

void write_state_csv(std::ostream& os, const ComplexState& s) {
  std::vector<std::string> header{"x"};
  for (Component c : kCsvOrder) {
    header.push_back(std::string("re_") + component_name(c));
    header.push_back(std::string("im_") + component_name(c));
  }
  csv::write_row(os, header);
  write_rows(os, s, [](std::vector<std::string>& f, std::optional<Complex> v) {
    f.push_back(v ? csv::format(v->real()) : std::string());
    f.push_back(v ? csv::format(v->imag()) : std::string());
  });
}

ComplexState read_state_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("state csv: empty input");
  while (!line.empty() && line[0] == '#') {
    if (!std::getline(is, line)) throw InvalidInput("state csv: missing header");
  }
  const auto header = csv::split_row(line);
  bool complex_layout = false;
  if (header.size() == 13) {
    complex_layout = true;
  } else if (header.size() != 7) {
    throw InvalidInput("state csv: expected 7 or 13 columns");
  }
  if (header[0] != "x") throw InvalidInput("state csv: first column must be x");

  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(csv::split_row(line));
    if (rows.back().size() != header.size()) throw InvalidInput("state csv: ragged row");
  }
  if (rows.size() % 2 == 0) throw InvalidInput("state csv: row count must be 2 n_cells + 1");
  const Grid grid(static_cast<int>(rows.size() / 2));
  ComplexState s(grid);
  const int n = grid.n_cells();
  for (int r = 0; r <= 2 * n; ++r) {
    const bool node_row = (r % 2 == 0);
    const int j = r / 2;
    int col = 1;
    for (Component c : kCsvOrder) {
      const int width = complex_layout ? 2 : 1;
      if (is_nodal(c) == node_row) {
        const double re = csv::parse_double(rows[r][col]);
        const double im = complex_layout ? csv::parse_double(rows[r][col + 1]) : 0.0;
        if (!node_row) {
          s.component(c)(j) = Complex(re, im);
        } else if (j > 0 && j < n) {
          s.component(c)(j - 1) = Complex(re, im);
        }
      }
      col += width;
    }
  }
  return s;
}

}  // namespace bresse
