#include "sofp/frechet.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sofp/errors.hpp"

namespace sofp::frechet {

namespace {

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

void FrechetMesh::validate() const {
  if (grid_x.size() < 2 || grid_y.size() < 2)
    throw InvalidInputError("FrechetMesh: grids need at least 2 points");
  for (std::size_t i = 1; i < grid_x.size(); ++i)
    if (!(grid_x[i] > grid_x[i - 1]))
      throw InvalidInputError("FrechetMesh: grid_x must be strictly ascending");
  for (std::size_t j = 1; j < grid_y.size(); ++j)
    if (!(grid_y[j] > grid_y[j - 1]))
      throw InvalidInputError("FrechetMesh: grid_y must be strictly ascending");
  if (grid_x.front() != -grid_x.back() || grid_y.front() != -grid_y.back())
    throw InvalidInputError("FrechetMesh: grids must span [-M, M]");
  if (values.rows() != static_cast<Eigen::Index>(grid_x.size()) ||
      values.cols() != static_cast<Eigen::Index>(grid_y.size()))
    throw InvalidInputError("FrechetMesh: value matrix shape mismatch");
}

FrechetMesh FrechetMesh::from_callable(const std::function<double(double, double)>& u,
                                       double m, int cells_x, int cells_y) {
  if (!(m > 0.0) || cells_x < 1 || cells_y < 1)
    throw InvalidInputError("FrechetMesh: need M > 0 and at least one cell");
  FrechetMesh mesh;
  mesh.grid_x.resize(cells_x + 1);
  mesh.grid_y.resize(cells_y + 1);
  for (int i = 0; i <= cells_x; ++i)
    mesh.grid_x[i] = -m + 2.0 * m * i / cells_x;
  for (int j = 0; j <= cells_y; ++j)
    mesh.grid_y[j] = -m + 2.0 * m * j / cells_y;
  mesh.grid_x.front() = -m;
  mesh.grid_x.back() = m;
  mesh.grid_y.front() = -m;
  mesh.grid_y.back() = m;
  mesh.values.resize(cells_x + 1, cells_y + 1);
  for (int i = 0; i <= cells_x; ++i)
    for (int j = 0; j <= cells_y; ++j)
      mesh.values(i, j) = u(mesh.grid_x[i], mesh.grid_y[j]);
  mesh.validate();
  return mesh;
}

FrechetMesh FrechetMesh::from_csv(std::istream& in) {
  FrechetMesh mesh;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInputError("mesh CSV: missing grid_x row");
  mesh.grid_x = parse_csv_row(line);
  if (!std::getline(in, line)) throw InvalidInputError("mesh CSV: missing grid_y row");
  mesh.grid_y = parse_csv_row(line);
  mesh.values.resize(mesh.grid_x.size(), mesh.grid_y.size());
  for (std::size_t i = 0; i < mesh.grid_x.size(); ++i) {
    if (!std::getline(in, line))
      throw InvalidInputError("mesh CSV: missing value row " + std::to_string(i));
    const std::vector<double> row = parse_csv_row(line);
    if (row.size() != mesh.grid_y.size())
      throw InvalidInputError("mesh CSV: value row " + std::to_string(i) +
                              " has wrong length");
    for (std::size_t j = 0; j < row.size(); ++j) mesh.values(i, j) = row[j];
  }
  mesh.validate();
  return mesh;
}

FrechetMesh FrechetMesh::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("mesh CSV: cannot open " + path);
  return from_csv(in);
}

void FrechetMesh::write_csv(std::ostream& out) const {
  char buf[40];
  auto cell = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf;
  };
  auto row = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out << ",";
      cell(v[i]);
    }
    out << "\n";
  };
  row(grid_x);
  row(grid_y);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out << ",";
      cell(values(i, j));
    }
    out << "\n";
  }
}

Eigen::MatrixXd rectangle_increments(const FrechetMesh& mesh) {
  mesh.validate();
  const Eigen::Index m = mesh.values.rows() - 1;
  const Eigen::Index n = mesh.values.cols() - 1;
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = mesh.values(i + 1, j + 1) - mesh.values(i + 1, j) -
                mesh.values(i, j + 1) + mesh.values(i, j);
  return a;
}

double frechet_variation(const FrechetMesh& mesh, VariationMode mode) {
  const Eigen::MatrixXd a = rectangle_increments(mesh);
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  if (mode == VariationMode::upper_bound) return a.cwiseAbs().sum();

  if (rows > 20)
    throw CapacityError("frechet_variation: exact mode capped at 21 grid_x points");
  // Maximize sum_j |sum_i sigma_i a_ij| over sigma in {+-1}^rows. Gray-code
  // walk updates one row's contribution per step; a global sign flip is
  // absorbed by |.|, so sigma_0 is pinned to +1.
  std::vector<double> col(cols, 0.0);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) col[j] += a(i, j);
  auto total = [&col]() {
    double t = 0.0;
    for (double c : col) t += std::abs(c);
    return t;
  };
  double best = total();
  if (rows == 1) return best;
  std::vector<int> sigma(rows, 1);
  const unsigned long long steps = 1ULL << (rows - 1);
  unsigned long long gray_prev = 0;
  for (unsigned long long k = 1; k < steps; ++k) {
    const unsigned long long gray = k ^ (k >> 1);
    const unsigned long long changed = gray ^ gray_prev;
    gray_prev = gray;
    int bit = 0;
    while (!((changed >> bit) & 1ULL)) ++bit;
    const int row = bit + 1;  // row 0 pinned
    sigma[row] = -sigma[row];
    const double factor = 2.0 * sigma[row];
    for (int j = 0; j < cols; ++j) col[j] += factor * a(row, j);
    best = std::max(best, total());
  }
  return best;
}

Complex frechet_integral(const std::function<Complex(double)>& f,
                         const std::function<Complex(double)>& g,
                         const FrechetMesh& mesh) {
  const Eigen::MatrixXd a = rectangle_increments(mesh);
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  std::vector<Complex> fv(rows), gv(cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    fv[i] = f(0.5 * (mesh.grid_x[i] + mesh.grid_x[i + 1]));
  for (Eigen::Index j = 0; j < cols; ++j)
    gv[j] = g(0.5 * (mesh.grid_y[j] + mesh.grid_y[j + 1]));
  Complex acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < rows; ++i) {
    Complex inner{0.0, 0.0};
    for (Eigen::Index j = 0; j < cols; ++j) inner += gv[j] * a(i, j);
    acc += fv[i] * inner;
  }
  return acc;
}

RefinedIntegral frechet_integral_refined(const std::function<Complex(double)>& f,
                                         const std::function<Complex(double)>& g,
                                         const std::function<double(double, double)>& u,
                                         double m, int cells_x, int cells_y) {
  const FrechetMesh coarse = FrechetMesh::from_callable(u, m, cells_x, cells_y);
  const FrechetMesh fine = FrechetMesh::from_callable(u, m, 2 * cells_x, 2 * cells_y);
  RefinedIntegral out;
  out.coarse = frechet_integral(f, g, coarse);
  out.refined = frechet_integral(f, g, fine);
  out.diff = std::abs(out.refined - out.coarse);
  return out;
}

Complex rho_from_kernel(const statistics::TestFunction& f,
                        const statistics::TestFunction& g, const FrechetMesh& mesh) {
  return frechet_integral(f.deriv, g.deriv, mesh);
}

}  // namespace sofp::frechet
