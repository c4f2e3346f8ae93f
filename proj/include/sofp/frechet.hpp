#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sofp/statistics.hpp"

namespace sofp::frechet {

using Complex = std::complex<double>;

/// Kernel u sampled on a rectangular partition of [-M, M]^2:
/// values(i, j) = u(grid_x[i], grid_y[j]), grids strictly ascending and
/// including both endpoints.
struct FrechetMesh {
  std::vector<double> grid_x;
  std::vector<double> grid_y;
  Eigen::MatrixXd values;

  static FrechetMesh from_callable(const std::function<double(double, double)>& u,
                                   double m, int cells_x, int cells_y);

  /// CSV layout: grid_x row, grid_y row, then one row of u-values per grid_x
  /// entry.
  static FrechetMesh from_csv(std::istream& in);
  static FrechetMesh load_csv(const std::string& path);
  void write_csv(std::ostream& out) const;

  void validate() const;
};

/// Rectangle increments over consecutive cells:
/// a(i, j) = u(s_{i+1}, t_{j+1}) - u(s_{i+1}, t_j) - u(s_i, t_{j+1}) + u(s_i, t_j).
Eigen::MatrixXd rectangle_increments(const FrechetMesh& mesh);

enum class VariationMode { exact, upper_bound };

/// Frechet variation of u on the mesh partition. exact mode maximizes
/// sum_j |sum_i sigma_i a_ij| over sign vectors sigma (the inner theta
/// maximization is the absolute value); upper_bound mode returns the
/// bounded-variation majorant sum |a_ij|. exact mode caps at 21 x-grid points.
double frechet_variation(const FrechetMesh& mesh, VariationMode mode);

/// Frechet integral sum_ij f(xi_i) g(eta_j) a_ij with midpoint tags.
Complex frechet_integral(const std::function<Complex(double)>& f,
                         const std::function<Complex(double)>& g,
                         const FrechetMesh& mesh);

struct RefinedIntegral {
  Complex coarse;
  Complex refined;
  double diff;
};

/// Evaluates the integral on (cells x cells) and on the dyadically refined
/// mesh, reporting the refinement step for convergence monitoring.
RefinedIntegral frechet_integral_refined(const std::function<Complex(double)>& f,
                                         const std::function<Complex(double)>& g,
                                         const std::function<double(double, double)>& u,
                                         double m, int cells_x, int cells_y);

/// rho(f, g) = integral of f'(x) g'(y) du(x, y).
Complex rho_from_kernel(const statistics::TestFunction& f,
                        const statistics::TestFunction& g, const FrechetMesh& mesh);

}  // namespace sofp::frechet
