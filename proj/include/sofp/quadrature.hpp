#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sofp/moments.hpp"

namespace sofp::quadrature {

using Complex = std::complex<double>;

/// Positively oriented closed curve (circle or axis-aligned ellipse with real
/// center) with cached quadrature nodes and parametrization derivatives at
/// equispaced parameters. Construction verifies that the curve strictly
/// encloses the declared segment [-enclosed, enclosed].
class Contour {
 public:
  static Contour circle(double center, double radius, int nodes, double enclosed);
  static Contour ellipse(double center, double semi_x, double semi_y, int nodes,
                         double enclosed);

  [[nodiscard]] int nodes() const { return static_cast<int>(points_.size()); }
  [[nodiscard]] std::span<const Complex> points() const { return points_; }
  [[nodiscard]] std::span<const Complex> derivatives() const { return derivs_; }
  [[nodiscard]] double enclosed() const { return enclosed_; }
  [[nodiscard]] bool contains(Complex p) const;

  /// Exact for circle pairs; dense parameter scan otherwise.
  static double min_distance(const Contour& a, const Contour& b);

  /// Same contour shape re-sampled with a different node count.
  [[nodiscard]] Contour with_nodes(int nodes) const;

 private:
  Contour() = default;
  void build(int nodes);
  void validate_enclosure() const;

  bool is_circle_ = true;
  double center_ = 0.0;
  double semi_x_ = 0.0;  // radius for circles
  double semi_y_ = 0.0;
  double enclosed_ = 0.0;
  std::vector<Complex> points_;
  std::vector<Complex> derivs_;
};

/// Function analytic on a declared neighborhood of [-M, M]. domain_radius is
/// the semi-axis (disc radius or Bernstein-ellipse parameter) inside which the
/// evaluator may be called; contour nodes must respect it.
struct AnalyticFunction {
  std::function<Complex(Complex)> eval;
  double domain_radius = 0.0;
  std::string name;

  static AnalyticFunction monomial(int degree);
  static AnalyticFunction polynomial(std::vector<double> coeffs, std::string name = "");
  static AnalyticFunction entire(std::function<Complex(Complex)> f, std::string name);
};

/// rho(f, g) = (2 pi i)^{-2} \oint \oint f(z) g(w) g2(z, w) dz dw by the
/// tensor-product trapezoidal rule, spectrally accurate for these periodic
/// analytic integrands. The two contours must be disjoint point sets (distinct
/// radii) so the diagonal guard of the closed-form g2 never fires.
Complex rho_via_contour(const AnalyticFunction& f, const AnalyticFunction& g,
                        const std::function<Complex(Complex, Complex)>& g2,
                        const Contour& cz, const Contour& cw);

/// Exact bilinear extension sum_{j,k} p_j q_k alpha_{j,k}; the oracle the
/// contour route is tested against. Coefficient lists are in the monomial
/// basis, p(x) = sum_j p[j] x^j.
double rho_polynomial_reference(std::span<const double> p, std::span<const double> q,
                                const moments::MomentTable& table);

/// f'(x) = (2 pi i)^{-1} \oint f(z) (z - x)^{-2} dz for x strictly inside c.
Complex cauchy_derivative(const AnalyticFunction& f, double x, const Contour& c);

struct SweepRow {
  int nodes;
  Complex value;
  double successive_diff;  // |value - previous value|; 0 for the first row
};

/// Re-evaluates a contour functional at each node count and reports the decay
/// of successive differences (geometric for analytic integrands).
std::vector<SweepRow> convergence_sweep(const std::function<Complex(int)>& evaluate,
                                        const std::vector<int>& node_counts);

}  // namespace sofp::quadrature
