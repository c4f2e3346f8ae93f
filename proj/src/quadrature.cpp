#include "sofp/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "sofp/errors.hpp"
#include "sofp/transforms.hpp"

namespace sofp::quadrature {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void Contour::build(int nodes) {
  if (nodes < 16 || nodes % 2 != 0)
    throw ConfigError("Contour: node count must be even and >= 16");
  points_.resize(nodes);
  derivs_.resize(nodes);
  for (int k = 0; k < nodes; ++k) {
    const double t = kTwoPi * k / nodes;
    const double c = std::cos(t), s = std::sin(t);
    points_[k] = Complex(center_ + semi_x_ * c, semi_y_ * s);
    derivs_[k] = Complex(-semi_x_ * s, semi_y_ * c);
  }
}

void Contour::validate_enclosure() const {
  // Containment of the segment endpoints, then a positive clearance between
  // the curve and the segment.
  if (!contains(Complex(enclosed_, 0.0)) || !contains(Complex(-enclosed_, 0.0)))
    throw ConfigError("Contour: declared segment [-" + std::to_string(enclosed_) + ", " +
                      std::to_string(enclosed_) + "] is not enclosed");
  const int fine = 4096;
  double min_dist = 1e300;
  for (int k = 0; k < fine; ++k) {
    const double t = kTwoPi * k / fine;
    const Complex p(center_ + semi_x_ * std::cos(t), semi_y_ * std::sin(t));
    min_dist = std::min(min_dist, transforms::distance_to_segment(p, enclosed_));
  }
  if (!(min_dist > 0.0))
    throw ConfigError("Contour: curve touches the enclosed segment");
}

Contour Contour::circle(double center, double radius, int nodes, double enclosed) {
  if (!(radius > 0.0)) throw ConfigError("Contour: radius must be positive");
  if (!(enclosed >= 0.0)) throw ConfigError("Contour: enclosed must be >= 0");
  Contour c;
  c.is_circle_ = true;
  c.center_ = center;
  c.semi_x_ = radius;
  c.semi_y_ = radius;
  c.enclosed_ = enclosed;
  c.build(nodes);
  c.validate_enclosure();
  return c;
}

Contour Contour::ellipse(double center, double semi_x, double semi_y, int nodes,
                         double enclosed) {
  if (!(semi_x > 0.0) || !(semi_y > 0.0))
    throw ConfigError("Contour: semi-axes must be positive");
  Contour c;
  c.is_circle_ = (semi_x == semi_y);
  c.center_ = center;
  c.semi_x_ = semi_x;
  c.semi_y_ = semi_y;
  c.enclosed_ = enclosed;
  c.build(nodes);
  c.validate_enclosure();
  return c;
}

bool Contour::contains(Complex p) const {
  const double u = (p.real() - center_) / semi_x_;
  const double v = p.imag() / semi_y_;
  return u * u + v * v < 1.0;
}

double Contour::min_distance(const Contour& a, const Contour& b) {
  if (a.is_circle_ && b.is_circle_) {
    const double d = std::abs(a.center_ - b.center_);
    const double r_small = std::min(a.semi_x_, b.semi_x_);
    const double r_big = std::max(a.semi_x_, b.semi_x_);
    if (d + r_small < r_big) return r_big - d - r_small;  // nested
    if (d > a.semi_x_ + b.semi_x_) return d - a.semi_x_ - b.semi_x_;  // disjoint
    return 0.0;  // curves cross or touch
  }
  const int fine = 720;
  double best = 1e300;
  for (int i = 0; i < fine; ++i) {
    const double t = kTwoPi * i / fine;
    const Complex p(a.center_ + a.semi_x_ * std::cos(t), a.semi_y_ * std::sin(t));
    for (int j = 0; j < fine; ++j) {
      const double s = kTwoPi * j / fine;
      const Complex q(b.center_ + b.semi_x_ * std::cos(s), b.semi_y_ * std::sin(s));
      best = std::min(best, std::abs(p - q));
    }
  }
  return best;
}

Contour Contour::with_nodes(int nodes) const {
  Contour c = *this;
  c.build(nodes);
  return c;
}

AnalyticFunction AnalyticFunction::monomial(int degree) {
  if (degree < 0) throw InvalidInputError("monomial: degree must be >= 0");
  return {[degree](Complex z) { return std::pow(z, degree); }, 1e300,
          "x^" + std::to_string(degree)};
}

AnalyticFunction AnalyticFunction::polynomial(std::vector<double> coeffs,
                                              std::string name) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  auto eval = [coeffs](Complex z) {
    Complex acc{0.0, 0.0};
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * z + coeffs[j];
    return acc;
  };
  return {eval, 1e300, name.empty() ? "poly" : std::move(name)};
}

AnalyticFunction AnalyticFunction::entire(std::function<Complex(Complex)> f,
                                          std::string name) {
  return {std::move(f), 1e300, std::move(name)};
}

namespace {

void require_within_domain(const AnalyticFunction& f, const Contour& c,
                           const char* who) {
  for (const Complex& z : c.points())
    if (std::abs(z) > f.domain_radius)
      throw ConfigError(std::string(who) + ": contour node leaves the declared "
                        "analyticity domain of " + f.name);
}

}  // namespace

Complex rho_via_contour(const AnalyticFunction& f, const AnalyticFunction& g,
                        const std::function<Complex(Complex, Complex)>& g2,
                        const Contour& cz, const Contour& cw) {
  if (!(Contour::min_distance(cz, cw) > 0.0))
    throw ConfigError("rho_via_contour: z- and w-contours intersect; "
                      "use distinct radii");
  require_within_domain(f, cz, "rho_via_contour");
  require_within_domain(g, cw, "rho_via_contour");
  const auto zs = cz.points();
  const auto zds = cz.derivatives();
  const auto ws = cw.points();
  const auto wds = cw.derivatives();

  // Cache g(w) w'(t); the inner g2 loop dominates.
  std::vector<Complex> gw(ws.size());
  for (std::size_t k = 0; k < ws.size(); ++k) gw[k] = g.eval(ws[k]) * wds[k];

  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < zs.size(); ++j) {
    const Complex fz = f.eval(zs[j]) * zds[j];
    Complex inner{0.0, 0.0};
    for (std::size_t k = 0; k < ws.size(); ++k) {
      try {
        inner += gw[k] * g2(zs[j], ws[k]);
      } catch (const Error& e) {
        throw DomainError(std::string("rho_via_contour: g2 failed at node (z, w) = (" +
                                      std::to_string(zs[j].real()) + "+" +
                                      std::to_string(zs[j].imag()) + "i, " +
                                      std::to_string(ws[k].real()) + "+" +
                                      std::to_string(ws[k].imag()) + "i): ") +
                          e.what());
      }
    }
    acc += fz * inner;
  }
  // Trapezoid weights (2 pi / n) on each contour and the (2 pi i)^{-2} factor
  // combine to -1 / (n_z n_w).
  return -acc / (static_cast<double>(zs.size()) * static_cast<double>(ws.size()));
}

double rho_polynomial_reference(std::span<const double> p, std::span<const double> q,
                                const moments::MomentTable& table) {
  const int dp = static_cast<int>(p.size()) - 1;
  const int dq = static_cast<int>(q.size()) - 1;
  if (dp + dq > table.max_total_degree)
    throw CapacityError("rho_polynomial_reference: degrees beyond table");
  double acc = 0.0;
  for (int j = 1; j <= dp; ++j) {
    if (p[j] == 0.0) continue;
    for (int k = 1; k <= dq; ++k) {
      if (q[k] == 0.0) continue;
      acc += p[j] * q[k] * table.alpha(j, k);
    }
  }
  return acc;
}

Complex cauchy_derivative(const AnalyticFunction& f, double x, const Contour& c) {
  if (!c.contains(Complex(x, 0.0)))
    throw DomainError("cauchy_derivative: x must lie strictly inside the contour");
  require_within_domain(f, c, "cauchy_derivative");
  const auto zs = c.points();
  const auto zds = c.derivatives();
  Complex acc{0.0, 0.0};
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const Complex d = zs[k] - x;
    acc += f.eval(zs[k]) * zds[k] / (d * d);
  }
  // (2 pi i)^{-1} (2 pi / n) = 1 / (i n)
  return acc / Complex(0.0, static_cast<double>(zs.size()));
}

std::vector<SweepRow> convergence_sweep(const std::function<Complex(int)>& evaluate,
                                        const std::vector<int>& node_counts) {
  if (!std::is_sorted(node_counts.begin(), node_counts.end()))
    throw InvalidInputError("convergence_sweep: node counts must ascend");
  std::vector<SweepRow> rows;
  rows.reserve(node_counts.size());
  for (int n : node_counts) {
    const Complex v = evaluate(n);
    const double diff = rows.empty() ? 0.0 : std::abs(v - rows.back().value);
    rows.push_back({n, v, diff});
  }
  return rows;
}

}  // namespace sofp::quadrature
