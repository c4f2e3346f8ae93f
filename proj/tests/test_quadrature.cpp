#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sofp/errors.hpp"
#include "sofp/moments.hpp"
#include "sofp/quadrature.hpp"
#include "sofp/transforms.hpp"

using namespace sofp;
namespace qd = sofp::quadrature;
using qd::AnalyticFunction;
using qd::Contour;

namespace {

Complex g2_closed(Complex z, Complex w) { return transforms::g2_gue_free(z, w); }

// Default contour pair for GUE integrals: distinct radii so the diagonal
// guard of the closed forms never fires.
Contour cz_default() { return Contour::circle(0.0, 3.0, 256, 2.0); }
Contour cw_default() { return Contour::circle(0.0, 3.5, 256, 2.0); }

}  // namespace

TEST_CASE("contour construction and validation") {
  CHECK_THROWS_AS(Contour::circle(0.0, 3.0, 14, 2.0), ConfigError);
  CHECK_THROWS_AS(Contour::circle(0.0, 3.0, 33, 2.0), ConfigError);
  CHECK_THROWS_AS(Contour::circle(0.0, 2.0, 64, 3.0), ConfigError);  // not enclosing
  CHECK_THROWS_AS(Contour::circle(4.0, 2.0, 64, 1.0), ConfigError);  // off-center miss
  CHECK_THROWS_AS(Contour::ellipse(0.0, 2.5, 0.5, 64, 3.0), ConfigError);

  const Contour c = Contour::circle(0.0, 3.0, 64, 2.0);
  CHECK(c.nodes() == 64);
  CHECK(c.contains(Complex(1.0, 0.5)));
  CHECK(!c.contains(Complex(3.5, 0.0)));

  const Contour e = Contour::ellipse(0.0, 3.0, 1.0, 64, 2.5);
  CHECK(e.contains(Complex(2.5, 0.0)));

  // Positive orientation: winding integral of 1/(z - 0) equals 2 pi i.
  Complex winding{0.0, 0.0};
  for (int k = 0; k < c.nodes(); ++k)
    winding += c.derivatives()[k] / c.points()[k];
  winding *= 2.0 * M_PI / c.nodes();
  CHECK(std::abs(winding - Complex(0.0, 2.0 * M_PI)) < 1e-12);
}

TEST_CASE("contour min distance") {
  const Contour a = Contour::circle(0.0, 3.0, 64, 2.0);
  const Contour b = Contour::circle(0.0, 3.5, 64, 2.0);
  CHECK(Contour::min_distance(a, b) == doctest::Approx(0.5));
  const Contour e = Contour::ellipse(0.0, 4.0, 2.0, 64, 2.0);
  CHECK(Contour::min_distance(a, e) == doctest::Approx(2.0 - 3.0 + 1.0).epsilon(0.02));
}

TEST_CASE("rho via contour reproduces the exact second-order moments") {
  const auto f1 = AnalyticFunction::monomial(1);
  const auto f2 = AnalyticFunction::monomial(2);
  const Complex r11 = qd::rho_via_contour(f1, f1, g2_closed, cz_default(), cw_default());
  CHECK(std::abs(r11 - Complex(1.0, 0.0)) < 1e-8);  // alpha_{1,1} = 1
  const Complex r22 = qd::rho_via_contour(f2, f2, g2_closed, cz_default(), cw_default());
  CHECK(std::abs(r22 - Complex(2.0, 0.0)) < 1e-8);  // alpha_{2,2} = 2

  const auto one = AnalyticFunction::monomial(0);
  CHECK(std::abs(qd::rho_via_contour(one, f2, g2_closed, cz_default(), cw_default())) <
        1e-10);
  CHECK(std::abs(qd::rho_via_contour(f2, one, g2_closed, cz_default(), cw_default())) <
        1e-10);

  CHECK_THROWS_AS(
      qd::rho_via_contour(f1, f1, g2_closed, cz_default(), cz_default()),
      ConfigError);  // identical contours intersect

  // Declared analyticity domain smaller than the contour is rejected.
  qd::AnalyticFunction narrow = f1;
  narrow.domain_radius = 2.5;
  narrow.name = "narrow";
  CHECK_THROWS_AS(
      qd::rho_via_contour(narrow, f1, g2_closed, cz_default(), cw_default()),
      ConfigError);
}

TEST_CASE("polynomial reference oracle") {
  const auto table = moments::MomentTable::gue(10);
  const std::vector<double> x = {0.0, 1.0};
  const std::vector<double> x2 = {0.0, 0.0, 1.0};
  const std::vector<double> x2px = {0.0, 1.0, 1.0};
  CHECK(qd::rho_polynomial_reference(x, x, table) == 1.0);
  CHECK(qd::rho_polynomial_reference(x, x2, table) == 0.0);
  CHECK(qd::rho_polynomial_reference(x2px, x2px, table) == 3.0);
  const std::vector<double> big(12, 1.0);
  CHECK_THROWS_AS(qd::rho_polynomial_reference(big, big, table), CapacityError);
}

TEST_CASE("contour values match the bilinear oracle for all monomials up to 5") {
  const auto table = moments::MomentTable::gue(10);
  const Contour cz = cz_default();
  const Contour cw = cw_default();
  for (int m = 1; m <= 5; ++m) {
    for (int n = 1; n <= 5; ++n) {
      std::vector<double> p(m + 1, 0.0), q(n + 1, 0.0);
      p[m] = 1.0;
      q[n] = 1.0;
      const double oracle = qd::rho_polynomial_reference(p, q, table);
      const Complex via = qd::rho_via_contour(AnalyticFunction::monomial(m),
                                              AnalyticFunction::monomial(n), g2_closed,
                                              cz, cw);
      INFO("m=", m, " n=", n, " oracle=", oracle, " contour=", via.real());
      CHECK(std::abs(via - Complex(oracle, 0.0)) < 1e-7);
    }
  }
}

TEST_CASE("Cauchy derivative") {
  const Contour c = Contour::circle(0.0, 2.0, 128, 1.0);
  const auto exp_f = AnalyticFunction::entire(
      [](Complex z) { return std::exp(z); }, "exp");
  CHECK(std::abs(qd::cauchy_derivative(exp_f, 0.0, c) - Complex(1.0, 0.0)) < 1e-10);

  const auto cube = AnalyticFunction::monomial(3);
  const Contour c2 = Contour::circle(0.0, 2.5, 128, 1.5);
  CHECK(std::abs(qd::cauchy_derivative(cube, 1.0, c2) - Complex(3.0, 0.0)) < 1e-10);

  const auto one = AnalyticFunction::monomial(0);
  CHECK(std::abs(qd::cauchy_derivative(one, 0.5, c)) < 1e-12);

  CHECK_THROWS_AS(qd::cauchy_derivative(exp_f, 2.5, c), DomainError);
}

TEST_CASE("analytic-function sanity: Cauchy integral reproduces interior values") {
  const Contour c = Contour::circle(0.0, 2.0, 128, 1.0);
  const auto exp_f = AnalyticFunction::entire(
      [](Complex z) { return std::exp(z); }, "exp");
  for (double x : {-0.8, 0.0, 0.6}) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < c.nodes(); ++k)
      acc += exp_f.eval(c.points()[k]) * c.derivatives()[k] / (c.points()[k] - x);
    acc /= Complex(0.0, static_cast<double>(c.nodes()));
    CHECK(std::abs(acc - std::exp(Complex(x, 0.0))) < 1e-12);
  }
}

TEST_CASE("convergence sweep: spectral decay then plateau") {
  const auto f1 = AnalyticFunction::monomial(1);
  auto eval = [&](int nodes) {
    return qd::rho_via_contour(f1, f1, g2_closed,
                               cz_default().with_nodes(nodes),
                               cw_default().with_nodes(nodes));
  };
  const auto rows = qd::convergence_sweep(eval, {32, 64, 128, 256});
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].successive_diff < rows[1].successive_diff);
  CHECK(rows[3].successive_diff < rows[2].successive_diff);
  CHECK(rows[3].successive_diff < 1e-8);

  // Beyond convergence, doubling nodes moves the value below 1e-12.
  CHECK(std::abs(eval(512) - eval(256)) < 1e-12);

  const auto one = AnalyticFunction::monomial(0);
  auto eval_const = [&](int nodes) {
    return qd::rho_via_contour(one, one, g2_closed, cz_default().with_nodes(nodes),
                               cw_default().with_nodes(nodes));
  };
  for (const auto& row : qd::convergence_sweep(eval_const, {32, 64, 128}))
    CHECK(std::abs(row.value) < 1e-12);

  CHECK_THROWS_AS(qd::convergence_sweep(eval, {64, 32}), InvalidInputError);
}

TEST_CASE("contour-radius invariance (Cauchy's theorem)") {
  const auto f2 = AnalyticFunction::monomial(2);
  std::vector<Complex> values;
  for (double rz : {2.5, 3.0, 4.0}) {
    values.push_back(qd::rho_via_contour(
        f2, f2, g2_closed, Contour::circle(0.0, rz, 256, 2.0),
        Contour::circle(0.0, rz + 0.5, 256, 2.0)));
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      CHECK(std::abs(values[i] - values[j]) < 1e-8);
}

TEST_CASE("realness and symmetry of rho on real polynomials") {
  const auto f = AnalyticFunction::polynomial({0.0, 1.0, 0.5}, "x + x^2/2");
  const auto g = AnalyticFunction::polynomial({0.0, -1.0, 0.0, 2.0}, "2x^3 - x");
  const Complex fg = qd::rho_via_contour(f, g, g2_closed, cz_default(), cw_default());
  const Complex gf = qd::rho_via_contour(g, f, g2_closed, cz_default(), cw_default());
  CHECK(std::abs(fg.imag()) < 1e-9);
  CHECK(std::abs(fg - gf) < 1e-9);
}

TEST_CASE("covariance bound |rho(f,g)| <= K ||f'||_M ||g'||_M with K = 1, M = 3") {
  struct Case {
    AnalyticFunction f;
    std::function<double(double)> deriv_abs;
  };
  const std::vector<Case> cases = {
      {AnalyticFunction::monomial(1), [](double) { return 1.0; }},
      {AnalyticFunction::monomial(2), [](double x) { return std::abs(2.0 * x); }},
      {AnalyticFunction::entire([](Complex z) { return std::sin(z); }, "sin"),
       [](double x) { return std::abs(std::cos(x)); }},
      {AnalyticFunction::polynomial({0.0, 1.0, 0.0, 0.25}, "x + x^3/4"),
       [](double x) { return std::abs(1.0 + 0.75 * x * x); }},
  };
  auto sup_on_grid = [](const std::function<double(double)>& h) {
    double best = 0.0;
    for (int i = 0; i <= 10000; ++i)
      best = std::max(best, h(-3.0 + 6.0 * i / 10000.0));
    return best;
  };
  for (const auto& a : cases) {
    for (const auto& b : cases) {
      const Complex rho =
          qd::rho_via_contour(a.f, b.f, g2_closed, cz_default(), cw_default());
      CHECK(std::abs(rho) <= sup_on_grid(a.deriv_abs) * sup_on_grid(b.deriv_abs) + 1e-6);
    }
  }
}
