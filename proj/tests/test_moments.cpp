#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "sofp/ensembles.hpp"
#include "sofp/errors.hpp"
#include "sofp/moments.hpp"
#include "sofp/parallel.hpp"
#include "sofp/sample_stats.hpp"

using namespace sofp;
using moments::InverseNPoly;
using moments::PairPartition;

namespace {

// Independent oracle for semicircle moments: Simpson quadrature of
// x^n sqrt(4 - x^2) / (2 pi) over [-2, 2], after x = 2 sin(theta) which
// removes the endpoint square-root singularity.
double semicircle_moment_quadrature(int n) {
  const int cells = 4000;
  const double h = M_PI / cells;  // theta in [-pi/2, pi/2]
  auto f = [n](double theta) {
    const double c = std::cos(theta);
    return std::pow(2.0 * std::sin(theta), n) * 4.0 * c * c / (2.0 * M_PI);
  };
  double acc = f(-M_PI / 2) + f(M_PI / 2);
  for (int i = 1; i < cells; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(-M_PI / 2 + i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("semicircle moments match the quadrature oracle and Catalan values") {
  CHECK(moments::semicircle_moment(0) == 1.0);
  CHECK(moments::semicircle_moment(3) == 0.0);
  CHECK(moments::semicircle_moment(2) == 2.0 - 1.0);  // C_1 = 1
  CHECK(moments::semicircle_moment(4) == 2.0);
  CHECK(moments::semicircle_moment(6) == 5.0);
  for (int n = 0; n <= 10; ++n) {
    CHECK(moments::semicircle_moment(n) ==
          doctest::Approx(semicircle_moment_quadrature(n)).epsilon(1e-7));
  }
}

TEST_CASE("pairing enumeration yields each partition exactly once") {
  for (int total : {2, 4, 8}) {
    std::set<std::vector<int>> seen;
    long long count = 0;
    moments::enumerate_pairings(total, [&](const PairPartition& p) {
      ++count;
      CHECK(seen.insert(p.partner).second);
      for (int i = 0; i < total; ++i) {
        CHECK(p.partner[i] != i);
        CHECK(p.partner[p.partner[i]] == i);
      }
    });
    CHECK(count == moments::pairing_count(total));
  }
  CHECK(moments::pairing_count(2) == 1);
  CHECK(moments::pairing_count(4) == 3);
  CHECK(moments::pairing_count(8) == 105);
  CHECK_THROWS_AS(moments::enumerate_pairings(18, [](const PairPartition&) {}),
                  CapacityError);
}

TEST_CASE("exact GUE trace covariances: hand-computed cases") {
  const InverseNPoly c11 = moments::gue_trace_covariance_exact(1, 1);
  REQUIRE(c11.coeffs.size() == 1);
  CHECK(c11.coeffs[0] == 1);  // Cov(Tr X, Tr X) = 1 at every N

  const InverseNPoly c22 = moments::gue_trace_covariance_exact(2, 2);
  REQUIRE(c22.coeffs.size() == 1);
  CHECK(c22.coeffs[0] == 2);  // Cov(Tr X^2, Tr X^2) = 2 at every N

  CHECK(moments::gue_trace_covariance_exact(1, 2).is_zero());
  CHECK(moments::second_order_moment(1, 1) == 1.0);
  CHECK(moments::second_order_moment(2, 2) == 2.0);
  CHECK(moments::second_order_moment(2, 3) == 0.0);
  CHECK_THROWS_AS(moments::gue_trace_covariance_exact(9, 9), CapacityError);
}

TEST_CASE("exact first-order moments: (1/N) E Tr X^n") {
  const InverseNPoly m2 = moments::gue_moment_exact(2);
  REQUIRE(m2.coeffs.size() == 1);
  CHECK(m2.coeffs[0] == 1);

  // Genus expansion of the quartic moment: 2 + 1/N^2.
  const InverseNPoly m4 = moments::gue_moment_exact(4);
  REQUIRE(m4.coeffs.size() == 3);
  CHECK(m4.coeffs[0] == 2);
  CHECK(m4.coeffs[1] == 0);
  CHECK(m4.coeffs[2] == 1);

  CHECK(moments::gue_moment_exact(3).is_zero());
  for (int n = 0; n <= 12; n += 2)
    CHECK(static_cast<double>(moments::gue_moment_exact(n).constant_term()) ==
          moments::semicircle_moment(n));
}

TEST_CASE("genus structure: only even nonpositive Euler exponents appear") {
  for (int m = 1; m <= 11; ++m) {
    for (int n = 1; m + n <= 12; ++n) {
      const InverseNPoly poly = moments::gue_trace_covariance_exact(m, n);
      for (std::size_t k = 1; k < poly.coeffs.size(); k += 2) CHECK(poly.coeffs[k] == 0);
      // Symmetry alpha_{m,n} = alpha_{n,m} at every order in 1/N.
      const InverseNPoly swapped = moments::gue_trace_covariance_exact(n, m);
      CHECK(poly.coeffs == swapped.coeffs);
    }
  }
}

TEST_CASE("alpha bound |alpha_{m,n}| <= m n 3^{m+n-2}") {
  for (int m = 1; m <= 11; ++m)
    for (int n = 1; m + n <= 12; ++n)
      CHECK(std::abs(moments::second_order_moment(m, n)) <=
            m * n * std::pow(3.0, m + n - 2) + 1e-9);
}

TEST_CASE("block-weighted covariance reproduces the diag(1,-1) prediction") {
  // blocks = [diag(1, -1)]: weight of every connecting pairing of (2,2) is
  // Tr(A^2) Tr(A^2) = 4, giving Cov(Tr X^2, Tr X^2) = 8 at every inner N.
  std::vector<std::vector<std::vector<Complex>>> blocks = {
      {{Complex(1, 0), Complex(0, 0)}, {Complex(0, 0), Complex(-1, 0)}}};
  moments::BlockWeight weight(blocks, 2, 2);
  const auto cov = moments::trace_covariance_weighted(2, 2, weight);
  REQUIRE(!cov.coeffs.empty());
  CHECK(cov.coeffs[0].real() == doctest::Approx(8.0));
  CHECK(cov.coeffs[0].imag() == doctest::Approx(0.0));
  CHECK(cov.eval(64).real() == doctest::Approx(8.0));
}

TEST_CASE("moment table lookup and JSON export") {
  const auto table = moments::MomentTable::gue(8);
  CHECK(table.alpha(1, 1) == 1.0);
  CHECK(table.alpha(2, 2) == 2.0);
  CHECK(table.alpha(3, 4) == 0.0);
  CHECK_THROWS_AS(static_cast<void>(table.alpha(7, 6)), CapacityError);
  const std::string json = table.to_json();
  CHECK(json.find("\"1,1\":\"1\"") != std::string::npos);
  CHECK(json.find("\"max_total_degree\":8") != std::string::npos);
}

TEST_CASE("g2 series: empty sum, symmetry, domain") {
  const auto table = moments::MomentTable::gue(10);
  const Complex z(4.0, 0.0), w(0.0, 4.0);

  const auto empty = moments::g2_series(z, w, 0, table);
  CHECK(empty.value == Complex(0.0, 0.0));
  CHECK(empty.tail_bound > 0.0);

  const auto a = moments::g2_series(z, w, 10, table);
  const auto b = moments::g2_series(w, z, 10, table);
  CHECK(a.value == b.value);  // exact, from symmetric term grouping
  CHECK(a.tail_bound < empty.tail_bound);

  CHECK_THROWS_AS(moments::g2_series(Complex(2.5, 0), w, 4, table), DomainError);
  CHECK_THROWS_AS(moments::g2_series(z, w, 12, table), CapacityError);
}

TEST_CASE("exact covariance polynomials match Monte Carlo at N = 8 and N = 32") {
  const int replicas = 200000;
  for (int n_dim : {8, 32}) {
    // Power sums Tr X^m, m = 1..4, per draw.
    std::vector<std::array<Complex, 4>> traces(replicas);
    const RngStream root{20260811u, static_cast<std::uint64_t>(n_dim)};
    parallel_for(replicas, 0, [&](int r) {
      const Spectrum s = eigenvalues(sample_gue(n_dim, root.substream(r)));
      std::array<double, 4> acc{0, 0, 0, 0};
      for (double lam : s.values) {
        double p = 1.0;
        for (int m = 0; m < 4; ++m) {
          p *= lam;
          acc[m] += p;
        }
      }
      for (int m = 0; m < 4; ++m) traces[r][m] = acc[m];
    });
    std::array<std::vector<Complex>, 4> cols;
    for (int m = 0; m < 4; ++m) {
      cols[m].resize(replicas);
      for (int r = 0; r < replicas; ++r) cols[m][r] = traces[r][m];
    }
    for (int m = 1; m <= 4; ++m) {
      for (int n = m; n <= 4; ++n) {
        const auto est = stats::covariance_with_error(cols[m - 1], cols[n - 1]);
        const double exact = moments::gue_trace_covariance_exact(m, n).eval(n_dim);
        INFO("N=", n_dim, " m=", m, " n=", n, " exact=", exact, " mc=", est.value.real(),
             " se=", est.std_error);
        CHECK(std::abs(est.value.real() - exact) <= 4.0 * est.std_error + 1e-12);
      }
    }
  }
}

TEST_CASE("semicircle moments match Monte Carlo at N = 256") {
  const int n_dim = 256;
  const int replicas = 1500;
  std::vector<std::array<double, 6>> traces(replicas);
  const RngStream root{777u, 0u};
  parallel_for(replicas, 0, [&](int r) {
    const Spectrum s = eigenvalues(sample_gue(n_dim, root.substream(r)));
    std::array<double, 6> acc{};
    for (double lam : s.values) {
      double p = 1.0;
      for (int m = 0; m < 6; ++m) {
        p *= lam;
        acc[m] += p;
      }
    }
    traces[r] = acc;
  });
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> vals(replicas);
    for (int r = 0; r < replicas; ++r) vals[r] = traces[r][n - 1] / n_dim;
    const double mean = stats::mean(vals);
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (replicas - 1.0) / replicas);
    const double tol = std::max(4.0 * se, 5.0 / (n_dim * double(n_dim)));
    INFO("n=", n, " mc=", mean, " se=", se);
    CHECK(std::abs(mean - moments::semicircle_moment(n)) <= tol);
  }
}
