#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sofp/ensembles.hpp"
#include "sofp/moments.hpp"
#include "sofp/quadrature.hpp"
#include "sofp/transforms.hpp"
#include "sofp/errors.hpp"
#include "sofp/rng.hpp"
#include "sofp/sample_stats.hpp"
#include "sofp/statistics.hpp"

using namespace sofp;
namespace st = sofp::statistics;

TEST_CASE("k-statistics on synthetic i.i.d. Gaussian input") {
  Rng gen(RngStream{1001u, 0u});
  const double sigma = 1.7;
  std::vector<double> x(40000);
  for (double& v : x) v = 3.0 + sigma * gen.normal();

  const double k2 = stats::k_statistic(x, 2);
  const double k3 = stats::k_statistic(x, 3);
  const double k4 = stats::k_statistic(x, 4);
  CHECK(std::abs(k2 - sigma * sigma) <= 4.0 * stats::jackknife_se_kstat(x, 2));
  CHECK(std::abs(k3) <= 4.0 * stats::jackknife_se_kstat(x, 3));
  CHECK(std::abs(k4) <= 4.0 * stats::jackknife_se_kstat(x, 4));

  // k2 equals the Bessel-corrected sample variance.
  const double mean = stats::mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  CHECK(k2 == doctest::Approx(ss / (x.size() - 1.0)).epsilon(1e-12));

  CHECK(stats::k_statistic(x, 1) == doctest::Approx(mean));
  CHECK_THROWS_AS(stats::k_statistic(x, 5), InvalidInputError);
}

TEST_CASE("jackknife standard error scales like 1/sqrt(replicas)") {
  Rng gen(RngStream{1002u, 0u});
  std::vector<double> big(32000);
  for (double& v : big) v = gen.normal();
  const std::vector<double> small(big.begin(), big.begin() + 8000);
  const double se_small = stats::jackknife_se_kstat(small, 2);
  const double se_big = stats::jackknife_se_kstat(big, 2);
  const double ratio = se_small / se_big;  // expect about sqrt(4) = 2
  CHECK(ratio > 1.0);
  CHECK(ratio < 4.0);
}

TEST_CASE("KS test: calibrated on the null, rejects a wrong scale") {
  Rng gen(RngStream{1003u, 0u});
  std::vector<double> x(20000);
  for (double& v : x) v = 2.0 * gen.normal();
  CHECK(stats::ks_test_normal(x, 0.0, 2.0).p_value > 0.01);
  CHECK(stats::ks_test_normal(x, 0.0, 1.0).p_value < 1e-6);
}

TEST_CASE("declared derivatives match central finite differences") {
  const double h = 1e-6;
  for (const auto& f : {st::tf_identity(), st::tf_square(), st::tf_cube(), st::tf_sin(),
                        st::tf_cos(), st::tf_gauss(),
                        st::tf_polynomial({1.0, -0.5, 0.0, 2.0}, "p")}) {
    double scale = 0.0;
    for (int i = 0; i <= 600; ++i)
      scale = std::max(scale, std::abs(f.deriv(-3.0 + 6.0 * i / 600.0)));
    for (int i = 0; i <= 600; ++i) {
      const double x = -3.0 + 6.0 * i / 600.0;
      const Complex fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
      CHECK(std::abs(f.deriv(x) - fd) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("linear statistics") {
  Spectrum s;
  s.values = {1.0, 2.0, 3.0};
  CHECK(st::linear_statistic(st::tf_identity(), s) == Complex(6.0, 0.0));
  CHECK(st::linear_statistic(st::tf_one(), s) == Complex(3.0, 0.0));

  const HermitianMatrix x = sample_gue(64, RngStream{1004u, 0u});
  const Complex via_spectrum = st::linear_statistic(st::tf_square(), eigenvalues(x));
  const Complex via_entries = (x.entries() * x.entries()).trace();
  CHECK(std::abs(via_spectrum - via_entries) <= 1e-9 * std::abs(via_entries));
}

TEST_CASE("covariance estimates against exact values") {
  const EnsembleSpec gue = EnsembleSpec::gue();

  const auto var_tr = st::covariance_mc(st::tf_identity(), st::tf_identity(), gue, 32,
                                        2500, RngStream{1005u, 0u});
  CHECK(std::abs(var_tr.value.real() - 1.0) <= 3.0 * var_tr.std_error);

  const auto var_tr2 = st::covariance_mc(st::tf_square(), st::tf_square(), gue, 128,
                                         2000, RngStream{1006u, 0u});
  CHECK(std::abs(var_tr2.value.real() - 2.0) <= 3.0 * var_tr2.std_error);

  const auto mixed = st::covariance_mc(st::tf_identity(), st::tf_square(), gue, 32, 2500,
                                       RngStream{1007u, 0u});
  CHECK(std::abs(mixed.value.real()) <= 3.0 * mixed.std_error);

  CHECK_THROWS_AS(
      st::covariance_mc(st::tf_identity(), st::tf_identity(), gue, 8, 50, RngStream{}),
      InvalidInputError);
}

TEST_CASE("covariance is bilinear and symmetric on common draws") {
  const EnsembleSpec gue = EnsembleSpec::gue();
  const auto f = st::tf_identity();
  const auto g = st::tf_square();
  const auto h = st::tf_polynomial({0.0, 1.0, 1.0}, "x + x^2");
  const auto combo = st::tf_polynomial({0.0, 2.0, -0.5}, "2x - x^2/2");
  const auto samples =
      st::collect_linear_statistics({f, g, h, combo}, gue, 24, 600, RngStream{1008u, 0u});

  const Complex cfh = stats::bilinear_covariance(samples[0], samples[2]);
  const Complex cgh = stats::bilinear_covariance(samples[1], samples[2]);
  const Complex ccombo = stats::bilinear_covariance(samples[3], samples[2]);
  CHECK(std::abs(ccombo - (2.0 * cfh - 0.5 * cgh)) < 1e-10);

  CHECK(stats::bilinear_covariance(samples[0], samples[1]) ==
        stats::bilinear_covariance(samples[1], samples[0]));

  // Constant test function: centered samples vanish identically.
  const auto const_cov = st::covariance_mc(st::tf_one(), st::tf_square(), gue, 16, 400,
                                           RngStream{1009u, 0u});
  CHECK(const_cov.value == Complex(0.0, 0.0));
}

TEST_CASE("cumulants of Tr X are zero; k3 of Tr X^2 decays with N") {
  const EnsembleSpec gue = EnsembleSpec::gue();
  const auto k3 =
      st::cumulant_mc(st::tf_identity(), gue, 32, 3, 4000, RngStream{1010u, 0u});
  CHECK(std::abs(k3.value.real()) <= 4.0 * k3.std_error);
  const auto k4 =
      st::cumulant_mc(st::tf_identity(), gue, 32, 4, 4000, RngStream{1011u, 0u});
  CHECK(std::abs(k4.value.real()) <= 4.0 * k4.std_error);

  // k3(Tr X^2) = 8/N exactly; the decay over N shows up as a decreasing
  // trend once the estimator noise is accounted for.
  double first_abs = 0.0, first_se = 0.0;
  for (int n : {16, 64, 256}) {
    const auto est =
        st::cumulant_mc(st::tf_square(), gue, n, 3, 2500, RngStream{1012u, 0u});
    CHECK(std::abs(est.value.real() - 8.0 / n) <= 4.0 * est.std_error);
    if (n == 16) {
      first_abs = std::abs(est.value.real());
      first_se = est.std_error;
    }
    if (n == 256)
      CHECK(std::abs(est.value.real()) < first_abs + 3.0 * (first_se + est.std_error));
  }
  CHECK_THROWS_AS(st::cumulant_mc(st::tf_identity(), gue, 8, 3, 500, RngStream{}),
                  InvalidInputError);
  CHECK_THROWS_AS(st::cumulant_mc(st::tf_identity(), gue, 8, 5, 5000, RngStream{}),
                  InvalidInputError);
}

TEST_CASE("Poincare check") {
  const EnsembleSpec gue = EnsembleSpec::gue();
  const auto sin_rep =
      st::poincare_check(st::tf_sin(), gue, 64, 3000, RngStream{1013u, 0u});
  CHECK(sin_rep.pass);
  CHECK(sin_rep.bound == 1.0);
  CHECK(sin_rep.ratio < 1.0);

  // Equality case: Var(Tr X) = 1 = bound.
  const auto id_rep =
      st::poincare_check(st::tf_identity(), gue, 64, 3000, RngStream{1014u, 0u});
  CHECK(id_rep.pass);
  CHECK(id_rep.ratio == doctest::Approx(1.0).epsilon(0.1));

  const EnsembleSpec block =
      EnsembleSpec::block_gaussian({HermitianMatrix::diagonal({1.0, -1.0})});
  const auto block_rep =
      st::poincare_check(st::tf_sin(), block, 32, 3000, RngStream{1015u, 0u});
  CHECK(block_rep.pass);
  CHECK(block_rep.bound == doctest::Approx(1.0));  // r^2 ||sum A_k^2||^2 = 1
  // Tr sin vanishes identically on the +-symmetric block spectrum, so the
  // sin check is vacuous there. cos has real variance, and it lands ABOVE
  // the configured r^2 ||sum A_k^2||^2 constant: the limit is
  // 4 sum_k 2k J_{2k}(2)^2 = 1.0145 > 1. That constant misses a factor of
  // the block dimension; the checker is expected to flag the violation.
  // With d ||sum A_k^2|| = 2 in place of K the inequality does hold.
  CHECK(block_rep.variance <= 1e-12);
  const auto block_cos =
      st::poincare_check(st::tf_cos(), block, 32, 6000, RngStream{1015u, 1u});
  CHECK(!block_cos.pass);
  CHECK(block_cos.variance > 1.0);
  CHECK(block_cos.variance <= 2.0);

  CHECK_THROWS_AS(st::poincare_check(st::tf_square(), gue, 16, 3000, RngStream{}),
                  InvalidInputError);  // unbounded derivative
}

TEST_CASE("tail fractions") {
  const EnsembleSpec gue = EnsembleSpec::gue();
  const auto none = st::tail_fraction(gue, 48, 3.0, 1500, RngStream{1016u, 0u});
  CHECK(none.value.real() == 0.0);
  CHECK(none.diagnostics.at("n8_times_fraction") == 0.0);

  const auto some = st::tail_fraction(gue, 8, 2.0, 2000, RngStream{1017u, 0u});
  CHECK(some.value.real() > 0.0);  // finite-N edge fluctuations
  CHECK(some.std_error > 0.0);

  const EnsembleSpec add = EnsembleSpec::additive(
      HermitianMatrix::diagonal({1, -1, 1, -1, 1, -1, 1, -1}),
      HermitianMatrix::diagonal({1, 1, -1, -1, 1, 1, -1, -1}));
  const auto det = st::tail_fraction(add, 8, 2.0, 1000, RngStream{1018u, 0u});
  CHECK(det.value.real() == 0.0);
}

TEST_CASE("truncation gap") {
  const EnsembleSpec gue = EnsembleSpec::gue();
  const auto sin_f = st::tf_sin();

  const auto clean =
      st::truncation_gap(sin_f, sin_f, gue, 64, 3.0, 2000, RngStream{1019u, 0u});
  if (clean.exceed_count == 0) {
    CHECK(clean.gap == 0.0);  // indicator never fires, identical samples
    CHECK(clean.bound == 0.0);
  }
  CHECK(clean.within_bound);

  const auto tight =
      st::truncation_gap(sin_f, sin_f, gue, 8, 2.0, 4000, RngStream{1020u, 0u});
  CHECK(tight.tail_fraction > 0.0);
  CHECK(tight.within_bound);

  const auto infinite =
      st::truncation_gap(sin_f, sin_f, gue, 16, 1e6, 500, RngStream{1021u, 0u});
  CHECK(infinite.gap == 0.0);

  CHECK_THROWS_AS(
      st::truncation_gap(st::tf_square(), sin_f, gue, 8, 2.0, 500, RngStream{}),
      InvalidInputError);  // unbounded f
}

TEST_CASE("C1 extension") {
  const auto ext = st::c1_extension(st::tf_identity(), 1.0);
  // Inside [-M, M] the extension is f itself.
  CHECK(ext.eval(0.3) == Complex(0.3, 0.0));
  // f = id, M = 1: alpha = 1/e, so ext(x) = 1 + (x-1) e^{-(x-1)/e} beyond M.
  for (double x : {1.5, 2.0, 4.0}) {
    const double expected = 1.0 + (x - 1.0) * std::exp(-(x - 1.0) / M_E);
    CHECK(ext.eval(x).real() == doctest::Approx(expected).epsilon(1e-12));
  }

  // C^1 matching at the seams by one-sided finite differences.
  const double h = 1e-7;
  for (const auto& f : {st::tf_sin(), st::tf_square(), st::tf_gauss()}) {
    const double m = 2.0;
    const auto e = st::c1_extension(f, m);
    for (double seam : {m, -m}) {
      const Complex left = (e.eval(seam) - e.eval(seam - h)) / h;
      const Complex right = (e.eval(seam + h) - e.eval(seam)) / h;
      CHECK(std::abs(left - right) < 1e-6);
      CHECK(std::abs(e.deriv(seam + h / 2) - e.deriv(seam - h / 2)) < 1e-6);
    }
    // Norm guarantees on a wide grid (fine enough that the grid sup resolves
    // interior maxima to well below the 1e-6 comparison).
    const double f_sup = f.sup_on(m, 40000);
    const double df_sup = f.sup_deriv_on(m, 40000);
    double ext_sup = 0.0, ext_dsup = 0.0;
    for (int i = 0; i <= 400000; ++i) {
      const double x = -10.0 * m + 20.0 * m * i / 400000.0;
      ext_sup = std::max(ext_sup, std::abs(e.eval(x)));
      ext_dsup = std::max(ext_dsup, std::abs(e.deriv(x)));
    }
    CHECK(ext_sup <= 2.0 * f_sup + 1e-9);
    CHECK(std::abs(ext_dsup - df_sup) < 1e-6);
  }

  // Zero function degenerate case.
  const auto zero_ext = st::c1_extension(st::tf_polynomial({0.0}, "0"), 1.0);
  CHECK(zero_ext.eval(5.0) == Complex(0.0, 0.0));
}

TEST_CASE("Chebyshev approximation") {
  // Exact recovery of a polynomial of lower degree.
  const auto poly = st::tf_polynomial({-1.0, 2.0, 0.0, 1.0}, "x^3 + 2x - 1");
  const auto approx = st::chebyshev_approx(poly, 3.0, 10);
  REQUIRE(approx.monomial_coeffs.size() == 11);
  CHECK(std::abs(approx.monomial_coeffs[0] + 1.0) < 1e-12);
  CHECK(std::abs(approx.monomial_coeffs[1] - 2.0) < 1e-12);
  CHECK(std::abs(approx.monomial_coeffs[2]) < 1e-12);
  CHECK(std::abs(approx.monomial_coeffs[3] - 1.0) < 1e-12);
  for (std::size_t k = 4; k < approx.monomial_coeffs.size(); ++k)
    CHECK(std::abs(approx.monomial_coeffs[k]) < 1e-12);
  CHECK(approx.sup_error < 1e-12);

  // Smooth function: fast error decay in both f and f'.
  const auto sin_approx = st::chebyshev_approx(st::tf_sin(), 3.0, 20);
  CHECK(sin_approx.sup_error < 1e-8);
  CHECK(sin_approx.sup_deriv_error < 1e-6);

  double prev_f = 1e300, prev_df = 1e300;
  for (int degree : {4, 8, 12, 16}) {
    const auto a = st::chebyshev_approx(st::tf_sin(), 3.0, degree);
    CHECK(a.sup_error < std::max(prev_f, 1e-13));
    CHECK(a.sup_deriv_error < std::max(prev_df, 1e-11));
    prev_f = a.sup_error;
    prev_df = a.sup_deriv_error;
  }
}

TEST_CASE("CLT experiment: exact Gaussian case and variance targets") {
  const EnsembleSpec gue = EnsembleSpec::gue();
  const auto report = st::clt_experiment(st::tf_identity(), gue, {16, 64}, 2000, 1.0,
                                         RngStream{1025u, 0u});
  REQUIRE(report.rows.size() == 2);
  for (const auto& row : report.rows) {
    CHECK(row.ks_p_value > 0.01);  // Tr X is exactly N(0,1)
    CHECK(std::abs(row.mean) <= 4.0 * row.mean_std_error);
    CHECK(std::abs(row.variance - 1.0) <= 4.0 * row.variance_std_error);
  }
  CHECK(report.ks_all_accepted_1pct);

  const auto sq = st::clt_experiment(st::tf_square(), gue, {24}, 2000, 2.0,
                                     RngStream{1023u, 0u});
  CHECK(std::abs(sq.rows[0].variance - 2.0) <= 3.0 * sq.rows[0].variance_std_error);

  CHECK_THROWS_AS(
      st::clt_experiment(st::tf_identity(), gue, {16}, 500, -1.0, RngStream{}),
      ConfigError);
}

TEST_CASE("CLT variance of Tr X^3 matches the contour-quadrature target") {
  const double rho_target =
      quadrature::rho_via_contour(
          quadrature::AnalyticFunction::monomial(3), quadrature::AnalyticFunction::monomial(3),
          [](Complex z, Complex w) { return transforms::g2_gue_free(z, w); },
          quadrature::Contour::circle(0.0, 3.0, 256, 2.0),
          quadrature::Contour::circle(0.0, 3.5, 256, 2.0))
          .real();
  CHECK(rho_target ==
        doctest::Approx(moments::second_order_moment(3, 3)).epsilon(1e-9));

  const auto report = st::clt_experiment(st::tf_cube(), EnsembleSpec::gue(), {256}, 2500,
                                         rho_target, RngStream{1026u, 0u});
  CHECK(std::abs(report.rows[0].variance - rho_target) <=
        3.0 * report.rows[0].variance_std_error);
}
