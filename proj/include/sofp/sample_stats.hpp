#pragma once

#include <complex>
#include <span>
#include <vector>

namespace sofp::stats {

using Complex = std::complex<double>;

double mean(std::span<const double> x);
Complex mean(std::span<const Complex> x);

/// Bilinear sample covariance sum (a_i - abar)(b_i - bbar) / (R - 1), without
/// conjugation: the covariance of trace statistics is bilinear, not
/// sesquilinear, so Cov(A, B) = E(AB) - E(A)E(B) even for complex samples.
Complex bilinear_covariance(std::span<const Complex> a, std::span<const Complex> b);

/// Delete-one jackknife standard error of bilinear_covariance.
double jackknife_se_covariance(std::span<const Complex> a, std::span<const Complex> b);

/// Covariance and its jackknife error in one pass over delete-one sums.
struct CovarianceEstimate {
  Complex value;
  double std_error;
};
CovarianceEstimate covariance_with_error(std::span<const Complex> a,
                                         std::span<const Complex> b);

/// Fisher k-statistic of order r in {1, 2, 3, 4}: the unique symmetric
/// unbiased estimator of the classical cumulant.
double k_statistic(std::span<const double> x, int r);

/// Delete-one jackknife standard error of k_statistic.
double jackknife_se_kstat(std::span<const double> x, int r);

struct KsResult {
  double statistic;  // sup-norm distance between empirical CDF and the target
  double p_value;    // asymptotic Kolmogorov p-value (Stephens correction)
};

/// Two-sided Kolmogorov-Smirnov test of x against the fixed law N(mu, sigma^2).
KsResult ks_test_normal(std::span<const double> x, double mu, double sigma);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace sofp::stats
