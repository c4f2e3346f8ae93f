#include "sofp/sample_stats.hpp"

#include <algorithm>
#include <cmath>

#include "sofp/errors.hpp"

namespace sofp::stats {

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

Complex mean(std::span<const Complex> x) {
  Complex s{0.0, 0.0};
  for (const Complex& v : x) s += v;
  return x.empty() ? Complex{0.0, 0.0} : s / static_cast<double>(x.size());
}

Complex bilinear_covariance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw InvalidInputError("covariance: size mismatch");
  const auto n = a.size();
  if (n < 2) throw InvalidInputError("covariance: need at least 2 samples");
  const Complex am = mean(a), bm = mean(b);
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) s += (a[i] - am) * (b[i] - bm);
  return s / static_cast<double>(n - 1);
}

CovarianceEstimate covariance_with_error(std::span<const Complex> a,
                                         std::span<const Complex> b) {
  if (a.size() != b.size()) throw InvalidInputError("covariance: size mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 3) throw InvalidInputError("covariance jackknife: need at least 3 samples");

  // Center first; the statistic is translation invariant and the delete-one
  // updates below lose far less precision on centered samples.
  const Complex am = mean(a), bm = mean(b);
  Complex sa{0, 0}, sb{0, 0}, sab{0, 0};
  std::vector<Complex> ac(a.size()), bc(b.size());
  for (int i = 0; i < n; ++i) {
    ac[i] = a[i] - am;
    bc[i] = b[i] - bm;
    sa += ac[i];
    sb += bc[i];
    sab += ac[i] * bc[i];
  }
  const double dn = n;
  const Complex value = (sab - sa * sb / dn) / (dn - 1.0);

  std::vector<Complex> loo(n);
  Complex loo_mean{0, 0};
  for (int i = 0; i < n; ++i) {
    const Complex sa_i = sa - ac[i];
    const Complex sb_i = sb - bc[i];
    const Complex sab_i = sab - ac[i] * bc[i];
    loo[i] = (sab_i - sa_i * sb_i / (dn - 1.0)) / (dn - 2.0);
    loo_mean += loo[i];
  }
  loo_mean /= dn;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) ss += std::norm(loo[i] - loo_mean);
  return {value, std::sqrt((dn - 1.0) / dn * ss)};
}

double jackknife_se_covariance(std::span<const Complex> a, std::span<const Complex> b) {
  return covariance_with_error(a, b).std_error;
}

namespace {

// k-statistics from power sums of (already centered) samples.
double kstat_from_power_sums(double s1, double s2, double s3, double s4, double n, int r) {
  switch (r) {
    case 1:
      return s1 / n;
    case 2:
      return (n * s2 - s1 * s1) / (n * (n - 1.0));
    case 3:
      return (2.0 * s1 * s1 * s1 - 3.0 * n * s1 * s2 + n * n * s3) /
             (n * (n - 1.0) * (n - 2.0));
    case 4:
      return (-6.0 * s1 * s1 * s1 * s1 + 12.0 * n * s1 * s1 * s2 -
              3.0 * n * (n - 1.0) * s2 * s2 - 4.0 * n * (n + 1.0) * s1 * s3 +
              n * n * (n + 1.0) * s4) /
             (n * (n - 1.0) * (n - 2.0) * (n - 3.0));
    default:
      throw InvalidInputError("k_statistic: order must be in {1, 2, 3, 4}");
  }
}

}  // namespace

double k_statistic(std::span<const double> x, int r) {
  if (r < 1 || r > 4) throw InvalidInputError("k_statistic: order must be in {1, 2, 3, 4}");
  const int n = static_cast<int>(x.size());
  if (n < r + 1) throw InvalidInputError("k_statistic: too few samples for requested order");
  const double m = mean(x);
  // Orders >= 2 are translation invariant; center for conditioning. k1 is the
  // plain mean.
  if (r == 1) return m;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (double v : x) {
    const double c = v - m;
    const double c2 = c * c;
    s1 += c;
    s2 += c2;
    s3 += c2 * c;
    s4 += c2 * c2;
  }
  return kstat_from_power_sums(s1, s2, s3, s4, static_cast<double>(n), r);
}

double jackknife_se_kstat(std::span<const double> x, int r) {
  const int n = static_cast<int>(x.size());
  if (n < r + 2) throw InvalidInputError("jackknife_se_kstat: too few samples");
  const double m = mean(x);
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  std::vector<double> c(x.size());
  for (int i = 0; i < n; ++i) {
    c[i] = x[i] - m;
    const double c2 = c[i] * c[i];
    s1 += c[i];
    s2 += c2;
    s3 += c2 * c[i];
    s4 += c2 * c2;
  }
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ci = c[i], ci2 = ci * ci;
    loo[i] = kstat_from_power_sums(s1 - ci, s2 - ci2, s3 - ci2 * ci, s4 - ci2 * ci2,
                                   static_cast<double>(n - 1), r);
    loo_mean += loo[i];
  }
  loo_mean /= n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) ss += (loo[i] - loo_mean) * (loo[i] - loo_mean);
  return std::sqrt((n - 1.0) / n * ss);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

KsResult ks_test_normal(std::span<const double> x, double mu, double sigma) {
  if (x.size() < 8) throw InvalidInputError("ks_test_normal: too few samples");
  if (!(sigma > 0.0)) throw InvalidInputError("ks_test_normal: sigma must be positive");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf((sorted[i] - mu) / sigma);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  // Stephens' finite-sample correction, then the asymptotic Kolmogorov series.
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    p += (j % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  p = std::clamp(p, 0.0, 1.0);
  return {d, p};
}

}  // namespace sofp::stats
