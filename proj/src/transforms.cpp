#include "sofp/transforms.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "sofp/errors.hpp"
#include "sofp/parallel.hpp"
#include "sofp/sample_stats.hpp"

namespace sofp::transforms {

namespace {

std::string point_str(Complex z) {
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

void require_off_cut(Complex z, const char* who) {
  if (on_semicircle_cut(z))
    throw DomainError(std::string(who) + ": point " + point_str(z) +
                      " lies on the branch cut [-2, 2]");
}

void require_off_diagonal(Complex z, Complex w, const char* who) {
  if (std::abs(z - w) < diagonal_guard(z))
    throw NearDiagonalError(std::string(who) + ": |z - w| below the diagonal guard at " +
                            point_str(z) + "; use offset contours");
}

}  // namespace

bool on_semicircle_cut(Complex z) {
  return z.imag() == 0.0 && std::abs(z.real()) <= 2.0;
}

Complex branched_sqrt(Complex z) {
  return std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
}

Complex semicircle_cauchy(Complex z) {
  require_off_cut(z, "semicircle_cauchy");
  return 0.5 * (z - branched_sqrt(z));
}

Complex semicircle_cauchy_derivative(Complex z) {
  require_off_cut(z, "semicircle_cauchy_derivative");
  return -semicircle_cauchy(z) / branched_sqrt(z);
}

double diagonal_guard(Complex z) { return 1e-3 * (1.0 + std::abs(z)); }

Complex g2_gue_free(Complex z, Complex w) {
  require_off_cut(z, "g2_gue_free");
  require_off_cut(w, "g2_gue_free");
  require_off_diagonal(z, w, "g2_gue_free");
  const Complex gz = semicircle_cauchy(z);
  const Complex gw = semicircle_cauchy(w);
  const Complex dg = gz - gw;
  const Complex dz = z - w;
  return semicircle_cauchy_derivative(z) * semicircle_cauchy_derivative(w) / (dg * dg) -
         1.0 / (dz * dz);
}

Complex g2_gue_ps(Complex z, Complex w) {
  require_off_cut(z, "g2_gue_ps");
  require_off_cut(w, "g2_gue_ps");
  require_off_diagonal(z, w, "g2_gue_ps");
  const Complex dz = z - w;
  return ((z * w - 4.0) / (branched_sqrt(z) * branched_sqrt(w)) - 1.0) /
         (2.0 * dz * dz);
}

Complex resolvent_trace(const Spectrum& spectrum, Complex z) {
  const double threshold = 1e-14 * spectrum.max_abs();
  Complex acc{0.0, 0.0};
  for (double lam : spectrum.values) {
    if (std::abs(z - lam) <= threshold)
      throw NearPoleError("resolvent_trace: z within " + std::to_string(threshold) +
                          " of eigenvalue " + std::to_string(lam));
    acc += 1.0 / (z - lam);
  }
  return acc;
}

double distance_to_segment(Complex z, double m) {
  const double dx = std::max(std::abs(z.real()) - m, 0.0);
  return std::hypot(dx, z.imag());
}

EstimateWithError g2_empirical(const EnsembleSpec& spec, int n, Complex z, Complex w,
                               int replicas, RngStream rng, int threads) {
  if (replicas < 100) throw InvalidInputError("g2_empirical: need >= 100 replicas");
  const double m_cut = spec.m_bound();
  if (distance_to_segment(z, m_cut) <= 0.0 || distance_to_segment(w, m_cut) <= 0.0)
    throw DomainError("g2_empirical: z and w must be off the segment [-M, M], M = " +
                      std::to_string(m_cut));

  std::vector<Complex> rz(replicas), rw(replicas);
  std::vector<char> exceeded(replicas, 0);
  parallel_for(replicas, threads, [&](int r) {
    const Spectrum s = eigenvalues(spec.sample(n, rng.substream(r)));
    Complex az{0.0, 0.0}, aw{0.0, 0.0};
    for (double lam : s.values) {
      if (std::abs(lam) > m_cut) continue;  // truncated resolvent
      az += 1.0 / (z - lam);
      aw += 1.0 / (w - lam);
    }
    rz[r] = az;
    rw[r] = aw;
    exceeded[r] = s.max_abs() > m_cut ? 1 : 0;
  });

  const auto cov = stats::covariance_with_error(rz, rw);
  EstimateWithError est;
  est.value = cov.value;
  est.std_error = cov.std_error;
  est.replicas = replicas;
  est.stream = rng;
  double exceed_count = 0;
  for (char c : exceeded) exceed_count += c;
  est.diagnostics["norm_exceed_count"] = exceed_count;
  est.diagnostics["norm_exceed_fraction"] = exceed_count / replicas;
  return est;
}

}  // namespace sofp::transforms
