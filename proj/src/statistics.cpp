#include "sofp/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sofp/errors.hpp"
#include "sofp/parallel.hpp"
#include "sofp/sample_stats.hpp"

namespace sofp::statistics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ99 = 2.3263478740408408;  // one-sided 99% normal quantile

std::vector<double> to_real(const std::vector<Complex>& xs, const char* who) {
  std::vector<double> out(xs.size());
  double scale = 1e-30;
  for (const Complex& x : xs) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i].imag()) > 1e-9 * scale)
      throw InvalidInputError(std::string(who) + ": statistic is not real-valued");
    out[i] = xs[i].real();
  }
  return out;
}

}  // namespace

double TestFunction::sup_on(double m, int grid) const {
  double best = 0.0;
  for (int i = 0; i <= grid; ++i)
    best = std::max(best, std::abs(eval(-m + 2.0 * m * i / grid)));
  return best;
}

double TestFunction::sup_deriv_on(double m, int grid) const {
  double best = 0.0;
  for (int i = 0; i <= grid; ++i)
    best = std::max(best, std::abs(deriv(-m + 2.0 * m * i / grid)));
  return best;
}

TestFunction tf_identity() {
  return {[](double x) { return Complex(x, 0.0); },
          [](double) { return Complex(1.0, 0.0); },
          kInf,
          1.0,
          true,
          quadrature::AnalyticFunction::monomial(1),
          "id"};
}

TestFunction tf_square() {
  return {[](double x) { return Complex(x * x, 0.0); },
          [](double x) { return Complex(2.0 * x, 0.0); },
          kInf,
          kInf,
          true,
          quadrature::AnalyticFunction::monomial(2),
          "x^2"};
}

TestFunction tf_cube() {
  return {[](double x) { return Complex(x * x * x, 0.0); },
          [](double x) { return Complex(3.0 * x * x, 0.0); },
          kInf,
          kInf,
          true,
          quadrature::AnalyticFunction::monomial(3),
          "x^3"};
}

TestFunction tf_one() {
  return {[](double) { return Complex(1.0, 0.0); },
          [](double) { return Complex(0.0, 0.0); },
          1.0,
          0.0,
          true,
          quadrature::AnalyticFunction::monomial(0),
          "1"};
}

TestFunction tf_sin() {
  return {[](double x) { return Complex(std::sin(x), 0.0); },
          [](double x) { return Complex(std::cos(x), 0.0); },
          1.0,
          1.0,
          true,
          quadrature::AnalyticFunction::entire(
              [](Complex z) { return std::sin(z); }, "sin"),
          "sin"};
}

TestFunction tf_cos() {
  return {[](double x) { return Complex(std::cos(x), 0.0); },
          [](double x) { return Complex(-std::sin(x), 0.0); },
          1.0,
          1.0,
          true,
          quadrature::AnalyticFunction::entire(
              [](Complex z) { return std::cos(z); }, "cos"),
          "cos"};
}

TestFunction tf_gauss() {
  // exp(-x^2); |f'| = |2x| exp(-x^2) peaks at x = 1/sqrt(2).
  return {[](double x) { return Complex(std::exp(-x * x), 0.0); },
          [](double x) { return Complex(-2.0 * x * std::exp(-x * x), 0.0); },
          1.0,
          std::sqrt(2.0) * std::exp(-0.5),
          true,
          quadrature::AnalyticFunction::entire(
              [](Complex z) { return std::exp(-z * z); }, "gauss"),
          "gauss"};
}

TestFunction tf_polynomial(std::vector<double> coeffs, std::string name) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  auto eval = [coeffs](double x) {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * x + coeffs[j];
    return Complex(acc, 0.0);
  };
  std::vector<double> dcoeffs;
  for (std::size_t j = 1; j < coeffs.size(); ++j)
    dcoeffs.push_back(coeffs[j] * static_cast<double>(j));
  if (dcoeffs.empty()) dcoeffs.push_back(0.0);
  auto deriv = [dcoeffs](double x) {
    double acc = 0.0;
    for (std::size_t j = dcoeffs.size(); j-- > 0;) acc = acc * x + dcoeffs[j];
    return Complex(acc, 0.0);
  };
  const bool constant = coeffs.size() <= 1;
  const bool linear = coeffs.size() <= 2;
  TestFunction f;
  f.eval = eval;
  f.deriv = deriv;
  f.sup_bound = constant ? std::abs(coeffs[0]) : kInf;
  f.sup_deriv_bound = constant ? 0.0 : (linear ? std::abs(coeffs[1]) : kInf);
  f.real_valued = true;
  f.analytic = quadrature::AnalyticFunction::polynomial(coeffs, name);
  f.name = name.empty() ? "poly" : std::move(name);
  return f;
}

TestFunction tf_by_name(const std::string& name) {
  if (name == "id" || name == "x") return tf_identity();
  if (name == "x^2" || name == "square") return tf_square();
  if (name == "x^3" || name == "cube") return tf_cube();
  if (name == "1" || name == "one") return tf_one();
  if (name == "sin") return tf_sin();
  if (name == "cos") return tf_cos();
  if (name == "gauss") return tf_gauss();
  throw InvalidInputError("unknown test function: " + name);
}

Complex linear_statistic(const TestFunction& f, const Spectrum& spectrum) {
  Complex acc{0.0, 0.0};
  for (double lam : spectrum.values) acc += f.eval(lam);
  return acc;
}

std::vector<std::vector<Complex>> collect_linear_statistics(
    const std::vector<TestFunction>& fs, const EnsembleSpec& spec, int n, int replicas,
    RngStream rng, int threads) {
  std::vector<std::vector<Complex>> out(fs.size(), std::vector<Complex>(replicas));
  parallel_for(replicas, threads, [&](int r) {
    const Spectrum s = eigenvalues(spec.sample(n, rng.substream(r)));
    for (std::size_t k = 0; k < fs.size(); ++k) out[k][r] = linear_statistic(fs[k], s);
  });
  return out;
}

EstimateWithError covariance_mc(const TestFunction& f, const TestFunction& g,
                                const EnsembleSpec& spec, int n, int replicas,
                                RngStream rng, int threads) {
  if (replicas < 100) throw InvalidInputError("covariance_mc: need >= 100 replicas");
  const auto samples = collect_linear_statistics({f, g}, spec, n, replicas, rng, threads);
  const auto cov = stats::covariance_with_error(samples[0], samples[1]);
  EstimateWithError est;
  est.value = cov.value;
  est.std_error = cov.std_error;
  est.replicas = replicas;
  est.stream = rng;
  return est;
}

EstimateWithError cumulant_mc(const TestFunction& f, const EnsembleSpec& spec, int n,
                              int r, int replicas, RngStream rng, int threads) {
  if (r < 2 || r > 4) throw InvalidInputError("cumulant_mc: order must be in {2, 3, 4}");
  if (replicas < (r >= 3 ? 1000 : 100))
    throw InvalidInputError("cumulant_mc: too few replicas for requested order");
  const auto samples = collect_linear_statistics({f}, spec, n, replicas, rng, threads);
  const std::vector<double> xs = to_real(samples[0], "cumulant_mc");
  EstimateWithError est;
  est.value = Complex(stats::k_statistic(xs, r), 0.0);
  est.std_error = stats::jackknife_se_kstat(xs, r);
  est.replicas = replicas;
  est.stream = rng;
  return est;
}

PoincareReport poincare_check(const TestFunction& f, const EnsembleSpec& spec, int n,
                              int replicas, RngStream rng, int threads) {
  if (!std::isfinite(f.sup_deriv_bound))
    throw InvalidInputError("poincare_check: f needs a finite ||f'||_inf");
  const auto samples = collect_linear_statistics({f}, spec, n, replicas, rng, threads);
  const std::vector<double> xs = to_real(samples[0], "poincare_check");
  PoincareReport rep;
  rep.variance = stats::k_statistic(xs, 2);
  rep.std_error = stats::jackknife_se_kstat(xs, 2);
  rep.bound = spec.k_bound() * f.sup_deriv_bound * f.sup_deriv_bound;
  rep.ratio = rep.variance / rep.bound;
  rep.lower99 = rep.variance - kZ99 * rep.std_error;
  rep.upper99 = rep.variance + kZ99 * rep.std_error;
  // The bound can be saturated (Var(Tr X) = 1 = bound for f = id on GUE), so
  // an upper-confidence test would reject a true inequality 99% of the time
  // there; fail only on significant violation.
  rep.pass = rep.lower99 <= rep.bound;
  rep.replicas = replicas;
  return rep;
}

EstimateWithError tail_fraction(const EnsembleSpec& spec, int n, double m, int replicas,
                                RngStream rng, int threads) {
  if (replicas < 1000) throw InvalidInputError("tail_fraction: need >= 1000 replicas");
  std::vector<char> exceeded(replicas, 0);
  parallel_for(replicas, threads, [&](int r) {
    exceeded[r] = operator_norm(spec.sample(n, rng.substream(r))) > m ? 1 : 0;
  });
  double count = 0;
  for (char c : exceeded) count += c;
  const double p = count / replicas;
  EstimateWithError est;
  est.value = Complex(p, 0.0);
  est.std_error = std::sqrt(p * (1.0 - p) / replicas);
  est.replicas = replicas;
  est.stream = rng;
  est.diagnostics["exceed_count"] = count;
  const double dim = spec.dim(n);
  est.diagnostics["n8_times_fraction"] = std::pow(dim, 8) * p;
  return est;
}

TruncationReport truncation_gap(const TestFunction& f, const TestFunction& g,
                                const EnsembleSpec& spec, int n, double m, int replicas,
                                RngStream rng, int threads) {
  if (!std::isfinite(f.sup_bound) || !std::isfinite(g.sup_bound))
    throw InvalidInputError("truncation_gap: f and g must declare finite sup norms");
  if (replicas < 100) throw InvalidInputError("truncation_gap: need >= 100 replicas");

  std::vector<Complex> tf(replicas), tg(replicas), tf_m(replicas), tg_m(replicas);
  std::vector<char> exceeded(replicas, 0);
  parallel_for(replicas, threads, [&](int r) {
    const Spectrum s = eigenvalues(spec.sample(n, rng.substream(r)));
    Complex af{0, 0}, ag{0, 0}, af_m{0, 0}, ag_m{0, 0};
    for (double lam : s.values) {
      const Complex fv = f.eval(lam);
      const Complex gv = g.eval(lam);
      af += fv;
      ag += gv;
      if (std::abs(lam) <= m) {
        af_m += fv;
        ag_m += gv;
      }
    }
    tf[r] = af;
    tg[r] = ag;
    tf_m[r] = af_m;
    tg_m[r] = ag_m;
    exceeded[r] = s.max_abs() > m ? 1 : 0;
  });

  TruncationReport rep;
  rep.rho_plain = stats::bilinear_covariance(tf, tg);
  rep.rho_truncated = stats::bilinear_covariance(tf_m, tg_m);
  rep.gap = std::abs(rep.rho_plain - rep.rho_truncated);

  // Jackknife on the difference of the two covariances over common draws.
  {
    const int big = replicas;
    const Complex mf = stats::mean(tf), mg = stats::mean(tg);
    const Complex mfm = stats::mean(tf_m), mgm = stats::mean(tg_m);
    Complex sa{0, 0}, sb{0, 0}, sab{0, 0}, ta{0, 0}, tb{0, 0}, tab{0, 0};
    std::vector<Complex> fc(big), gc(big), fmc(big), gmc(big);
    for (int i = 0; i < big; ++i) {
      fc[i] = tf[i] - mf;
      gc[i] = tg[i] - mg;
      fmc[i] = tf_m[i] - mfm;
      gmc[i] = tg_m[i] - mgm;
      sa += fc[i];
      sb += gc[i];
      sab += fc[i] * gc[i];
      ta += fmc[i];
      tb += gmc[i];
      tab += fmc[i] * gmc[i];
    }
    const double dn = big;
    std::vector<Complex> loo(big);
    Complex loo_mean{0, 0};
    for (int i = 0; i < big; ++i) {
      const Complex c1 = ((sab - fc[i] * gc[i]) -
                          (sa - fc[i]) * (sb - gc[i]) / (dn - 1.0)) /
                         (dn - 2.0);
      const Complex c2 = ((tab - fmc[i] * gmc[i]) -
                          (ta - fmc[i]) * (tb - gmc[i]) / (dn - 1.0)) /
                         (dn - 2.0);
      loo[i] = c1 - c2;
      loo_mean += loo[i];
    }
    loo_mean /= dn;
    double ss = 0.0;
    for (int i = 0; i < big; ++i) ss += std::norm(loo[i] - loo_mean);
    rep.gap_std_error = std::sqrt((dn - 1.0) / dn * ss);
  }

  double count = 0;
  for (char c : exceeded) count += c;
  rep.exceed_count = static_cast<int>(count);
  rep.tail_fraction = count / replicas;
  const double dim = spec.dim(n);
  rep.bound = 4.0 * f.sup_bound * g.sup_bound * dim * dim *
              std::pow(rep.tail_fraction, 0.25);
  rep.within_bound = rep.gap <= rep.bound + 4.0 * rep.gap_std_error;
  return rep;
}

TestFunction c1_extension(const TestFunction& f, double m) {
  if (!(m > 0.0)) throw InvalidInputError("c1_extension: M must be positive");
  const double f_sup = f.sup_on(m);
  const double df_sup = f.sup_deriv_on(m);
  if (f_sup == 0.0) {
    // f vanishes identically on [-M, M]; C^1 forces f'(+-M) = 0 too, so the
    // extension is the zero function.
    TestFunction zero = tf_polynomial({0.0}, f.name + "~ext");
    zero.sup_bound = 0.0;
    zero.sup_deriv_bound = 0.0;
    return zero;
  }
  const double alpha = df_sup / (M_E * f_sup);
  const Complex f_hi = f.eval(m), df_hi = f.deriv(m);
  const Complex f_lo = f.eval(-m), df_lo = f.deriv(-m);
  auto base_eval = f.eval;
  auto base_deriv = f.deriv;

  TestFunction ext;
  ext.eval = [=](double x) -> Complex {
    if (x > m) {
      const double t = x - m;
      return f_hi + df_hi * t * std::exp(-alpha * t);
    }
    if (x < -m) {
      const double t = x + m;
      return f_lo + df_lo * t * std::exp(alpha * t);
    }
    return base_eval(x);
  };
  ext.deriv = [=](double x) -> Complex {
    if (x > m) {
      const double t = x - m;
      return df_hi * std::exp(-alpha * t) * (1.0 - alpha * t);
    }
    if (x < -m) {
      const double t = x + m;
      return df_lo * std::exp(alpha * t) * (1.0 + alpha * t);
    }
    return base_deriv(x);
  };
  ext.sup_bound = 2.0 * f_sup;
  ext.sup_deriv_bound = df_sup;
  ext.real_valued = f.real_valued;
  ext.name = f.name + "~ext[M=" + std::to_string(m) + "]";
  return ext;
}

namespace {

// Clenshaw for a plain sum c_0 T_0 + c_1 T_1 + ... on t in [-1, 1].
double clenshaw(const std::vector<double>& c, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (c.empty() ? 0.0 : c[0]);
}

// Coefficients of p' for p = sum c_j T_j, via the descending recurrence
// d_{j-1} = d_{j+1} + 2 j c_j.
std::vector<double> cheb_derivative_coeffs(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {0.0};
  std::vector<double> d(n + 1, 0.0);
  d[n - 1] = 2.0 * n * c[n];
  for (int j = n - 1; j >= 1; --j) d[j - 1] = d[j + 1] + 2.0 * j * c[j];
  d[0] *= 0.5;
  d.resize(n);
  return d;
}

}  // namespace

double ChebyshevApprox::eval(double x) const { return clenshaw(cheb_coeffs, x / m); }

double ChebyshevApprox::eval_deriv(double x) const {
  return clenshaw(cheb_derivative_coeffs(cheb_coeffs), x / m) / m;
}

ChebyshevApprox chebyshev_approx(const TestFunction& f, double m, int degree) {
  if (!(m > 0.0)) throw InvalidInputError("chebyshev_approx: M must be positive");
  if (degree < 1) throw InvalidInputError("chebyshev_approx: degree must be >= 1");
  const int n = degree;
  std::vector<double> values(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double xk = m * std::cos(M_PI * k / n);  // Lobatto points
    const Complex v = f.eval(xk);
    if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
      throw InvalidInputError("chebyshev_approx: f must be real-valued");
    values[k] = v.real();
  }
  ChebyshevApprox out;
  out.m = m;
  out.degree = n;
  out.cheb_coeffs.assign(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 0.5 : 1.0;
      acc += w * values[k] * std::cos(M_PI * j * k / n);
    }
    acc *= 2.0 / n;
    if (j == 0 || j == n) acc *= 0.5;
    out.cheb_coeffs[j] = acc;
  }

  // Monomial form in x via the T_k recurrence on t = x / m.
  std::vector<std::vector<double>> t_poly(n + 1);
  t_poly[0] = {1.0};
  if (n >= 1) t_poly[1] = {0.0, 1.0};
  for (int k = 2; k <= n; ++k) {
    t_poly[k].assign(k + 1, 0.0);
    for (std::size_t i = 0; i < t_poly[k - 1].size(); ++i)
      t_poly[k][i + 1] += 2.0 * t_poly[k - 1][i];
    for (std::size_t i = 0; i < t_poly[k - 2].size(); ++i)
      t_poly[k][i] -= t_poly[k - 2][i];
  }
  out.monomial_coeffs.assign(n + 1, 0.0);
  for (int k = 0; k <= n; ++k)
    for (std::size_t i = 0; i < t_poly[k].size(); ++i)
      out.monomial_coeffs[i] += out.cheb_coeffs[k] * t_poly[k][i];
  for (int i = 0; i <= n; ++i) out.monomial_coeffs[i] /= std::pow(m, i);

  const int grid = 2000;
  double ef = 0.0, edf = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = -m + 2.0 * m * i / grid;
    ef = std::max(ef, std::abs(out.eval(x) - f.eval(x).real()));
    edf = std::max(edf, std::abs(out.eval_deriv(x) - f.deriv(x).real()));
  }
  out.sup_error = ef;
  out.sup_deriv_error = edf;
  return out;
}

std::vector<CltReport> clt_experiment_multi(const std::vector<TestFunction>& fs,
                                            const EnsembleSpec& spec,
                                            const std::vector<int>& n_values,
                                            int replicas,
                                            const std::vector<double>& rho_targets,
                                            RngStream rng, int threads) {
  if (fs.empty() || fs.size() != rho_targets.size())
    throw ConfigError("clt_experiment: need one rho target per test function");
  for (double t : rho_targets)
    if (!(t > 0.0)) throw ConfigError("clt_experiment: rho target must be positive");
  for (const auto& f : fs)
    if (!f.real_valued)
      throw InvalidInputError("clt_experiment: test functions must be real-valued");
  if (replicas < 100) throw InvalidInputError("clt_experiment: need >= 100 replicas");

  std::vector<CltReport> reports(fs.size());
  for (std::size_t k = 0; k < fs.size(); ++k) reports[k].rho_target = rho_targets[k];

  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    const int n = n_values[ni];
    // Pilot and main batches on disjoint substream blocks.
    const RngStream pilot_stream = rng.substream(2 * ni);
    const RngStream main_stream = rng.substream(2 * ni + 1);
    const auto pilot =
        collect_linear_statistics(fs, spec, n, replicas, pilot_stream, threads);
    const auto main =
        collect_linear_statistics(fs, spec, n, replicas, main_stream, threads);

    for (std::size_t k = 0; k < fs.size(); ++k) {
      const std::vector<double> pilot_x = to_real(pilot[k], "clt_experiment");
      std::vector<double> x = to_real(main[k], "clt_experiment");
      const double center = stats::mean(pilot_x);
      for (double& v : x) v -= center;

      CltRow row;
      row.n = n;
      row.mean = stats::mean(x);
      row.variance = stats::k_statistic(x, 2);
      // Pilot centering contributes an equal variance share to the mean.
      row.mean_std_error = std::sqrt(2.0 * row.variance / replicas);
      row.variance_std_error = stats::jackknife_se_kstat(x, 2);
      row.k3 = stats::k_statistic(x, 3);
      row.k3_std_error = stats::jackknife_se_kstat(x, 3);
      row.k4 = stats::k_statistic(x, 4);
      row.k4_std_error = stats::jackknife_se_kstat(x, 4);
      const auto ks = stats::ks_test_normal(x, 0.0, std::sqrt(rho_targets[k]));
      row.ks_statistic = ks.statistic;
      row.ks_p_value = ks.p_value;
      reports[k].rows.push_back(row);
    }
  }

  for (auto& rep : reports) {
    if (rep.rows.size() >= 2) {
      rep.k3_decreasing = std::abs(rep.rows.back().k3) < std::abs(rep.rows.front().k3);
      rep.k4_decreasing = std::abs(rep.rows.back().k4) < std::abs(rep.rows.front().k4);
    }
    rep.ks_all_accepted_1pct = !rep.rows.empty();
    for (const auto& row : rep.rows)
      if (row.ks_p_value <= 0.01) rep.ks_all_accepted_1pct = false;
  }
  return reports;
}

CltReport clt_experiment(const TestFunction& f, const EnsembleSpec& spec,
                         const std::vector<int>& n_values, int replicas,
                         double rho_target, RngStream rng, int threads) {
  return clt_experiment_multi({f}, spec, n_values, replicas, {rho_target}, rng,
                              threads)[0];
}

}  // namespace sofp::statistics
