#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sofp/ensembles.hpp"
#include "sofp/estimate.hpp"
#include "sofp/quadrature.hpp"

namespace sofp::statistics {

using Complex = std::complex<double>;

/// C^1 test function with its derivative and the sup-norm data the A2 and
/// truncation diagnostics need. sup bounds are over all of R; infinity when
/// unbounded (polynomials).
struct TestFunction {
  std::function<Complex(double)> eval;
  std::function<Complex(double)> deriv;
  double sup_bound = 0.0;        // ||f||_inf over R
  double sup_deriv_bound = 0.0;  // ||f'||_inf over R
  bool real_valued = true;
  std::optional<quadrature::AnalyticFunction> analytic;
  std::string name;

  /// sup of |f| and |f'| on [-m, m], evaluated on a dense grid.
  [[nodiscard]] double sup_on(double m, int grid = 4096) const;
  [[nodiscard]] double sup_deriv_on(double m, int grid = 4096) const;
};

TestFunction tf_identity();
TestFunction tf_square();
TestFunction tf_cube();
TestFunction tf_one();
TestFunction tf_sin();
TestFunction tf_cos();
TestFunction tf_gauss();  // exp(-x^2)
TestFunction tf_polynomial(std::vector<double> coeffs, std::string name = "");
/// Lookup by the names above ("id", "x^2", "x^3", "1", "sin", "cos", "gauss").
TestFunction tf_by_name(const std::string& name);

/// Tr f(X) = sum_k f(lambda_k).
Complex linear_statistic(const TestFunction& f, const Spectrum& spectrum);

/// Values of Tr f_k(X) for each f across common draws: result[k][r] is
/// statistic k on replica r. One spectrum per replica, shared by all f.
std::vector<std::vector<Complex>> collect_linear_statistics(
    const std::vector<TestFunction>& fs, const EnsembleSpec& spec, int n, int replicas,
    RngStream rng, int threads = 0);

/// Sample covariance of (Tr f(X), Tr g(X)) over independent draws with
/// jackknife standard error.
EstimateWithError covariance_mc(const TestFunction& f, const TestFunction& g,
                                const EnsembleSpec& spec, int n, int replicas,
                                RngStream rng, int threads = 0);

/// Unbiased k-statistic of order r in {2, 3, 4} of Tr f(X) samples.
EstimateWithError cumulant_mc(const TestFunction& f, const EnsembleSpec& spec, int n,
                              int r, int replicas, RngStream rng, int threads = 0);

struct PoincareReport {
  double variance = 0.0;
  double std_error = 0.0;
  double bound = 0.0;     // K ||f'||_inf^2
  double ratio = 0.0;     // variance / bound
  double lower99 = 0.0;   // variance - z_{0.99} stderr
  double upper99 = 0.0;
  bool pass = false;      // no significant violation: lower99 <= bound
  int replicas = 0;
};

/// Checks Var(Tr f(X_N)) <= K ||f'||_inf^2. The variance may sit exactly on
/// the bound (f = id on GUE), so the test fails only when the lower 99%
/// confidence bound exceeds it.
PoincareReport poincare_check(const TestFunction& f, const EnsembleSpec& spec, int n,
                              int replicas, RngStream rng, int threads = 0);

/// Empirical fraction of draws with ||X|| > m; diagnostics carry N^8 * fraction.
EstimateWithError tail_fraction(const EnsembleSpec& spec, int n, double m, int replicas,
                                RngStream rng, int threads = 0);

struct TruncationReport {
  Complex rho_plain{0.0, 0.0};   // Cov(Tr f, Tr g)
  Complex rho_truncated{0.0, 0.0};  // Cov(Tr f_M, Tr g_M), f_M = f 1_{|x| <= M}
  double gap = 0.0;              // |difference|
  double gap_std_error = 0.0;
  double tail_fraction = 0.0;
  double bound = 0.0;            // 4 ||f|| ||g|| N^2 fraction^{1/4}
  int exceed_count = 0;
  bool within_bound = false;     // gap <= bound + 4 gap_std_error
};

/// Compares the plain and truncated covariances on common draws against the
/// truncation inequality evaluated with the empirical tail fraction.
TruncationReport truncation_gap(const TestFunction& f, const TestFunction& g,
                                const EnsembleSpec& spec, int n, double m, int replicas,
                                RngStream rng, int threads = 0);

/// C^1 extension of f beyond [-M, M]:
///   f(M) + f'(M)(x - M) exp(-alpha (x - M)) for x > M (mirrored below -M)
/// with alpha = ||f'||_M / (e ||f||_M). Guarantees ||ext||_inf <= 2 ||f||_M
/// and ||ext'||_inf = ||f'||_M. For f vanishing on [-M, M] returns the zero
/// function.
TestFunction c1_extension(const TestFunction& f, double m);

struct ChebyshevApprox {
  double m = 0.0;
  int degree = 0;
  std::vector<double> cheb_coeffs;      // c_j of sum c_j T_j(x / m)
  std::vector<double> monomial_coeffs;  // p(x) = sum_k a_k x^k
  double sup_error = 0.0;               // ||p - f||_M on a dense grid
  double sup_deriv_error = 0.0;         // ||p' - f'||_M

  [[nodiscard]] double eval(double x) const;        // Clenshaw
  [[nodiscard]] double eval_deriv(double x) const;
};

/// Chebyshev interpolant of degree `degree` on [-m, m] (Lobatto points);
/// the constructive stand-in for polynomial C^1 approximation of smooth
/// test functions on a real interval.
ChebyshevApprox chebyshev_approx(const TestFunction& f, double m, int degree);

struct CltRow {
  int n = 0;
  double mean = 0.0;
  double mean_std_error = 0.0;
  double variance = 0.0;
  double variance_std_error = 0.0;
  double k3 = 0.0;
  double k3_std_error = 0.0;
  double k4 = 0.0;
  double k4_std_error = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
};

struct CltReport {
  double rho_target = 0.0;
  std::vector<CltRow> rows;
  bool k3_decreasing = false;  // |k3| at the largest N below |k3| at the smallest
  bool k4_decreasing = false;
  bool ks_all_accepted_1pct = false;
};

/// Fluctuation experiment: for each N, draws a pilot batch (same size) whose
/// sample mean centers the main batch, then reports variance, k3, k4 and the
/// Kolmogorov-Smirnov distance to N(0, rho_target).
CltReport clt_experiment(const TestFunction& f, const EnsembleSpec& spec,
                         const std::vector<int>& n_values, int replicas,
                         double rho_target, RngStream rng, int threads = 0);

/// Same, sharing every draw across several test functions.
std::vector<CltReport> clt_experiment_multi(const std::vector<TestFunction>& fs,
                                            const EnsembleSpec& spec,
                                            const std::vector<int>& n_values,
                                            int replicas,
                                            const std::vector<double>& rho_targets,
                                            RngStream rng, int threads = 0);

}  // namespace sofp::statistics
