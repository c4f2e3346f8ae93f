#include "sofp/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <sstream>

#include "sofp/ensembles.hpp"
#include "sofp/frechet.hpp"
#include "sofp/moments.hpp"
#include "sofp/quadrature.hpp"
#include "sofp/rng.hpp"
#include "sofp/statistics.hpp"
#include "sofp/transforms.hpp"

namespace sofp::acceptance {

namespace {

using Complex = std::complex<double>;
namespace qd = sofp::quadrature;
namespace st = sofp::statistics;
namespace tr = sofp::transforms;
namespace fr = sofp::frechet;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// 1. GUE G2 formula identity on a 400-pair grid away from cut and diagonal.
Outcome criterion_formula_identity(const Options&) {
  std::vector<Complex> zs, ws;
  for (double re = -6.0; re <= 6.0; re += 2.0)
    for (double im = -6.0; im <= 6.0; im += 2.0)
      if (tr::distance_to_segment({re, im}, 2.0) > 0.2) zs.emplace_back(re, im);
  for (double re = -5.5; re <= 5.5; re += 2.2)
    for (double im = -5.7; im <= 5.7; im += 2.28)
      if (tr::distance_to_segment({re, im}, 2.0) > 0.2) ws.emplace_back(re, im);

  int pairs = 0;
  double max_diff = 0.0;
  for (const Complex& z : zs) {
    for (const Complex& w : ws) {
      if (pairs >= 400) break;
      if (std::abs(z - w) <= 0.2) continue;
      max_diff = std::max(max_diff, std::abs(tr::g2_gue_free(z, w) - tr::g2_gue_ps(z, w)));
      ++pairs;
    }
  }
  Outcome out;
  out.pass = pairs >= 400 && max_diff < 1e-10;
  out.detail = "max |free - ps| = " + fmt(max_diff) + " over " + std::to_string(pairs) +
               " pairs (tol 1e-10)";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Contour integrals reproduce the Wick oracle for all monomials m, n <= 5.
Outcome criterion_contour_oracle(const Options&) {
  const auto table = moments::MomentTable::gue(10);
  const qd::Contour cz = qd::Contour::circle(0.0, 3.0, 256, 2.0);
  const qd::Contour cw = qd::Contour::circle(0.0, 3.5, 256, 2.0);
  auto g2 = [](Complex z, Complex w) { return tr::g2_gue_free(z, w); };

  Outcome out;
  if (table.alpha(1, 1) != 1.0 || table.alpha(2, 2) != 2.0) {
    out.detail = "oracle sanity failed: alpha_{1,1} or alpha_{2,2} off";
    return out;
  }
  double worst = 0.0;
  for (int m = 1; m <= 5; ++m) {
    for (int n = 1; n <= 5; ++n) {
      const Complex via = qd::rho_via_contour(qd::AnalyticFunction::monomial(m),
                                              qd::AnalyticFunction::monomial(n), g2, cz,
                                              cw);
      worst = std::max(worst, std::abs(via - Complex(table.alpha(m, n), 0.0)));
    }
  }
  out.pass = worst < 1e-7;
  out.detail = "max |contour - oracle| = " + fmt(worst) +
               " over m,n <= 5 (tol 1e-7); alpha_11 = 1, alpha_22 = 2 exact";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Series partial sums agree with the closed form within the rigorous tail.
Outcome criterion_series_consistency(const Options&) {
  const auto table = moments::MomentTable::gue(12);
  const Complex z(4.0, 0.0), w(0.0, 4.0);
  const auto series = moments::g2_series(z, w, 12, table);
  const double diff = std::abs(series.value - tr::g2_gue_free(z, w));
  Outcome out;
  out.pass = diff <= series.tail_bound && series.tail_bound > 0.0;
  out.detail = "|series - closed| = " + fmt(diff) + " <= tail bound " +
               fmt(series.tail_bound) + " at (4, 4i), degree 12";
  return out;
}

// ---------------------------------------------------------------------------
// 4. Empirical resolvent covariance at GUE(256) matches the closed form.
Outcome criterion_empirical_g2(const Options& opt) {
  const Complex z(0.0, 3.0), w(2.0, 2.0);
  const auto est = tr::g2_empirical(EnsembleSpec::gue(), 256, z, w, 4000,
                                    RngStream{opt.seed, 40u}, opt.threads);
  const double diff = std::abs(est.value - tr::g2_gue_free(z, w));
  Outcome out;
  out.pass = diff <= 3.0 * est.std_error && est.std_error < 0.02;
  out.detail = "|estimate - closed| = " + fmt(diff) + ", 3 stderr = " +
               fmt(3.0 * est.std_error) + ", stderr = " + fmt(est.std_error) +
               " (< 0.02), exceedances = " +
               std::to_string(static_cast<int>(est.diagnostics.at("norm_exceed_count")));
  return out;
}

// ---------------------------------------------------------------------------
// 5. CLT: Tr X exactly Gaussian at every N; Tr X^2 variance 2 and k4 decay.
Outcome criterion_clt(const Options& opt) {
  const auto reports = st::clt_experiment_multi(
      {st::tf_identity(), st::tf_square()}, EnsembleSpec::gue(), {16, 64, 256}, 10000,
      {1.0, 2.0}, RngStream{opt.seed, 50u}, opt.threads);
  const auto& id_rep = reports[0];
  const auto& sq_rep = reports[1];

  bool pass = true;
  std::ostringstream detail;
  detail << "id: KS p =";
  for (const auto& row : id_rep.rows) {
    detail << " " << fmt(row.ks_p_value);
    if (row.ks_p_value <= 0.01) pass = false;
  }
  detail << " (all > 0.01); x^2: var(3se) =";
  for (const auto& row : sq_rep.rows) {
    detail << " " << fmt(row.variance) << "(" << fmt(3.0 * row.variance_std_error) << ")";
    if (std::abs(row.variance - 2.0) > 3.0 * row.variance_std_error) pass = false;
  }
  const double k4_first = std::abs(sq_rep.rows.front().k4);
  const double k4_last = std::abs(sq_rep.rows.back().k4);
  detail << "; |k4| " << fmt(k4_first) << " -> " << fmt(k4_last);
  if (!(k4_last < k4_first)) pass = false;
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. Poincare inequality suite.
Outcome criterion_poincare(const Options& opt) {
  const EnsembleSpec gue = EnsembleSpec::gue();
  const EnsembleSpec block =
      EnsembleSpec::block_gaussian({HermitianMatrix::diagonal({1.0, -1.0})});

  const auto sin_gue =
      st::poincare_check(st::tf_sin(), gue, 64, 10000, RngStream{opt.seed, 60u},
                         opt.threads);
  const auto id_gue =
      st::poincare_check(st::tf_identity(), gue, 64, 10000, RngStream{opt.seed, 61u},
                         opt.threads);
  const auto sin_block =
      st::poincare_check(st::tf_sin(), block, 32, 10000, RngStream{opt.seed, 62u},
                         opt.threads);

  Outcome out;
  out.pass = sin_gue.pass && id_gue.pass && sin_block.pass;
  out.detail = "var/bound: sin on GUE " + fmt(sin_gue.ratio) + ", id on GUE " +
               fmt(id_gue.ratio) + ", sin on block " + fmt(sin_block.ratio) +
               " (all without significant violation)";
  return out;
}

// ---------------------------------------------------------------------------
// 7. Tail suite: no exceedances at the ensemble cutoffs.
Outcome criterion_tail(const Options& opt) {
  const auto gue_tail = st::tail_fraction(EnsembleSpec::gue(), 128, 3.0, 10000,
                                          RngStream{opt.seed, 70u}, opt.threads);

  std::vector<double> a(64), b(64);
  for (int i = 0; i < 64; ++i) {
    a[i] = (i % 2 == 0) ? 1.0 : -1.0;
    b[i] = (i % 4 < 2) ? 1.0 : -1.0;
  }
  const EnsembleSpec add = EnsembleSpec::additive(HermitianMatrix::diagonal(a),
                                                  HermitianMatrix::diagonal(b));
  const auto add_tail =
      st::tail_fraction(add, 64, 2.0, 2000, RngStream{opt.seed, 71u}, opt.threads);

  Outcome out;
  out.pass = gue_tail.value.real() == 0.0 && add_tail.value.real() == 0.0;
  out.detail = "GUE(128), M=3: fraction " + fmt(gue_tail.value.real()) +
               " of 1e4; additive ||A||=||B||=1, M=2: fraction " +
               fmt(add_tail.value.real()) + " of 2e3";
  return out;
}

// ---------------------------------------------------------------------------
// 8. Truncation inequality diagnostic at GUE(8), M = 2.
Outcome criterion_truncation(const Options& opt) {
  const auto rep = st::truncation_gap(st::tf_sin(), st::tf_sin(), EnsembleSpec::gue(), 8,
                                      2.0, 10000, RngStream{opt.seed, 80u}, opt.threads);
  Outcome out;
  out.pass = rep.within_bound && rep.tail_fraction > 0.0;
  out.detail = "gap = " + fmt(rep.gap) + " <= bound " + fmt(rep.bound) + " + 4 stderr " +
               fmt(4.0 * rep.gap_std_error) + " (tail fraction " +
               fmt(rep.tail_fraction) + ")";
  return out;
}

// ---------------------------------------------------------------------------
// 9. Frechet suite: separable reduction, exact variation, theorem bound.
Outcome criterion_frechet(const Options& opt) {
  Outcome out;
  std::ostringstream detail;

  // Separable kernel vs 1-D quadrature product, two dyadic refinements.
  const auto u = [](double x, double y) { return (x * x * x / 3.0) * (y * y * y / 3.0); };
  const auto f = [](double x) { return Complex(std::exp(x), 0.0); };
  const auto g = [](double y) { return Complex(std::cos(y), 0.0); };
  auto simpson = [](const std::function<double(double)>& h) {
    const int cells = 4000;
    const double step = 2.0 / cells;
    double acc = h(-1.0) + h(1.0);
    for (int i = 1; i < cells; ++i) acc += (i % 2 ? 4.0 : 2.0) * h(-1.0 + i * step);
    return acc * step / 3.0;
  };
  const double oracle = simpson([](double x) { return std::exp(x) * x * x; }) *
                        simpson([](double y) { return std::cos(y) * y * y; });
  // 256 -> 512 -> 1024 cells.
  const auto step2 = fr::frechet_integral_refined(f, g, u, 1.0, 512, 512);
  const double sep_err = std::abs(step2.refined - Complex(oracle, 0.0));
  const bool sep_ok = sep_err < 1e-6;
  detail << "separable error " << fmt(sep_err) << " (tol 1e-6)";

  // Exact Frechet variation of u = xy on [-1, 1]^2.
  const auto prod_mesh = fr::FrechetMesh::from_callable(
      [](double x, double y) { return x * y; }, 1.0, 12, 12);
  const double variation = fr::frechet_variation(prod_mesh, fr::VariationMode::exact);
  const bool var_ok = std::abs(variation - 4.0) < 1e-12;
  detail << "; variation(xy) = " << fmt(variation);

  // |Phi(f, g)| <= ||f|| ||g|| * variation on randomized polynomials.
  const auto wavy_mesh = fr::FrechetMesh::from_callable(
      [](double x, double y) { return x * y + 0.25 * std::sin(3.0 * x - 2.0 * y); }, 1.0,
      20, 20);
  bool bound_ok = true;
  for (const auto& mesh : {prod_mesh, wavy_mesh}) {
    const double majorant = fr::frechet_variation(mesh, fr::VariationMode::upper_bound);
    Rng gen(RngStream{opt.seed, 90u});
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> pc(5), qc(5);
      for (double& c : pc) c = 2.0 * gen.uniform01() - 1.0;
      for (double& c : qc) c = 2.0 * gen.uniform01() - 1.0;
      const auto p = st::tf_polynomial(pc, "p");
      const auto q = st::tf_polynomial(qc, "q");
      const Complex phi = fr::frechet_integral(p.eval, q.eval, mesh);
      if (std::abs(phi) > p.sup_on(1.0) * q.sup_on(1.0) * majorant + 1e-12)
        bound_ok = false;
    }
  }
  detail << "; theorem bound on 100 random polynomial pairs x 2 kernels "
         << (bound_ok ? "held" : "violated");

  out.pass = sep_ok && var_ok && bound_ok;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// 10. Quadrature robustness: radius invariance, realness, symmetry, decay.
Outcome criterion_quadrature(const Options&) {
  auto g2 = [](Complex z, Complex w) { return tr::g2_gue_free(z, w); };
  const auto f2 = qd::AnalyticFunction::monomial(2);

  std::vector<Complex> values;
  for (double rz : {2.5, 3.0, 4.0})
    values.push_back(qd::rho_via_contour(f2, f2, g2,
                                         qd::Contour::circle(0.0, rz, 256, 2.0),
                                         qd::Contour::circle(0.0, rz + 0.5, 256, 2.0)));
  double radius_spread = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      radius_spread = std::max(radius_spread, std::abs(values[i] - values[j]));

  const auto f = qd::AnalyticFunction::polynomial({0.0, 1.0, 0.5}, "x + x^2/2");
  const auto g = qd::AnalyticFunction::polynomial({0.0, -1.0, 0.0, 2.0}, "2x^3 - x");
  const qd::Contour cz = qd::Contour::circle(0.0, 3.0, 256, 2.0);
  const qd::Contour cw = qd::Contour::circle(0.0, 3.5, 256, 2.0);
  const Complex fg = qd::rho_via_contour(f, g, g2, cz, cw);
  const Complex gf = qd::rho_via_contour(g, f, g2, cz, cw);
  const double imag_part = std::abs(fg.imag());
  const double asymmetry = std::abs(fg - gf);

  const auto f1 = qd::AnalyticFunction::monomial(1);
  auto eval = [&](int nodes) {
    return qd::rho_via_contour(f1, f1, g2, cz.with_nodes(nodes), cw.with_nodes(nodes));
  };
  const auto sweep = qd::convergence_sweep(eval, {32, 64, 128, 256});
  bool monotone = true;
  for (std::size_t i = 2; i < sweep.size(); ++i)
    if (sweep[i].successive_diff >= sweep[i - 1].successive_diff) monotone = false;
  const bool converged = sweep.back().successive_diff < 1e-8;

  Outcome out;
  out.pass = radius_spread < 1e-8 && imag_part < 1e-9 && asymmetry < 1e-9 && monotone &&
             converged;
  out.detail = "radius spread " + fmt(radius_spread) + ", |Im| " + fmt(imag_part) +
               ", |rho(f,g) - rho(g,f)| " + fmt(asymmetry) + ", sweep diffs " +
               fmt(sweep[1].successive_diff) + " -> " + fmt(sweep.back().successive_diff);
  return out;
}

}  // namespace

std::vector<CriterionResult> run(const Options& options, std::ostream& log) {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome(const Options&)> fn;
  };
  const std::vector<Entry> entries = {
      {1, "GUE G2 formula identity", criterion_formula_identity},
      {2, "contour-oracle equivalence", criterion_contour_oracle},
      {3, "series vs closed form within tail bound", criterion_series_consistency},
      {4, "empirical resolvent covariance at GUE(256)", criterion_empirical_g2},
      {5, "CLT for Tr X and Tr X^2", criterion_clt},
      {6, "Poincare inequality suite", criterion_poincare},
      {7, "operator-norm tail suite", criterion_tail},
      {8, "truncation inequality diagnostic", criterion_truncation},
      {9, "Frechet integral suite", criterion_frechet},
      {10, "quadrature robustness", criterion_quadrature},
  };

  std::vector<CriterionResult> results;
  for (const auto& entry : entries) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), entry.id) ==
            options.only.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    res.id = entry.id;
    res.name = entry.name;
    try {
      const Outcome out = entry.fn(options);
      res.pass = out.pass;
      res.detail = out.detail;
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << ". " << res.name << ": "
        << res.detail << "  [" << fmt(res.seconds) << "s]\n"
        << std::flush;
    results.push_back(std::move(res));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  if (results.empty()) return false;
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace sofp::acceptance
