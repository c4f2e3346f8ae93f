// sofp: config-driven experiment runner for the second-order fluctuation
// laboratory. Subcommands expose the library modules; every run is pinned to
// a seed and emits machine-readable CSV or JSON with the config hash in the
// header, so identical configs reproduce byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sofp/acceptance.hpp"
#include "sofp/ensembles.hpp"
#include "sofp/errors.hpp"
#include "sofp/frechet.hpp"
#include "sofp/io.hpp"
#include "sofp/moments.hpp"
#include "sofp/parallel.hpp"
#include "sofp/quadrature.hpp"
#include "sofp/statistics.hpp"
#include "sofp/transforms.hpp"

using json = nlohmann::json;
using namespace sofp;
namespace st = sofp::statistics;
namespace qd = sofp::quadrature;
namespace tr = sofp::transforms;
namespace fr = sofp::frechet;

namespace {

struct OutputSink {
  std::string path;     // empty: stdout
  std::string format;   // "csv" or "json"
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  void write(const std::string& csv_body, const json& json_body) const {
    std::ostringstream os;
    if (format == "csv") {
      char head[80];
      std::snprintf(head, sizeof(head), "# config_hash=%016llx seed=%llu\n",
                    static_cast<unsigned long long>(config_hash),
                    static_cast<unsigned long long>(seed));
      os << head << csv_body;
    } else {
      json wrapped;
      char hash_hex[20];
      std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                    static_cast<unsigned long long>(config_hash));
      wrapped["config_hash"] = hash_hex;
      wrapped["seed"] = seed;
      wrapped["data"] = json_body;
      os << wrapped.dump(2) << "\n";
    }
    if (path.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw ConfigError("cannot open output path: " + path);
      out << os.str();
    }
  }
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
}

template <typename T>
T field_or(const json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

std::uint64_t hash_config(json cfg) {
  cfg.erase("threads");  // worker count and output location do not affect results
  cfg.erase("out");
  return io::fnv1a(cfg.dump());
}

Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  throw ConfigError("config field '" + where + "': expected number or [re, im]");
}

HermitianMatrix parse_hermitian(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty())
    throw ConfigError("config field '" + where + "': expected a matrix");
  const std::size_t n = rows.size();
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n)
      throw ConfigError("config field '" + where + "': row " + std::to_string(i) +
                        " has wrong length");
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = parse_complex(rows[i][j], where);
  }
  return HermitianMatrix::mirror_upper(m);
}

EnsembleSpec parse_ensemble(const json& cfg) {
  const json ens = cfg.contains("ensemble") ? cfg.at("ensemble")
                                            : json{{"type", "gue"}};
  const std::string type = field_or<std::string>(ens, "type", "gue");
  if (type == "gue") return EnsembleSpec::gue(field_or<double>(ens, "m_bound", 3.0));
  if (type == "block_gaussian") {
    if (!ens.contains("blocks"))
      throw ConfigError("config field 'ensemble.blocks': required for block_gaussian");
    std::vector<HermitianMatrix> blocks;
    for (std::size_t k = 0; k < ens.at("blocks").size(); ++k)
      blocks.push_back(parse_hermitian(ens.at("blocks")[k],
                                       "ensemble.blocks[" + std::to_string(k) + "]"));
    return EnsembleSpec::block_gaussian(std::move(blocks));
  }
  if (type == "additive") {
    if (!ens.contains("a") || !ens.contains("b"))
      throw ConfigError("config fields 'ensemble.a'/'ensemble.b': required for additive");
    return EnsembleSpec::additive(parse_hermitian(ens.at("a"), "ensemble.a"),
                                  parse_hermitian(ens.at("b"), "ensemble.b"));
  }
  throw ConfigError("config field 'ensemble.type': unknown ensemble '" + type + "'");
}

st::TestFunction parse_test_function(const json& cfg, const std::string& key,
                                     const std::string& fallback) {
  if (!cfg.contains(key)) return st::tf_by_name(fallback);
  const json& v = cfg.at(key);
  if (v.is_string()) return st::tf_by_name(v.get<std::string>());
  if (v.is_object() && v.contains("poly")) {
    std::vector<double> coeffs;
    for (const auto& c : v.at("poly")) coeffs.push_back(c.get<double>());
    return st::tf_polynomial(coeffs);
  }
  throw ConfigError("config field '" + key + "': expected name or {\"poly\": [...]}");
}

std::string csv_complex_cols(const std::string& prefix) {
  return prefix + "_re," + prefix + "_im";
}

// --------------------------------------------------------------------------

int cmd_sample(const json& cfg, const OutputSink& sink, int threads) {
  const EnsembleSpec spec = parse_ensemble(cfg);
  const int n = field_or<int>(cfg, "n", 64);
  const int replicas = field_or<int>(cfg, "replicas", 1);
  if (replicas < 1) throw ConfigError("config field 'replicas': must be >= 1");
  const RngStream root{sink.seed, 0u};

  const std::string matrix_dump = field_or<std::string>(cfg, "dump_matrix", "");
  if (!matrix_dump.empty()) {
    std::ofstream out(matrix_dump, std::ios::binary);
    if (!out) throw ConfigError("cannot open output path: " + matrix_dump);
    io::write_matrix_binary(out, spec.sample(n, root.substream(0)));
  }

  std::vector<Spectrum> spectra(replicas);
  parallel_for(replicas, threads, [&](int r) {
    spectra[r] = eigenvalues(spec.sample(n, root.substream(r)));
  });

  std::ostringstream csv;
  csv << "replica,eigenvalues...\n";
  json rows = json::array();
  for (int r = 0; r < replicas; ++r) {
    csv << r;
    json row = json::array();
    for (double lam : spectra[r].values) {
      csv << "," << io::format_double(lam);
      row.push_back(lam);
    }
    csv << "\n";
    rows.push_back(row);
  }
  sink.write(csv.str(), json{{"spectra", rows}});
  return 0;
}

int cmd_covariance(const json& cfg, const OutputSink& sink, int threads) {
  const EnsembleSpec spec = parse_ensemble(cfg);
  const auto f = parse_test_function(cfg, "f", "id");
  const auto g = parse_test_function(cfg, "g", "id");
  const int n = field_or<int>(cfg, "n", 64);
  const int replicas = field_or<int>(cfg, "replicas", 2000);
  const auto est =
      st::covariance_mc(f, g, spec, n, replicas, RngStream{sink.seed, 1u}, threads);

  std::ostringstream csv;
  csv << "f,g,n,replicas," << csv_complex_cols("cov") << ",stderr\n"
      << f.name << "," << g.name << "," << n << "," << replicas << ","
      << io::format_double(est.value.real()) << "," << io::format_double(est.value.imag())
      << "," << io::format_double(est.std_error) << "\n";
  sink.write(csv.str(), json{{"f", f.name},
                             {"g", g.name},
                             {"n", n},
                             {"replicas", replicas},
                             {"cov_re", est.value.real()},
                             {"cov_im", est.value.imag()},
                             {"stderr", est.std_error}});
  return 0;
}

int cmd_g2(const json& cfg, const OutputSink& sink, int threads) {
  std::ostringstream csv;
  json data = json::object();

  if (field_or<bool>(cfg, "grid", false)) {
    // Closed-form table over paired grid points away from cut and diagonal.
    csv << "z_re,z_im,w_re,w_im," << csv_complex_cols("free") << ","
        << csv_complex_cols("ps") << ",abs_diff\n";
    json rows = json::array();
    const double lo = field_or<double>(cfg, "grid_min", -6.0);
    const double hi = field_or<double>(cfg, "grid_max", 6.0);
    const int steps = field_or<int>(cfg, "grid_steps", 5);
    if (steps < 2) throw ConfigError("config field 'grid_steps': must be >= 2");
    std::vector<Complex> pts;
    for (int i = 0; i < steps; ++i)
      for (int j = 0; j < steps; ++j) {
        const Complex z(lo + (hi - lo) * i / (steps - 1),
                        lo + (hi - lo) * j / (steps - 1));
        if (tr::distance_to_segment(z, 2.0) > 0.2) pts.push_back(z);
      }
    for (const Complex& z : pts)
      for (const Complex& w : pts) {
        if (std::abs(z - w) <= 0.2) continue;
        const Complex free_v = tr::g2_gue_free(z, w);
        const Complex ps_v = tr::g2_gue_ps(z, w);
        csv << io::format_double(z.real()) << "," << io::format_double(z.imag()) << ","
            << io::format_double(w.real()) << "," << io::format_double(w.imag()) << ","
            << io::format_double(free_v.real()) << "," << io::format_double(free_v.imag())
            << "," << io::format_double(ps_v.real()) << ","
            << io::format_double(ps_v.imag()) << ","
            << io::format_double(std::abs(free_v - ps_v)) << "\n";
        rows.push_back({z.real(), z.imag(), w.real(), w.imag(), free_v.real(),
                        free_v.imag(), ps_v.real(), ps_v.imag(),
                        std::abs(free_v - ps_v)});
      }
    data["grid"] = rows;
    sink.write(csv.str(), data);
    return 0;
  }

  const Complex z = cfg.contains("z") ? parse_complex(cfg.at("z"), "z") : Complex(0, 3);
  const Complex w = cfg.contains("w") ? parse_complex(cfg.at("w"), "w") : Complex(2, 2);
  csv << "quantity," << csv_complex_cols("value") << ",stderr_or_tail\n";

  const Complex free_v = tr::g2_gue_free(z, w);
  const Complex ps_v = tr::g2_gue_ps(z, w);
  csv << "closed_free," << io::format_double(free_v.real()) << ","
      << io::format_double(free_v.imag()) << ",0\n";
  csv << "closed_ps," << io::format_double(ps_v.real()) << ","
      << io::format_double(ps_v.imag()) << ",0\n";
  data["closed_free"] = {free_v.real(), free_v.imag()};
  data["closed_ps"] = {ps_v.real(), ps_v.imag()};

  if (cfg.contains("series_degree")) {
    const int degree = cfg.at("series_degree").get<int>();
    const auto table = moments::MomentTable::gue(degree);
    const auto series = moments::g2_series(z, w, degree, table);
    csv << "series_deg" << degree << "," << io::format_double(series.value.real()) << ","
        << io::format_double(series.value.imag()) << ","
        << io::format_double(series.tail_bound) << "\n";
    data["series"] = {{"degree", degree},
                      {"value", {series.value.real(), series.value.imag()}},
                      {"tail_bound", series.tail_bound}};
  }

  if (field_or<bool>(cfg, "empirical", false)) {
    const EnsembleSpec spec = parse_ensemble(cfg);
    const int n = field_or<int>(cfg, "n", 128);
    const int replicas = field_or<int>(cfg, "replicas", 2000);
    const auto est =
        tr::g2_empirical(spec, n, z, w, replicas, RngStream{sink.seed, 2u}, threads);
    csv << "empirical_n" << n << "," << io::format_double(est.value.real()) << ","
        << io::format_double(est.value.imag()) << "," << io::format_double(est.std_error)
        << "\n";
    data["empirical"] = {{"n", n},
                         {"replicas", replicas},
                         {"value", {est.value.real(), est.value.imag()}},
                         {"stderr", est.std_error},
                         {"norm_exceed_count", est.diagnostics.at("norm_exceed_count")}};
  }
  sink.write(csv.str(), data);
  return 0;
}

// Monomial coefficient list when the config names a polynomial test function.
std::optional<std::vector<double>> poly_coeffs_of(const json& cfg,
                                                  const std::string& key) {
  if (!cfg.contains(key)) return std::vector<double>{0.0, 1.0};  // default id
  const json& v = cfg.at(key);
  if (v.is_object() && v.contains("poly")) {
    std::vector<double> coeffs;
    for (const auto& c : v.at("poly")) coeffs.push_back(c.get<double>());
    return coeffs;
  }
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "id" || name == "x") return std::vector<double>{0.0, 1.0};
    if (name == "x^2" || name == "square") return std::vector<double>{0.0, 0.0, 1.0};
    if (name == "x^3" || name == "cube") return std::vector<double>{0.0, 0.0, 0.0, 1.0};
    if (name == "1" || name == "one") return std::vector<double>{1.0};
  }
  return std::nullopt;
}

int cmd_rho(const json& cfg, const OutputSink& sink, int) {
  const auto f = parse_test_function(cfg, "f", "id");
  const auto g = parse_test_function(cfg, "g", "id");
  if (!f.analytic || !g.analytic)
    throw ConfigError("rho: test functions must carry analytic extensions");
  const int nodes = field_or<int>(cfg, "nodes", 256);
  const double rz = field_or<double>(cfg, "radius_z", 3.0);
  const double rw = field_or<double>(cfg, "radius_w", 3.5);
  const double enclosed = field_or<double>(cfg, "enclosed", 2.0);
  const auto cz = qd::Contour::circle(0.0, rz, nodes, enclosed);
  const auto cw = qd::Contour::circle(0.0, rw, nodes, enclosed);
  const Complex via = qd::rho_via_contour(
      *f.analytic, *g.analytic, [](Complex z, Complex w) { return tr::g2_gue_free(z, w); },
      cz, cw);

  std::ostringstream csv;
  csv << "f,g,nodes," << csv_complex_cols("contour") << ",oracle,abs_diff\n";
  json data{{"f", f.name}, {"g", g.name}, {"nodes", nodes},
            {"contour", {via.real(), via.imag()}}};
  std::string oracle_cell = "nan", diff_cell = "nan";
  const auto p = poly_coeffs_of(cfg, "f");
  const auto q = poly_coeffs_of(cfg, "g");
  if (p && q && p->size() + q->size() >= 2 &&
      static_cast<int>(p->size() + q->size()) - 2 <= moments::kPairingCap) {
    const auto table =
        moments::MomentTable::gue(static_cast<int>(p->size() + q->size()) - 2);
    const double oracle = qd::rho_polynomial_reference(*p, *q, table);
    oracle_cell = io::format_double(oracle);
    diff_cell = io::format_double(std::abs(via - Complex(oracle, 0.0)));
    data["oracle"] = oracle;
    data["abs_diff"] = std::abs(via - Complex(oracle, 0.0));
  }
  csv << f.name << "," << g.name << "," << nodes << "," << io::format_double(via.real())
      << "," << io::format_double(via.imag()) << "," << oracle_cell << "," << diff_cell
      << "\n";
  sink.write(csv.str(), data);
  return 0;
}

double resolve_rho_target(const json& cfg, const st::TestFunction& f) {
  if (cfg.contains("rho_target") && cfg.at("rho_target").is_number())
    return cfg.at("rho_target").get<double>();
  // auto: exact bilinear oracle for polynomials, contour quadrature otherwise.
  if (f.analytic && f.analytic->name.rfind("x^", 0) == 0) {
    const int deg = std::atoi(f.analytic->name.c_str() + 2);
    std::vector<double> p(deg + 1, 0.0);
    p[deg] = 1.0;
    return qd::rho_polynomial_reference(p, p, moments::MomentTable::gue(2 * deg));
  }
  if (!f.analytic)
    throw ConfigError("clt: rho_target=auto needs an analytic test function");
  const Complex via = qd::rho_via_contour(
      *f.analytic, *f.analytic,
      [](Complex z, Complex w) { return tr::g2_gue_free(z, w); },
      qd::Contour::circle(0.0, 3.0, 256, 2.0), qd::Contour::circle(0.0, 3.5, 256, 2.0));
  return via.real();
}

int cmd_clt(const json& cfg, const OutputSink& sink, int threads) {
  const EnsembleSpec spec = parse_ensemble(cfg);
  const auto f = parse_test_function(cfg, "f", "id");
  std::vector<int> n_values = field_or<std::vector<int>>(cfg, "n_values", {16, 64, 256});
  const int replicas = field_or<int>(cfg, "replicas", 2000);
  const double rho_target = resolve_rho_target(cfg, f);
  const auto report = st::clt_experiment(f, spec, n_values, replicas, rho_target,
                                         RngStream{sink.seed, 3u}, threads);

  std::ostringstream csv;
  csv << "n,mean,mean_stderr,variance,variance_stderr,k3,k3_stderr,k4,k4_stderr,"
         "ks_statistic,ks_p_value,rho_target\n";
  json rows = json::array();
  for (const auto& row : report.rows) {
    csv << row.n << "," << io::format_double(row.mean) << ","
        << io::format_double(row.mean_std_error) << "," << io::format_double(row.variance)
        << "," << io::format_double(row.variance_std_error) << ","
        << io::format_double(row.k3) << "," << io::format_double(row.k3_std_error) << ","
        << io::format_double(row.k4) << "," << io::format_double(row.k4_std_error) << ","
        << io::format_double(row.ks_statistic) << "," << io::format_double(row.ks_p_value)
        << "," << io::format_double(report.rho_target) << "\n";
    rows.push_back({{"n", row.n},
                    {"mean", row.mean},
                    {"variance", row.variance},
                    {"variance_stderr", row.variance_std_error},
                    {"k3", row.k3},
                    {"k4", row.k4},
                    {"ks_statistic", row.ks_statistic},
                    {"ks_p_value", row.ks_p_value}});
  }
  sink.write(csv.str(), json{{"f", f.name},
                             {"rho_target", report.rho_target},
                             {"rows", rows},
                             {"k3_decreasing", report.k3_decreasing},
                             {"k4_decreasing", report.k4_decreasing},
                             {"ks_all_accepted_1pct", report.ks_all_accepted_1pct}});
  return 0;
}

int cmd_frechet(const json& cfg, const OutputSink& sink, int) {
  fr::FrechetMesh mesh = [&]() {
    if (cfg.contains("mesh")) return fr::FrechetMesh::load_csv(cfg.at("mesh"));
    const std::string kernel = field_or<std::string>(cfg, "kernel", "xy");
    const double m = field_or<double>(cfg, "m", 1.0);
    const int cells = field_or<int>(cfg, "cells", 64);
    if (kernel == "xy")
      return fr::FrechetMesh::from_callable(
          [](double x, double y) { return x * y; }, m, cells, cells);
    if (kernel == "separable_cubic")
      return fr::FrechetMesh::from_callable(
          [](double x, double y) { return x * x * x * y * y * y / 9.0; }, m, cells,
          cells);
    throw ConfigError("config field 'kernel': unknown kernel '" + kernel + "'");
  }();

  const auto f = parse_test_function(cfg, "f", "1");
  const auto g = parse_test_function(cfg, "g", "1");
  const Complex integral = fr::frechet_integral(f.eval, g.eval, mesh);
  const Complex rho = fr::rho_from_kernel(f, g, mesh);
  const double upper = fr::frechet_variation(mesh, fr::VariationMode::upper_bound);
  const bool exact_feasible = mesh.grid_x.size() <= 21;
  const double exact =
      exact_feasible ? fr::frechet_variation(mesh, fr::VariationMode::exact) : -1.0;

  std::ostringstream csv;
  csv << "f,g," << csv_complex_cols("integral") << "," << csv_complex_cols("rho")
      << ",variation_upper,variation_exact\n"
      << f.name << "," << g.name << "," << io::format_double(integral.real()) << ","
      << io::format_double(integral.imag()) << "," << io::format_double(rho.real()) << ","
      << io::format_double(rho.imag()) << "," << io::format_double(upper) << ","
      << (exact_feasible ? io::format_double(exact) : std::string("nan")) << "\n";
  json data{{"f", f.name},
            {"g", g.name},
            {"integral", {integral.real(), integral.imag()}},
            {"rho", {rho.real(), rho.imag()}},
            {"variation_upper", upper}};
  if (exact_feasible) data["variation_exact"] = exact;
  sink.write(csv.str(), data);
  return 0;
}

int cmd_check(const json& cfg, const OutputSink& sink, int threads) {
  acceptance::Options options;
  options.seed = sink.seed;
  options.threads = threads;
  options.only = field_or<std::vector<int>>(cfg, "only", {});
  const auto results = acceptance::run(options, std::cout);

  std::ostringstream csv;
  csv << "id,name,pass,seconds,detail\n";
  json rows = json::array();
  for (const auto& r : results) {
    std::string quoted = r.detail;
    for (char& c : quoted)
      if (c == ',') c = ';';
    csv << r.id << "," << r.name << "," << (r.pass ? 1 : 0) << ","
        << io::format_double(r.seconds) << "," << quoted << "\n";
    rows.push_back(
        {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  if (!sink.path.empty()) sink.write(csv.str(), json{{"criteria", rows}});
  return acceptance::all_passed(results) ? 0 : 1;
}

}  // namespace

json parse_ensemble_flag(const std::string& text) {
  // "gue", "gue:3.5", or "block-diag:1,-1" (one diagonal block). Anything
  // richer goes in the config file.
  if (text == "gue") return {{"type", "gue"}};
  if (text.rfind("gue:", 0) == 0)
    return {{"type", "gue"}, {"m_bound", std::stod(text.substr(4))}};
  if (text.rfind("block-diag:", 0) == 0) {
    std::stringstream ss(text.substr(11));
    std::string cell;
    std::vector<double> diag;
    while (std::getline(ss, cell, ',')) diag.push_back(std::stod(cell));
    if (diag.empty()) throw ConfigError("--ensemble block-diag: needs entries");
    json block = json::array();
    for (std::size_t i = 0; i < diag.size(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < diag.size(); ++j)
        row.push_back(i == j ? diag[i] : 0.0);
      block.push_back(row);
    }
    return {{"type", "block_gaussian"}, {"blocks", json::array({block})}};
  }
  throw ConfigError("--ensemble: expected gue, gue:<M>, or block-diag:<d1,d2,...>");
}

json parse_complex_flag(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return json(std::stod(text));
  return json::array(
      {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))});
}

int main(int argc, char** argv) {
  CLI::App app{"second-order fluctuation laboratory for random matrix ensembles"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format = "csv";
  std::uint64_t seed = 1;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "root seed (recorded in outputs)");
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "worker threads (0: auto, env SOFP_THREADS)");

  // Per-subcommand flags staged into the json config; the config file
  // provides anything not given on the command line.
  std::string flag_f, flag_g, flag_ensemble, flag_z, flag_w, flag_kernel, flag_mesh;
  std::string flag_dump_matrix, flag_rho_target;
  int flag_n = 0, flag_replicas = 0, flag_nodes = 0, flag_series_degree = 0;
  int flag_cells = 0;
  double flag_m = 0.0, flag_rz = 0.0, flag_rw = 0.0;
  std::vector<int> flag_n_values, flag_only;
  bool flag_grid = false, flag_empirical = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--f", flag_f, "test function name or poly:c0,c1,...");
    sub->add_option("--g", flag_g, "second test function");
    sub->add_option("--ensemble", flag_ensemble, "gue | gue:<M> | block-diag:<d,...>");
    sub->add_option("--n", flag_n, "matrix size parameter");
    sub->add_option("--replicas", flag_replicas, "Monte Carlo replicas");
  };

  CLI::App* sample = app.add_subcommand("sample", "draw matrices and dump spectra");
  add_common(sample);
  sample->add_option("--dump-matrix", flag_dump_matrix, "binary dump of draw 0");

  CLI::App* covariance =
      app.add_subcommand("covariance", "Monte Carlo covariance of two linear statistics");
  add_common(covariance);

  CLI::App* g2 = app.add_subcommand(
      "g2", "second-order Cauchy transform: closed forms, series, empirical");
  add_common(g2);
  g2->add_flag("--grid", flag_grid, "tabulate both closed forms over a grid");
  g2->add_flag("--empirical", flag_empirical, "add a Monte Carlo estimate");
  g2->add_option("--z", flag_z, "evaluation point, re[,im]");
  g2->add_option("--w", flag_w, "second point, re[,im]");
  g2->add_option("--series-degree", flag_series_degree, "truncation degree");

  CLI::App* rho =
      app.add_subcommand("rho", "limiting covariance via double contour integration");
  add_common(rho);
  rho->add_option("--nodes", flag_nodes, "quadrature nodes per contour");
  rho->add_option("--radius-z", flag_rz, "z-contour radius");
  rho->add_option("--radius-w", flag_rw, "w-contour radius");

  CLI::App* clt =
      app.add_subcommand("clt", "fluctuation experiment across matrix sizes");
  add_common(clt);
  clt->add_option("--n-values", flag_n_values, "matrix sizes")->delimiter(',');
  clt->add_option("--rho-target", flag_rho_target, "variance target or 'auto'");

  CLI::App* check = app.add_subcommand("check", "run the acceptance suite");
  check->add_option("--only", flag_only, "criterion ids")->delimiter(',');

  CLI::App* frechet =
      app.add_subcommand("frechet", "Frechet integral and variation of a kernel mesh");
  add_common(frechet);
  frechet->add_option("--mesh", flag_mesh, "mesh CSV path");
  frechet->add_option("--kernel", flag_kernel, "built-in kernel: xy | separable_cubic");
  frechet->add_option("--m", flag_m, "kernel half-width M");
  frechet->add_option("--cells", flag_cells, "mesh cells per axis");

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = load_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    auto has = [&](const char* flag) {
      const CLI::Option* opt = sub->get_option_no_throw(flag);
      return opt != nullptr && opt->count() > 0;
    };
    auto stage = [&](const char* flag, const char* key, const json& value) {
      if (has(flag)) cfg[key] = value;
    };
    if (name != "check") {
      if (has("--f")) {
        if (flag_f.rfind("poly:", 0) == 0) {
          json coeffs = json::array();
          std::stringstream ss(flag_f.substr(5));
          std::string cell;
          while (std::getline(ss, cell, ',')) coeffs.push_back(std::stod(cell));
          cfg["f"] = {{"poly", coeffs}};
        } else {
          cfg["f"] = flag_f;
        }
      }
      if (has("--g")) {
        if (flag_g.rfind("poly:", 0) == 0) {
          json coeffs = json::array();
          std::stringstream ss(flag_g.substr(5));
          std::string cell;
          while (std::getline(ss, cell, ',')) coeffs.push_back(std::stod(cell));
          cfg["g"] = {{"poly", coeffs}};
        } else {
          cfg["g"] = flag_g;
        }
      }
      if (has("--ensemble")) cfg["ensemble"] = parse_ensemble_flag(flag_ensemble);
      stage("--n", "n", flag_n);
      stage("--replicas", "replicas", flag_replicas);
    }
    stage("--dump-matrix", "dump_matrix", flag_dump_matrix);
    stage("--grid", "grid", true);
    stage("--empirical", "empirical", true);
    if (has("--z")) cfg["z"] = parse_complex_flag(flag_z);
    if (has("--w")) cfg["w"] = parse_complex_flag(flag_w);
    stage("--series-degree", "series_degree", flag_series_degree);
    stage("--nodes", "nodes", flag_nodes);
    stage("--radius-z", "radius_z", flag_rz);
    stage("--radius-w", "radius_w", flag_rw);
    if (has("--n-values")) cfg["n_values"] = flag_n_values;
    if (has("--rho-target") && flag_rho_target != "auto")
      cfg["rho_target"] = std::stod(flag_rho_target);
    if (has("--only")) cfg["only"] = flag_only;
    stage("--mesh", "mesh", flag_mesh);
    stage("--kernel", "kernel", flag_kernel);
    stage("--m", "m", flag_m);
    stage("--cells", "cells", flag_cells);

    // Global flags override config fields.
    if (app.count("--seed") || !cfg.contains("seed")) cfg["seed"] = seed;
    if (app.count("--threads") || !cfg.contains("threads")) cfg["threads"] = threads;
    if (app.count("--format") || !cfg.contains("format")) cfg["format"] = format;
    if (app.count("--out")) cfg["out"] = out_path;

    OutputSink sink;
    sink.path = field_or<std::string>(cfg, "out", "");
    sink.format = cfg.at("format").get<std::string>();
    sink.seed = cfg.at("seed").get<std::uint64_t>();
    sink.config_hash = hash_config(cfg);
    const int workers = cfg.at("threads").get<int>();

    if (name == "sample") return cmd_sample(cfg, sink, workers);
    if (name == "covariance") return cmd_covariance(cfg, sink, workers);
    if (name == "g2") return cmd_g2(cfg, sink, workers);
    if (name == "rho") return cmd_rho(cfg, sink, workers);
    if (name == "clt") return cmd_clt(cfg, sink, workers);
    if (name == "check") return cmd_check(cfg, sink, workers);
    if (name == "frechet") return cmd_frechet(cfg, sink, workers);
    std::cerr << "unknown subcommand\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
