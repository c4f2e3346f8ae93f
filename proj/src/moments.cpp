#include "sofp/moments.hpp"

#include <cmath>
#include <sstream>

#include "sofp/errors.hpp"

namespace sofp::moments {

bool PairPartition::connects(int m) const {
  for (int i = 0; i < m && i < static_cast<int>(partner.size()); ++i)
    if (partner[i] >= m) return true;
  return false;
}

long long pairing_count(int total) {
  if (total < 0 || total % 2 != 0)
    throw InvalidInputError("pairing_count: total must be even and >= 0");
  long long c = 1;
  for (int k = total - 1; k > 1; k -= 2) c *= k;
  return c;
}

void enumerate_pairings(int total,
                        const std::function<void(const PairPartition&)>& visit) {
  if (total % 2 != 0) throw InvalidInputError("enumerate_pairings: total must be even");
  if (total > kPairingCap)
    throw CapacityError("enumerate_pairings: total exceeds cap " +
                        std::to_string(kPairingCap));
  PairPartition p;
  p.partner.assign(total, -1);
  // Depth-first: always pair the smallest unpaired index, so each partition
  // appears exactly once.
  auto rec = [&](auto&& self) -> void {
    int first = -1;
    for (int i = 0; i < total; ++i) {
      if (p.partner[i] < 0) {
        first = i;
        break;
      }
    }
    if (first < 0) {
      visit(p);
      return;
    }
    for (int j = first + 1; j < total; ++j) {
      if (p.partner[j] >= 0) continue;
      p.partner[first] = j;
      p.partner[j] = first;
      self(self);
      p.partner[first] = -1;
      p.partner[j] = -1;
    }
  };
  rec(rec);
}

double semicircle_moment(int n) {
  if (n < 0) throw InvalidInputError("semicircle_moment: n must be >= 0");
  if (n % 2 != 0) return 0.0;
  // Catalan numbers via C_0 = 1, C_{k+1} = C_k * 2(2k+1) / (k+2); the product
  // is always divisible so the integer arithmetic is exact.
  long long c = 1;
  for (int k = 0; k < n / 2; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return static_cast<double>(c);
}

double InverseNPoly::eval(double n) const {
  double acc = 0.0;
  double scale = 1.0;
  for (long long c : coeffs) {
    acc += static_cast<double>(c) * scale;
    scale /= n;
  }
  return acc;
}

bool InverseNPoly::is_zero() const {
  for (long long c : coeffs)
    if (c != 0) return false;
  return true;
}

namespace {

// gamma with cycles (0..m-1)(m..m+n-1); n may be zero (single cycle).
std::vector<int> two_cycle_permutation(int m, int n) {
  std::vector<int> g(m + n);
  for (int i = 0; i < m; ++i) g[i] = (i + 1) % m;
  for (int j = 0; j < n; ++j) g[m + j] = m + (j + 1) % n;
  return g;
}

int cycle_count(const std::vector<int>& gamma, const std::vector<int>& partner,
                std::vector<char>& visited) {
  const int total = static_cast<int>(gamma.size());
  visited.assign(total, 0);
  int cycles = 0;
  for (int start = 0; start < total; ++start) {
    if (visited[start]) continue;
    ++cycles;
    int i = start;
    while (!visited[i]) {
      visited[i] = 1;
      i = gamma[partner[i]];
    }
  }
  return cycles;
}

void check_cov_args(int m, int n) {
  if (m < 1 || n < 1)
    throw InvalidInputError("trace covariance: m and n must be >= 1");
  if (m + n > kPairingCap)
    throw CapacityError("trace covariance: m + n exceeds cap " +
                        std::to_string(kPairingCap));
}

}  // namespace

InverseNPoly gue_trace_covariance_exact(int m, int n) {
  check_cov_args(m, n);
  InverseNPoly poly;
  if ((m + n) % 2 != 0) return poly;  // no pairings, covariance is zero
  const std::vector<int> gamma = two_cycle_permutation(m, n);
  std::vector<char> visited;
  poly.coeffs.assign(m + n, 0);
  enumerate_pairings(m + n, [&](const PairPartition& p) {
    if (!p.connects(m)) return;
    const int cycles = cycle_count(gamma, p.partner, visited);
    const int e = cycles - (m + n) / 2;
    if (e > 0)
      throw NumericError("gue_trace_covariance_exact: positive Euler exponent");
    poly.coeffs[-e] += 1;
  });
  while (poly.coeffs.size() > 1 && poly.coeffs.back() == 0) poly.coeffs.pop_back();
  return poly;
}

double second_order_moment(int m, int n) {
  return static_cast<double>(gue_trace_covariance_exact(m, n).constant_term());
}

InverseNPoly gue_moment_exact(int n) {
  if (n < 0) throw InvalidInputError("gue_moment_exact: n must be >= 0");
  if (n > kPairingCap)
    throw CapacityError("gue_moment_exact: n exceeds cap " + std::to_string(kPairingCap));
  InverseNPoly poly;
  if (n == 0) {
    poly.coeffs = {1};
    return poly;
  }
  if (n % 2 != 0) return poly;
  const std::vector<int> gamma = two_cycle_permutation(n, 0);
  std::vector<char> visited;
  poly.coeffs.assign(n, 0);
  enumerate_pairings(n, [&](const PairPartition& p) {
    const int cycles = cycle_count(gamma, p.partner, visited);
    const int e = cycles - n / 2 - 1;  // extra 1/N normalization of the trace
    if (e > 0) throw NumericError("gue_moment_exact: positive Euler exponent");
    poly.coeffs[-e] += 1;
  });
  while (poly.coeffs.size() > 1 && poly.coeffs.back() == 0) poly.coeffs.pop_back();
  return poly;
}

Complex WeightedCovariance::eval(double n) const {
  Complex acc{0.0, 0.0};
  double scale = 1.0;
  for (const Complex& c : coeffs) {
    acc += c * scale;
    scale /= n;
  }
  return acc;
}

WeightedCovariance trace_covariance_weighted(
    int m, int n, const std::function<Complex(const PairPartition&)>& weight) {
  check_cov_args(m, n);
  WeightedCovariance out;
  if ((m + n) % 2 != 0) return out;
  const std::vector<int> gamma = two_cycle_permutation(m, n);
  std::vector<char> visited;
  out.coeffs.assign(m + n, Complex{0.0, 0.0});
  enumerate_pairings(m + n, [&](const PairPartition& p) {
    if (!p.connects(m)) return;
    const int cycles = cycle_count(gamma, p.partner, visited);
    const int e = cycles - (m + n) / 2;
    out.coeffs[-e] += weight(p);
  });
  while (out.coeffs.size() > 1 && out.coeffs.back() == Complex{0.0, 0.0})
    out.coeffs.pop_back();
  return out;
}

BlockWeight::BlockWeight(std::vector<std::vector<std::vector<Complex>>> blocks, int m,
                         int n)
    : blocks_(std::move(blocks)), m_(m), n_(n) {
  if (blocks_.empty()) throw InvalidInputError("BlockWeight: need >= 1 block");
}

Complex BlockWeight::operator()(const PairPartition& p) const {
  const int total = m_ + n_;
  const int pairs = total / 2;
  const int r = static_cast<int>(blocks_.size());
  double assignments = std::pow(static_cast<double>(r), pairs);
  if (assignments > 1e6)
    throw CapacityError("BlockWeight: too many block assignments");

  // Pair index of each element.
  std::vector<int> pair_of(total, -1);
  int next = 0;
  for (int i = 0; i < total; ++i) {
    if (pair_of[i] >= 0) continue;
    pair_of[i] = next;
    pair_of[p.partner[i]] = next;
    ++next;
  }

  const int d = static_cast<int>(blocks_.front().size());
  auto cycle_trace = [&](int begin, int len, const std::vector<int>& kappa) {
    // Tr(A_{k(begin)} A_{k(begin+1)} ... ), products of d x d blocks.
    std::vector<std::vector<Complex>> prod(d, std::vector<Complex>(d, {0.0, 0.0}));
    for (int i = 0; i < d; ++i) prod[i][i] = 1.0;
    for (int s = 0; s < len; ++s) {
      const auto& a = blocks_[kappa[pair_of[begin + s]]];
      std::vector<std::vector<Complex>> nextp(d, std::vector<Complex>(d, {0.0, 0.0}));
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
          if (prod[i][k] == Complex{0.0, 0.0}) continue;
          for (int j = 0; j < d; ++j) nextp[i][j] += prod[i][k] * a[k][j];
        }
      prod = std::move(nextp);
    }
    Complex tr{0.0, 0.0};
    for (int i = 0; i < d; ++i) tr += prod[i][i];
    return tr;
  };

  Complex total_weight{0.0, 0.0};
  std::vector<int> kappa(pairs, 0);
  while (true) {
    total_weight += cycle_trace(0, m_, kappa) * cycle_trace(m_, n_, kappa);
    int pos = 0;
    while (pos < pairs && ++kappa[pos] == r) kappa[pos++] = 0;
    if (pos == pairs) break;
  }
  return total_weight;
}

MomentTable MomentTable::gue(int max_total_degree) {
  if (max_total_degree < 0 || max_total_degree > kPairingCap)
    throw CapacityError("MomentTable: degree must be in [0, " +
                        std::to_string(kPairingCap) + "]");
  MomentTable t;
  t.max_total_degree = max_total_degree;
  for (int n = 0; n <= max_total_degree; ++n) t.first_order[n] = semicircle_moment(n);
  for (int m = 1; m < max_total_degree; ++m) {
    for (int n = 1; m + n <= max_total_degree; ++n) {
      InverseNPoly poly = gue_trace_covariance_exact(m, n);
      t.second_order[{m, n}] = static_cast<double>(poly.constant_term());
      t.finite_n_cov[{m, n}] = std::move(poly);
    }
  }
  return t;
}

double MomentTable::alpha(int m, int n) const {
  const auto it = second_order.find({m, n});
  if (it == second_order.end())
    throw CapacityError("MomentTable: alpha(" + std::to_string(m) + "," +
                        std::to_string(n) + ") beyond table degree");
  return it->second;
}

std::string MomentTable::to_json() const {
  std::ostringstream os;
  os << "{\"max_total_degree\":" << max_total_degree << ",\"first_order\":{";
  bool first = true;
  for (const auto& [n, v] : first_order) {
    if (!first) os << ",";
    first = false;
    os << "\"" << n << "\":\"" << static_cast<long long>(v) << "\"";
  }
  os << "},\"second_order\":{";
  first = true;
  for (const auto& [mn, v] : second_order) {
    if (!first) os << ",";
    first = false;
    os << "\"" << mn.first << "," << mn.second << "\":\"" << static_cast<long long>(v)
       << "\"";
  }
  os << "},\"finite_n_cov\":{";
  first = true;
  for (const auto& [mn, poly] : finite_n_cov) {
    if (!first) os << ",";
    first = false;
    os << "\"" << mn.first << "," << mn.second << "\":[";
    for (std::size_t k = 0; k < poly.coeffs.size(); ++k) {
      if (k) os << ",";
      os << "\"" << poly.coeffs[k] << "\"";
    }
    os << "]";
  }
  os << "}}";
  return os.str();
}

G2Series g2_series(Complex z, Complex w, int max_total_degree, const MomentTable& table) {
  const double m_env = table.m_envelope;
  if (std::abs(z) <= m_env || std::abs(w) <= m_env)
    throw DomainError("g2_series: need |z| > M and |w| > M with M = " +
                      std::to_string(m_env));
  if (max_total_degree > table.max_total_degree)
    throw CapacityError("g2_series: requested degree beyond table");

  // Terms are grouped (m,n) with (n,m); complex + and * are commutative
  // bitwise, so g2_series(z, w) == g2_series(w, z) exactly.
  Complex value{0.0, 0.0};
  for (int m = 1; 2 * m <= max_total_degree; ++m) {
    const double diag = table.alpha(m, m);
    if (diag != 0.0) value += diag / (std::pow(z, m + 1) * std::pow(w, m + 1));
    for (int n = m + 1; m + n <= max_total_degree; ++n) {
      const double a = table.alpha(m, n);
      if (a == 0.0) continue;
      value += a / (std::pow(z, m + 1) * std::pow(w, n + 1)) +
               a / (std::pow(z, n + 1) * std::pow(w, m + 1));
    }
  }

  // Tail of sum_{m+n > D} K m n M^{m+n-2} |z|^{-m-1} |w|^{-n-1}. With
  // a = M/|z|, b = M/|w| the full double sum is ab / ((1-a)^2 (1-b)^2) times
  // K / (M^2 |z| |w|); subtracting the kept terms exactly leaves the tail.
  const double a = m_env / std::abs(z);
  const double b = m_env / std::abs(w);
  const double full = a * b / ((1.0 - a) * (1.0 - a) * (1.0 - b) * (1.0 - b));
  double kept = 0.0;
  for (int m = 1; m < max_total_degree; ++m)
    for (int n = 1; m + n <= max_total_degree; ++n)
      kept += m * std::pow(a, m) * n * std::pow(b, n);
  const double tail = table.k_envelope * std::max(full - kept, 0.0) /
                      (m_env * m_env * std::abs(z) * std::abs(w));
  return {value, tail};
}

}  // namespace sofp::moments
