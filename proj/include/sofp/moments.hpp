#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace sofp::moments {

using Complex = std::complex<double>;

/// Enumeration cap on m + n: (15)!! = 2,027,025 pairings, each processed in
/// O(m + n), keeps every oracle call under a second.
inline constexpr int kPairingCap = 16;

/// Pair partition of {0, ..., total-1} stored as an involution:
/// partner[partner[i]] == i and partner[i] != i.
struct PairPartition {
  std::vector<int> partner;

  /// True if some pair crosses the cut {0..m-1} | {m..total-1}.
  [[nodiscard]] bool connects(int m) const;
};

/// (total - 1)!! for even total, the number of pair partitions.
long long pairing_count(int total);

/// Yields each pair partition of {0, ..., total-1} exactly once. total must
/// be even and <= kPairingCap.
void enumerate_pairings(int total, const std::function<void(const PairPartition&)>& visit);

/// alpha_n of the semicircle law: Catalan(n/2) for even n, 0 for odd n.
double semicircle_moment(int n);

/// Polynomial in 1/N with integer coefficients; coeffs[k] multiplies N^{-k}.
struct InverseNPoly {
  std::vector<long long> coeffs;

  [[nodiscard]] double eval(double n) const;
  [[nodiscard]] long long constant_term() const { return coeffs.empty() ? 0 : coeffs[0]; }
  [[nodiscard]] bool is_zero() const;
};

/// Exact Cov(Tr X^m, Tr X^n) for GUE(N), all N at once, as a polynomial in
/// 1/N. Wick expansion: only pairings connecting the two trace cycles
/// contribute (subtracting E*E removes the rest), and a connecting pairing pi
/// contributes N^{e(pi)} with e(pi) = #cycles(gamma pi) - (m+n)/2, gamma the
/// two-cycle permutation (0..m-1)(m..m+n-1).
InverseNPoly gue_trace_covariance_exact(int m, int n);

/// alpha_{m,n} = N^0 coefficient of gue_trace_covariance_exact: the number of
/// connecting pairings of genus zero.
double second_order_moment(int m, int n);

/// (1/N) E Tr X^n for GUE(N) as a polynomial in 1/N (constant term alpha_n).
InverseNPoly gue_moment_exact(int n);

/// Same covariance enumeration with a caller-supplied weight per pairing;
/// used for block Gaussian predictions where each pairing also carries the
/// trace monomial of the blocks. Coefficient k multiplies N^{-k} with N the
/// inner GUE dimension.
struct WeightedCovariance {
  std::vector<Complex> coeffs;

  [[nodiscard]] Complex eval(double n) const;
};
WeightedCovariance trace_covariance_weighted(
    int m, int n, const std::function<Complex(const PairPartition&)>& weight);

/// Block Gaussian weight of one pairing: the sum over block-index assignments
/// (constant on pairs) of Tr(prod over cycle 1) * Tr(prod over cycle 2).
/// blocks are the d x d coefficient matrices A_k as plain Eigen matrices.
class BlockWeight {
 public:
  BlockWeight(std::vector<std::vector<std::vector<Complex>>> blocks, int m, int n);
  Complex operator()(const PairPartition& p) const;

 private:
  std::vector<std::vector<std::vector<Complex>>> blocks_;
  int m_, n_;
};

/// Exact first- and second-order moments with finite-N covariance polynomials.
struct MomentTable {
  int max_total_degree = 0;
  double m_envelope = 3.0;  // |alpha_{m,n}| <= k_envelope * m n M^{m+n-2}
  double k_envelope = 1.0;
  std::map<int, double> first_order;
  std::map<std::pair<int, int>, double> second_order;
  std::map<std::pair<int, int>, InverseNPoly> finite_n_cov;

  static MomentTable gue(int max_total_degree);

  [[nodiscard]] double alpha(int m, int n) const;

  /// JSON with the exact integer coefficients rendered as strings, so
  /// consumers are not limited to 53-bit integers.
  [[nodiscard]] std::string to_json() const;
};

/// Partial sum of G2(z,w) = sum alpha_{m,n} z^{-m-1} w^{-n-1} over
/// m + n <= max_total_degree, plus a rigorous bound on the discarded tail
/// obtained from |alpha_{m,n}| <= K m n M^{m+n-2} and geometric summation.
struct G2Series {
  Complex value;
  double tail_bound;
};
G2Series g2_series(Complex z, Complex w, int max_total_degree, const MomentTable& table);

}  // namespace sofp::moments
