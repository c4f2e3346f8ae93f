#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "sofp/rng.hpp"

namespace sofp {

using Complex = std::complex<double>;

/// Dense complex Hermitian matrix. The symmetry invariant
/// entries(j, i) == conj(entries(i, j)) holds exactly (componentwise double
/// equality, diagonal imaginary parts zero); constructors either enforce it
/// by mirroring or reject input that violates it.
class HermitianMatrix {
 public:
  /// Validates exact Hermitian symmetry of `m`; throws InvalidInputError.
  explicit HermitianMatrix(Eigen::MatrixXcd m);

  /// Keeps the upper triangle (including the real part of the diagonal) and
  /// mirrors it onto the lower triangle.
  static HermitianMatrix mirror_upper(const Eigen::MatrixXcd& m);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(const std::vector<double>& d);

  [[nodiscard]] int dim() const { return static_cast<int>(entries_.rows()); }
  [[nodiscard]] const Eigen::MatrixXcd& entries() const { return entries_; }
  [[nodiscard]] double trace_real() const { return entries_.trace().real(); }

 private:
  struct unchecked_tag {};
  HermitianMatrix(Eigen::MatrixXcd m, unchecked_tag) : entries_(std::move(m)) {}
  Eigen::MatrixXcd entries_;
};

/// Ascending real eigenvalues of one draw.
struct Spectrum {
  std::vector<double> values;

  [[nodiscard]] int dim() const { return static_cast<int>(values.size()); }
  [[nodiscard]] double sum() const;
  [[nodiscard]] double max_abs() const;
};

HermitianMatrix sample_gue(int n, RngStream rng);

HermitianMatrix sample_block_gaussian(const std::vector<HermitianMatrix>& blocks, int n,
                                      RngStream rng);

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the diagonal
/// of R rephased to be real positive. The rephasing is required; the raw Q of
/// a QR factorization is not Haar distributed.
Eigen::MatrixXcd sample_haar_unitary(int n, RngStream rng);

HermitianMatrix sample_additive(const HermitianMatrix& a, const HermitianMatrix& b,
                                RngStream rng);

/// Ascending eigenvalues via Householder tridiagonalization with implicit
/// shifts (Eigen's self-adjoint solver). Contract is the backward-error bound
/// ||X - Q L Q*|| <= c * dim * eps * ||X||, not the algorithm.
Spectrum eigenvalues(const HermitianMatrix& x);

/// max(|lambda_min|, |lambda_max|).
double operator_norm(const HermitianMatrix& x);
double operator_norm_spectrum(const Spectrum& s);

/// Ensemble family descriptor plus the tail cutoff M and Poincare constant K
/// attached to it. The size parameter n is supplied at sampling time: GUE
/// draws are n x n, block Gaussian draws are (d*n) x (d*n), and the additive
/// model has the fixed dimension of its summands.
class EnsembleSpec {
 public:
  struct Gue {};
  struct BlockGaussian {
    std::vector<HermitianMatrix> blocks;
  };
  struct AdditivePerturbation {
    HermitianMatrix a;
    HermitianMatrix b;
  };

  /// GUE with tail cutoff M (any M > 2 is admissible; default 3) and K = 1.
  static EnsembleSpec gue(double m_bound = 3.0);

  /// Block Gaussian sum A_k (x) GUE_k. M = 4 r max_k ||A_k||,
  /// K = r^2 ||sum A_k^2||^2.
  static EnsembleSpec block_gaussian(std::vector<HermitianMatrix> blocks);

  /// A + U B U* with Haar U. M = 2 max(||A||, ||B||), K = 4 max(||A||, ||B||)^2.
  static EnsembleSpec additive(HermitianMatrix a, HermitianMatrix b);

  [[nodiscard]] HermitianMatrix sample(int n, RngStream rng) const;
  [[nodiscard]] int dim(int n) const;
  [[nodiscard]] double m_bound() const { return m_bound_; }
  [[nodiscard]] double k_bound() const { return k_bound_; }
  [[nodiscard]] const std::string& kind() const { return kind_; }

 private:
  std::variant<Gue, BlockGaussian, AdditivePerturbation> family_;
  double m_bound_ = 0.0;
  double k_bound_ = 0.0;
  std::string kind_;
};

}  // namespace sofp
