#include "sofp/ensembles.hpp"

#include <cmath>
#include <utility>

#include "sofp/errors.hpp"

namespace sofp {

namespace {

bool exactly_hermitian(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) return false;
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    if (m(i, i).imag() != 0.0) return false;
    for (int j = i + 1; j < n; ++j) {
      if (m(i, j).real() != m(j, i).real() || m(i, j).imag() != -m(j, i).imag())
        return false;
    }
  }
  return true;
}

}  // namespace

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m) : entries_(std::move(m)) {
  if (entries_.rows() < 1) throw InvalidInputError("HermitianMatrix: dim must be >= 1");
  if (!exactly_hermitian(entries_))
    throw InvalidInputError("HermitianMatrix: input is not exactly Hermitian");
}

HermitianMatrix HermitianMatrix::mirror_upper(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw InvalidInputError("HermitianMatrix: input must be square, dim >= 1");
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXcd out(n, n);
  for (int i = 0; i < n; ++i) {
    out(i, i) = Complex(m(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      out(i, j) = m(i, j);
      out(j, i) = std::conj(m(i, j));
    }
  }
  return HermitianMatrix(std::move(out), unchecked_tag{});
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  if (dim < 1) throw InvalidInputError("HermitianMatrix: dim must be >= 1");
  return HermitianMatrix(Eigen::MatrixXcd::Zero(dim, dim), unchecked_tag{});
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  if (dim < 1) throw InvalidInputError("HermitianMatrix: dim must be >= 1");
  return HermitianMatrix(Eigen::MatrixXcd::Identity(dim, dim), unchecked_tag{});
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
  if (d.empty()) throw InvalidInputError("HermitianMatrix: dim must be >= 1");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return HermitianMatrix(std::move(m), unchecked_tag{});
}

double Spectrum::sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double Spectrum::max_abs() const {
  if (values.empty()) return 0.0;
  return std::max(std::abs(values.front()), std::abs(values.back()));
}

HermitianMatrix sample_gue(int n, RngStream rng) {
  if (n < 1) throw InvalidInputError("sample_gue: dimension must be >= 1");
  Rng gen(rng);
  // Diagonal ~ N_R(0, 1/n); off-diagonal complex with independent real and
  // imaginary parts of variance 1/(2n) each, so E|X_ij|^2 = 1/n.
  const double diag_sigma = 1.0 / std::sqrt(static_cast<double>(n));
  const double off_sigma = 1.0 / std::sqrt(2.0 * n);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = Complex(diag_sigma * gen.normal(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = gen.complex_normal(off_sigma);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return HermitianMatrix(std::move(m));
}

HermitianMatrix sample_block_gaussian(const std::vector<HermitianMatrix>& blocks, int n,
                                      RngStream rng) {
  if (blocks.empty()) throw InvalidInputError("sample_block_gaussian: need >= 1 block");
  if (n < 1) throw InvalidInputError("sample_block_gaussian: dimension must be >= 1");
  const int d = blocks.front().dim();
  for (const auto& blk : blocks) {
    if (blk.dim() != d)
      throw InvalidInputError("sample_block_gaussian: mismatched block dimensions");
  }
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d * n, d * n);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const HermitianMatrix x = sample_gue(n, rng.substream(k));
    const Eigen::MatrixXcd& a = blocks[k].entries();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (a(i, j) != Complex(0.0, 0.0))
          acc.block(i * n, j * n, n, n) += a(i, j) * x.entries();
  }
  return HermitianMatrix::mirror_upper(acc);
}

Eigen::MatrixXcd sample_haar_unitary(int n, RngStream rng) {
  if (n < 1) throw InvalidInputError("sample_haar_unitary: dimension must be >= 1");
  Rng gen(rng);
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gen.complex_normal(1.0);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    const Complex phase = mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

HermitianMatrix sample_additive(const HermitianMatrix& a, const HermitianMatrix& b,
                                RngStream rng) {
  if (a.dim() != b.dim()) throw InvalidInputError("sample_additive: dimension mismatch");
  const Eigen::MatrixXcd u = sample_haar_unitary(a.dim(), rng);
  const Eigen::MatrixXcd m = a.entries() + u * b.entries() * u.adjoint();
  // The product picks up O(eps) asymmetry; re-enforce the invariant exactly.
  return HermitianMatrix::mirror_upper(0.5 * (m + m.adjoint()));
}

Spectrum eigenvalues(const HermitianMatrix& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(x.entries(),
                                                         Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigenvalues: QL/QR iteration failed to converge (max " +
                       std::to_string(30 * x.dim()) + " implicit-shift sweeps)");
  Spectrum s;
  s.values.assign(solver.eigenvalues().data(),
                  solver.eigenvalues().data() + solver.eigenvalues().size());
  return s;
}

double operator_norm(const HermitianMatrix& x) {
  return eigenvalues(x).max_abs();
}

double operator_norm_spectrum(const Spectrum& s) { return s.max_abs(); }

EnsembleSpec EnsembleSpec::gue(double m_bound) {
  if (!(m_bound > 2.0)) throw InvalidInputError("EnsembleSpec: GUE needs M > 2");
  EnsembleSpec s;
  s.family_ = Gue{};
  s.m_bound_ = m_bound;
  s.k_bound_ = 1.0;
  s.kind_ = "gue";
  return s;
}

EnsembleSpec EnsembleSpec::block_gaussian(std::vector<HermitianMatrix> blocks) {
  if (blocks.empty()) throw InvalidInputError("EnsembleSpec: need >= 1 block");
  const int d = blocks.front().dim();
  double max_norm = 0.0;
  Eigen::MatrixXcd sum_sq = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& blk : blocks) {
    if (blk.dim() != d) throw InvalidInputError("EnsembleSpec: mismatched block dims");
    max_norm = std::max(max_norm, operator_norm(blk));
    sum_sq += blk.entries() * blk.entries();
  }
  const double r = static_cast<double>(blocks.size());
  const double sum_sq_norm = operator_norm(HermitianMatrix::mirror_upper(sum_sq));
  EnsembleSpec s;
  s.m_bound_ = 4.0 * r * max_norm;
  s.k_bound_ = r * r * sum_sq_norm * sum_sq_norm;
  s.kind_ = "block_gaussian";
  s.family_ = BlockGaussian{std::move(blocks)};
  return s;
}

EnsembleSpec EnsembleSpec::additive(HermitianMatrix a, HermitianMatrix b) {
  if (a.dim() != b.dim()) throw InvalidInputError("EnsembleSpec: dimension mismatch");
  const double t = std::max(operator_norm(a), operator_norm(b));
  EnsembleSpec s;
  s.m_bound_ = 2.0 * t;
  s.k_bound_ = 4.0 * t * t;
  s.kind_ = "additive";
  s.family_ = AdditivePerturbation{std::move(a), std::move(b)};
  return s;
}

HermitianMatrix EnsembleSpec::sample(int n, RngStream rng) const {
  if (const auto* g = std::get_if<Gue>(&family_)) {
    (void)g;
    return sample_gue(n, rng);
  }
  if (const auto* bg = std::get_if<BlockGaussian>(&family_))
    return sample_block_gaussian(bg->blocks, n, rng);
  const auto& ap = std::get<AdditivePerturbation>(family_);
  if (n != ap.a.dim())
    throw InvalidInputError("EnsembleSpec: additive family has fixed dimension " +
                            std::to_string(ap.a.dim()));
  return sample_additive(ap.a, ap.b, rng);
}

int EnsembleSpec::dim(int n) const {
  if (std::holds_alternative<Gue>(family_)) return n;
  if (const auto* bg = std::get_if<BlockGaussian>(&family_))
    return bg->blocks.front().dim() * n;
  return std::get<AdditivePerturbation>(family_).a.dim();
}

}  // namespace sofp
