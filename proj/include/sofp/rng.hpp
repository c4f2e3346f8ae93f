#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace sofp {

/// Identifies one reproducible random stream. Equal (seed, stream_id) pairs
/// reproduce identical draw sequences; distinct stream_ids give streams that
/// are statistically independent.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Stream for sub-task k of this stream, derived by key mixing. Replica r
  /// of an experiment runs on substream(r) so results do not depend on the
  /// thread schedule.
  [[nodiscard]] RngStream substream(std::uint64_t k) const;
};

/// 64-bit finalizing mixer (splitmix64); also used to hash seeds into
/// generator state.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic uniform/Gaussian source. Backed by mt19937_64, whose output
/// sequence is fixed by the standard; normals come from the Marsaglia polar
/// method rather than std::normal_distribution, whose algorithm is
/// implementation-defined. Draw sequences therefore depend only on the
/// RngStream key.
class Rng {
 public:
  explicit Rng(RngStream stream);

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  /// Standard normal.
  double normal();

  /// Complex Gaussian with independent N(0, sigma_component^2) real and
  /// imaginary parts.
  std::complex<double> complex_normal(double sigma_component);

  std::uint64_t raw();

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sofp
