#include "sofp/rng.hpp"

#include <cmath>

namespace sofp {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::substream(std::uint64_t k) const {
  return RngStream{seed, mix64(stream_id ^ mix64(k + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(RngStream stream) {
  const std::uint64_t a = mix64(stream.seed);
  const std::uint64_t b = mix64(a ^ stream.stream_id);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  gen_.seed(seq);
}

std::uint64_t Rng::raw() { return gen_(); }

double Rng::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = v * factor;
  has_cached_ = true;
  return u * factor;
}

std::complex<double> Rng::complex_normal(double sigma_component) {
  const double re = sigma_component * normal();
  const double im = sigma_component * normal();
  return {re, im};
}

}  // namespace sofp
