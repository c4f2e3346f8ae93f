#pragma once

#include <complex>
#include <map>
#include <string>

#include "sofp/rng.hpp"

namespace sofp {

/// Monte Carlo point estimate with a jackknife standard error and the stream
/// that produced it.
struct EstimateWithError {
  std::complex<double> value{0.0, 0.0};
  double std_error = 0.0;
  int replicas = 0;
  RngStream stream;
  std::map<std::string, double> diagnostics;

  [[nodiscard]] double real() const { return value.real(); }
};

}  // namespace sofp
