#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sofp/ensembles.hpp"

namespace sofp::io {

/// Binary matrix layout: u64 dimension header, then dim^2 row-major complex
/// entries as little-endian (real, imag) pairs of 64-bit floats.
void write_matrix_binary(std::ostream& out, const HermitianMatrix& m);
HermitianMatrix read_matrix_binary(std::istream& in);

/// {"dim": d, "entries": [[re, im], ...]} row-major.
void write_matrix_json(std::ostream& out, const HermitianMatrix& m);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double x);
std::string format_complex(std::complex<double> z);

/// FNV-1a hash of a string; records configs in output headers.
std::uint64_t fnv1a(const std::string& s);

}  // namespace sofp::io
