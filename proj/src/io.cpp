#include "sofp/io.hpp"

#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "sofp/errors.hpp"

namespace sofp::io {

void write_matrix_binary(std::ostream& out, const HermitianMatrix& m) {
  const std::uint64_t dim = static_cast<std::uint64_t>(m.dim());
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) {
      const double re = m.entries()(i, j).real();
      const double im = m.entries()(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
}

HermitianMatrix read_matrix_binary(std::istream& in) {
  std::uint64_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  if (!in || dim == 0 || dim > (1u << 20))
    throw InvalidInputError("read_matrix_binary: bad dimension header");
  Eigen::MatrixXcd m(dim, dim);
  for (std::uint64_t i = 0; i < dim; ++i) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      double re = 0.0, im = 0.0;
      in.read(reinterpret_cast<char*>(&re), sizeof(re));
      in.read(reinterpret_cast<char*>(&im), sizeof(im));
      if (!in) throw InvalidInputError("read_matrix_binary: truncated payload");
      m(i, j) = Complex(re, im);
    }
  }
  return HermitianMatrix(std::move(m));
}

void write_matrix_json(std::ostream& out, const HermitianMatrix& m) {
  out << "{\"dim\":" << m.dim() << ",\"entries\":[";
  bool first = true;
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) {
      if (!first) out << ",";
      first = false;
      out << "[" << format_double(m.entries()(i, j).real()) << ","
          << format_double(m.entries()(i, j).imag()) << "]";
    }
  }
  out << "]}";
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_complex(std::complex<double> z) {
  return format_double(z.real()) + (z.imag() < 0 ? "-" : "+") +
         format_double(std::abs(z.imag())) + "i";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace sofp::io
