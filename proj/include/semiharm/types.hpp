#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <span>
#include <string>

namespace semiharm {

using cplx = std::complex<double>;

/// A point of C^m (m <= 2). Entries past m are kept at zero.
using BasePoint = std::array<cplx, 2>;

/// The same point in real coordinates (x1, y1, x2, y2).
using RealPoint = std::array<double, 4>;

/// Real partials (d/dx1, d/dy1, d/dx2, d/dy2) of a complex-valued function.
using Gradient = std::array<cplx, 4>;

inline constexpr double pi = std::numbers::pi;

inline RealPoint to_real(const BasePoint& z) {
  return {z[0].real(), z[0].imag(), z[1].real(), z[1].imag()};
}

inline BasePoint to_base(const RealPoint& x) {
  return {cplx(x[0], x[1]), cplx(x[2], x[3])};
}

inline double norm2(const BasePoint& z, int m) {
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += std::norm(z[j]);
  return s;
}

inline BasePoint offset(const BasePoint& z, const RealPoint& dir, double t) {
  return {z[0] + t * cplx(dir[0], dir[1]), z[1] + t * cplx(dir[2], dir[3])};
}

inline double distance(const BasePoint& a, const BasePoint& b, int m) {
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += std::norm(a[j] - b[j]);
  return std::sqrt(s);
}

std::string format_complex(cplx c);
std::string format_point(const BasePoint& z, int m);
std::string format_double(double x);

}  // namespace semiharm
