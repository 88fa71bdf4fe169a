#pragma once

#include <algorithm>
#include <complex>
#include <vector>

namespace halfres {

using cplx = std::complex<double>;
using namespace std::complex_literals;

inline constexpr double kPi = 3.14159265358979323846;

/// Axis-aligned rectangle in the complex plane, lo = bottom-left, hi = top-right.
struct Rect {
  cplx lo;
  cplx hi;

  double width() const { return hi.real() - lo.real(); }
  double height() const { return hi.imag() - lo.imag(); }
  cplx center() const { return 0.5 * (lo + hi); }
  bool contains(cplx z) const {
    return z.real() >= lo.real() && z.real() <= hi.real() && z.imag() >= lo.imag() &&
           z.imag() <= hi.imag();
  }
  double distance_to_boundary(cplx z) const {
    return std::min({z.real() - lo.real(), hi.real() - z.real(), z.imag() - lo.imag(),
                     hi.imag() - z.imag()});
  }
  double diameter() const { return std::abs(hi - lo); }
};

struct Disk {
  cplx center;
  double radius;
  bool contains(cplx z) const { return std::abs(z - center) < radius; }
};

/// Uniform grid x_i = i * dx on [0, x_max].
struct UniformGrid {
  double x_max = 0.0;
  double dx = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(x_max / dx + 0.5) + 1; }
  double x(std::size_t i) const { return static_cast<double>(i) * dx; }
  std::vector<double> points() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(i);
    return out;
  }
  /// Composite trapezoid weights.
  std::vector<double> trapezoid_weights() const {
    std::vector<double> w(size(), dx);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }
};

}  // namespace halfres
