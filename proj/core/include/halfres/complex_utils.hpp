#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "halfres/types.hpp"

namespace halfres {

/// A complex function on a rectangle. The evaluator must be deterministic and safe to call
/// concurrently.
struct AnalyticHandle {
  std::function<cplx(cplx)> eval;
  Rect domain{cplx(-1e300, -1e300), cplx(1e300, 1e300)};
  bool declared_analytic = true;
  std::string label;

  cplx operator()(cplx z) const { return eval(z); }
};

enum class ContourShape { rectangle, circle };

/// Closed positively oriented contour with a power-of-two sample count.
struct ContourSpec {
  ContourShape shape = ContourShape::circle;
  Rect rect{};
  cplx center{};
  double radius = 1.0;
  std::size_t samples = 64;
  std::size_t refinement_cap = 1u << 16;
  double tolerance = 1e-10;

  static ContourSpec circle(cplx center, double radius, std::size_t samples = 64);
  static ContourSpec rectangle(Rect rect, std::size_t samples = 64);
  void validate() const;
};

/// Nested sample points of a contour. Doubling the count keeps every earlier point, so the
/// refinement loop only evaluates new midpoints.
std::vector<cplx> contour_points(const ContourSpec& contour, std::size_t n);

/// Trapezoid quadrature of \oint g(z) dz with doubling until successive values agree to
/// contour.tolerance relative to max(1, \oint |g||dz|). Rectangles add a Richardson step.
/// Throws ConvergenceError at the refinement cap.
cplx contour_integral(const AnalyticHandle& g, const ContourSpec& contour);

/// Samples of f along a contour with the refinement bookkeeping used by winding counts.
class ContourSampler {
 public:
  ContourSampler(const AnalyticHandle& f, const ContourSpec& contour);

  /// Doubles the number of samples, reusing the existing ones.
  void refine();
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& points() const { return points_; }
  const std::vector<cplx>& values() const { return values_; }

  /// (1/2 pi i) \oint f'/f dz with f' taken from centered differences of the samples.
  double raw_winding() const;
  /// Winding from summed phase increments; exact once max_phase_step() < pi.
  int phase_winding() const;
  double max_phase_step() const;
  double min_abs() const;
  double max_abs() const;

 private:
  const AnalyticHandle* f_;
  ContourSpec contour_;
  std::vector<cplx> points_;
  std::vector<cplx> values_;
};

/// Argument-principle winding number of f along a contour. Samples are doubled until the raw
/// value is within 0.25 of an integer, the largest phase step is below pi/3 and the phase count
/// agrees. Throws BoundaryZeroError when min |f| <= boundary_ratio * max |f| on the samples and
/// NonIntegerWindingError at the refinement cap.
int contour_winding(const AnalyticHandle& f, const ContourSpec& contour,
                    double boundary_ratio = 1e-9, double* raw_out = nullptr);

/// max over the grid of |df/d conj(z)| / max(|df/dz|, |df/d conj(z)|) by central differences.
double cauchy_riemann_residual(const AnalyticHandle& f, const std::vector<cplx>& grid,
                               double step = 1e-5);

/// Tensor grid with nx by ny points covering a rectangle.
std::vector<cplx> rect_grid(const Rect& r, std::size_t nx, std::size_t ny);

enum class FunctionKind { polynomial, exponential_polynomial };

/// Seeded test function. Coefficients lie in the unit disk and the leading coefficient has
/// modulus at least 1/2, so every zero lies in |z| < 3.
struct SeededFunction {
  AnalyticHandle handle;
  std::vector<cplx> coefficients;  // ascending powers
  cplx exponent_rate{0.0, 0.0};    // e^{rate z} factor for exponential_polynomial
  int degree = 0;
};

/// Deterministic family of entire functions: the same seed gives bit-identical coefficients.
/// Degrees cycle through 1..max_degree.
std::vector<SeededFunction> seeded_function_family(std::uint64_t seed, FunctionKind kind,
                                                   std::size_t count, int max_degree = 6);

/// Central complex-difference derivative with step = rel_step * max(1, |z|).
cplx numerical_derivative(const AnalyticHandle& f, cplx z, double rel_step = 1e-6);

}  // namespace halfres
