#include "halfres/complex_utils.hpp"

#include <cmath>
#include <random>

#include "halfres/errors.hpp"

namespace halfres {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

cplx rect_point(const Rect& r, double t) {
  // t in [0, 4): bottom edge left->right, right edge up, top edge right->left, left edge down.
  const cplx c0 = r.lo, c1(r.hi.real(), r.lo.imag()), c2 = r.hi, c3(r.lo.real(), r.hi.imag());
  const int side = std::min(3, static_cast<int>(std::floor(t)));
  const double u = t - side;
  switch (side) {
    case 0: return c0 + u * (c1 - c0);
    case 1: return c1 + u * (c2 - c1);
    case 2: return c2 + u * (c3 - c2);
    default: return c3 + u * (c0 - c3);
  }
}

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

cplx unit_disk_sample(std::mt19937_64& rng, double r_min = 0.0) {
  const double u = unit_double(rng);
  const double r = std::sqrt(r_min * r_min + (1.0 - r_min * r_min) * u);
  const double theta = 2.0 * kPi * unit_double(rng);
  return std::polar(r, theta);
}

}  // namespace

ContourSpec ContourSpec::circle(cplx center, double radius, std::size_t samples) {
  ContourSpec c;
  c.shape = ContourShape::circle;
  c.center = center;
  c.radius = radius;
  c.samples = samples;
  return c;
}

ContourSpec ContourSpec::rectangle(Rect rect, std::size_t samples) {
  ContourSpec c;
  c.shape = ContourShape::rectangle;
  c.rect = rect;
  c.samples = samples;
  return c;
}

void ContourSpec::validate() const {
  if (!is_power_of_two(samples) || samples < 64)
    throw DomainError("contour: samples must be a power of two >= 64");
  if (refinement_cap < samples) throw DomainError("contour: refinement_cap must be >= samples");
  if (shape == ContourShape::circle && !(radius > 0.0))
    throw DomainError("contour: radius must be > 0");
  if (shape == ContourShape::rectangle && !(rect.width() > 0.0 && rect.height() > 0.0))
    throw DomainError("contour: degenerate rectangle");
}

std::vector<cplx> contour_points(const ContourSpec& contour, std::size_t n) {
  std::vector<cplx> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    if (contour.shape == ContourShape::circle)
      pts[k] = contour.center + contour.radius * std::polar(1.0, 2.0 * kPi * t);
    else
      pts[k] = rect_point(contour.rect, 4.0 * t);
  }
  return pts;
}

namespace {

struct QuadratureEstimate {
  cplx value;
  double l1;
};

QuadratureEstimate trapezoid(const ContourSpec& contour, const std::vector<cplx>& pts,
                             const std::vector<cplx>& vals) {
  const std::size_t n = pts.size();
  cplx sum = 0.0;
  double l1 = 0.0;
  if (contour.shape == ContourShape::circle) {
    const double dt = 2.0 * kPi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx dz = 1i * (pts[k] - contour.center) * dt;
      sum += vals[k] * dz;
      l1 += std::abs(vals[k]) * std::abs(dz);
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t k1 = (k + 1) % n;
      const cplx dz = pts[k1] - pts[k];
      sum += 0.5 * (vals[k] + vals[k1]) * dz;
      l1 += 0.5 * (std::abs(vals[k]) + std::abs(vals[k1])) * std::abs(dz);
    }
  }
  return {sum, l1};
}

}  // namespace

cplx contour_integral(const AnalyticHandle& g, const ContourSpec& contour) {
  contour.validate();
  ContourSampler sampler(g, contour);
  auto est = trapezoid(contour, sampler.points(), sampler.values());
  cplx previous = est.value;
  const bool richardson = contour.shape == ContourShape::rectangle;
  while (sampler.size() * 2 <= contour.refinement_cap) {
    sampler.refine();
    auto fine = trapezoid(contour, sampler.points(), sampler.values());
    const cplx current = richardson ? (4.0 * fine.value - est.value) / 3.0 : fine.value;
    const double scale = std::max(fine.l1, 1e-300);
    if (std::abs(current - previous) <= contour.tolerance * std::max(scale, 1.0)) return current;
    previous = current;
    est = fine;
  }
  throw ConvergenceError("contour_integral: no convergence at refinement cap");
}

ContourSampler::ContourSampler(const AnalyticHandle& f, const ContourSpec& contour)
    : f_(&f), contour_(contour) {
  points_ = contour_points(contour_, contour_.samples);
  values_.resize(points_.size());
  for (std::size_t k = 0; k < points_.size(); ++k) {
    values_[k] = f(points_[k]);
    if (!std::isfinite(values_[k].real()) || !std::isfinite(values_[k].imag()))
      throw DomainError("contour: non-finite function value on the contour");
  }
}

void ContourSampler::refine() {
  const std::size_t n = points_.size();
  auto fine_pts = contour_points(contour_, 2 * n);
  std::vector<cplx> fine_vals(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    fine_vals[2 * k] = values_[k];
    fine_vals[2 * k + 1] = (*f_)(fine_pts[2 * k + 1]);
    const cplx v = fine_vals[2 * k + 1];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DomainError("contour: non-finite function value on the contour");
  }
  points_ = std::move(fine_pts);
  values_ = std::move(fine_vals);
}

double ContourSampler::raw_winding() const {
  const std::size_t n = values_.size();
  cplx sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx next = values_[(k + 1) % n];
    const cplx prev = values_[(k + n - 1) % n];
    sum += (next - prev) / (2.0 * values_[k]);
  }
  return sum.imag() / (2.0 * kPi);
}

int ContourSampler::phase_winding() const {
  const std::size_t n = values_.size();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) total += std::arg(values_[(k + 1) % n] / values_[k]);
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

double ContourSampler::max_phase_step() const {
  const std::size_t n = values_.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    worst = std::max(worst, std::abs(std::arg(values_[(k + 1) % n] / values_[k])));
  return worst;
}

double ContourSampler::min_abs() const {
  double m = INFINITY;
  for (const auto& v : values_) m = std::min(m, std::abs(v));
  return m;
}

double ContourSampler::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

int contour_winding(const AnalyticHandle& f, const ContourSpec& contour, double boundary_ratio,
                    double* raw_out) {
  contour.validate();
  ContourSampler sampler(f, contour);
  while (true) {
    if (sampler.min_abs() <= boundary_ratio * sampler.max_abs())
      throw BoundaryZeroError("winding: function nearly vanishes on the contour");
    const double raw = sampler.raw_winding();
    if (raw_out) *raw_out = raw;
    const long n = std::lround(raw);
    if (std::abs(raw - static_cast<double>(n)) < 0.25 && sampler.max_phase_step() < kPi / 3.0 &&
        sampler.phase_winding() == n)
      return static_cast<int>(n);
    if (sampler.size() * 2 > contour.refinement_cap)
      throw NonIntegerWindingError("winding: raw value not near an integer at refinement cap", raw);
    sampler.refine();
  }
}

double cauchy_riemann_residual(const AnalyticHandle& f, const std::vector<cplx>& grid, double step) {
  double worst = 0.0;
  for (const cplx z : grid) {
    const double d = step * std::max(1.0, std::abs(z));
    const cplx fx = (f(z + d) - f(z - d)) / (2.0 * d);
    const cplx fy = (f(z + 1i * d) - f(z - 1i * d)) / (2.0 * d);
    const cplx dzbar = 0.5 * (fx + 1i * fy);
    const cplx dz = 0.5 * (fx - 1i * fy);
    const double denom = std::max(std::abs(dz), std::abs(dzbar));
    if (denom == 0.0) continue;
    worst = std::max(worst, std::abs(dzbar) / denom);
  }
  return worst;
}

std::vector<cplx> rect_grid(const Rect& r, std::size_t nx, std::size_t ny) {
  std::vector<cplx> out;
  out.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double tx = nx == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(nx - 1);
      const double ty = ny == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(ny - 1);
      out.emplace_back(r.lo.real() + tx * r.width(), r.lo.imag() + ty * r.height());
    }
  return out;
}

std::vector<SeededFunction> seeded_function_family(std::uint64_t seed, FunctionKind kind,
                                                   std::size_t count, int max_degree) {
  if (count < 1) throw DomainError("seeded_function_family: count must be >= 1");
  if (max_degree < 1) throw DomainError("seeded_function_family: max_degree must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<SeededFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SeededFunction fn;
    fn.degree = 1 + static_cast<int>(i % static_cast<std::size_t>(max_degree));
    fn.coefficients.resize(static_cast<std::size_t>(fn.degree) + 1);
    for (int k = 0; k < fn.degree; ++k) fn.coefficients[static_cast<std::size_t>(k)] = unit_disk_sample(rng);
    fn.coefficients.back() = unit_disk_sample(rng, 0.5);
    if (kind == FunctionKind::exponential_polynomial) fn.exponent_rate = unit_disk_sample(rng);

    const auto coeffs = fn.coefficients;
    const cplx rate = fn.exponent_rate;
    fn.handle.eval = [coeffs, rate](cplx z) {
      cplx acc = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
      return rate == cplx(0.0) ? acc : acc * std::exp(rate * z);
    };
    fn.handle.declared_analytic = true;
    fn.handle.label = (kind == FunctionKind::polynomial ? "poly#" : "exppoly#") + std::to_string(i);
    out.push_back(std::move(fn));
  }
  return out;
}

cplx numerical_derivative(const AnalyticHandle& f, cplx z, double rel_step) {
  const double d = rel_step * std::max(1.0, std::abs(z));
  const cplx fx = f(z + d) - f(z - d);
  const cplx fy = f(z + 1i * d) - f(z - 1i * d);
  return (fx - 1i * fy) / (4.0 * d);
}

}  // namespace halfres
