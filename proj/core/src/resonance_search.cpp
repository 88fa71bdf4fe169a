#include "halfres/resonance_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "halfres/errors.hpp"

namespace halfres {

namespace {

Rect expand(const Rect& r, double d) { return Rect{r.lo - cplx(d, d), r.hi + cplx(d, d)}; }

std::vector<double> jitter_schedule(double unit) {
  return {0.0, unit / 7.0, -unit / 7.0, unit / 3.0, -unit / 3.0};
}

int circle_multiplicity(const AnalyticHandle& f, cplx z, double radius, int fallback) {
  try {
    const int w = contour_winding(f, ContourSpec::circle(z, radius));
    return w > 0 ? w : fallback;
  } catch (const Error&) {
    return fallback;
  }
}

struct Finder {
  const AnalyticHandle& f;
  const ScanOptions& opts;
  double h;
  double unit;
  ScanResult& out;
  std::vector<ZeroEstimate> found;

  void accept(const ZeroEstimate& z) { found.push_back(z); }

  bool try_newton(const Rect& rect, int count) {
    try {
      const ZeroEstimate z = refine_zero(f, rect.center(), opts.zero_tol);
      const double slack = 1e-12 * std::max(1.0, std::abs(rect.center()));
      if (expand(rect, slack).contains(z.zero) && z.multiplicity == count) {
        accept(z);
        return true;
      }
    } catch (const DivergenceError&) {
    }
    return false;
  }

  void recurse(const Rect& rect, int count, int depth) {
    if (count == 0) return;
    if (count == 1 && try_newton(rect, count)) return;
    if (depth >= opts.max_depth) {
      if (try_newton(rect, count)) return;
      ZeroEstimate cluster;
      cluster.zero = rect.center();
      cluster.multiplicity = count;
      cluster.derivative = numerical_derivative(f, cluster.zero);
      accept(cluster);
      return;
    }
    const bool split_real = rect.width() >= rect.height();
    const double side = split_real ? rect.width() : rect.height();
    const double local_unit = std::min(unit, 0.25 * side);
    for (double off : jitter_schedule(local_unit)) {
      Rect a = rect, b = rect;
      if (split_real) {
        const double cut = rect.center().real() + off;
        a.hi = cplx(cut, rect.hi.imag());
        b.lo = cplx(cut, rect.lo.imag());
      } else {
        const double cut = rect.center().imag() + off;
        a.hi = cplx(rect.hi.real(), cut);
        b.lo = cplx(rect.lo.real(), cut);
      }
      int ca = 0, cb = 0;
      try {
        ca = winding_count(f, a, opts.boundary_tol);
        cb = winding_count(f, b, opts.boundary_tol);
      } catch (const BoundaryZeroError&) {
        continue;
      } catch (const NonIntegerWindingError&) {
        continue;
      }
      out.subdivisions.push_back({rect, count, ca + cb, depth});
      if (ca + cb != count) continue;
      recurse(a, ca, depth + 1);
      recurse(b, cb, depth + 1);
      return;
    }
    throw ConvergenceError("find_zeros: child windings do not add up to the parent count");
  }
};

}  // namespace

int winding_count(const AnalyticHandle& f, const Rect& rect, double boundary_tol) {
  return contour_winding(f, ContourSpec::rectangle(rect), boundary_tol);
}

ZeroEstimate refine_zero(const AnalyticHandle& f, cplx seed, double tol, int max_iterations) {
  const double scale = std::max(1.0, std::abs(seed));
  ZeroEstimate est;
  cplx z = seed;
  int m = 1;
  bool multiplicity_checked = false;
  double last = std::numeric_limits<double>::infinity();
  double prev = last;
  cplx best = seed;
  double best_abs = std::abs(f(seed));
  for (int it = 1; it <= max_iterations; ++it) {
    const cplx fz = f(z);
    if (fz == cplx(0.0)) {
      last = 0.0;
      est.iterations = it;
      break;
    }
    const cplx d = numerical_derivative(f, z, 1e-6);
    if (d == cplx(0.0) || !std::isfinite(std::abs(d))) break;
    const cplx step = static_cast<double>(m) * fz / d;
    z -= step;
    prev = last;
    last = std::abs(step);
    est.iterations = it;
    const double az = std::abs(f(z));
    if (az < best_abs) {
      best_abs = az;
      best = z;
    }
    if (!multiplicity_checked && it >= 3 && last > 0.3 * prev) {
      m = circle_multiplicity(f, z, std::max(10.0 * last, 1e-6 * scale), 1);
      multiplicity_checked = true;
    }
    if (last <= std::max(tol * scale, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(z))) break;
    if (it == max_iterations) {
      const double r = std::max(10.0 * last, 1e-6 * scale);
      throw DivergenceError("refine_zero: no convergence within the iteration cap", best - cplx(r, r),
                            best + cplx(r, r));
    }
  }
  if (!std::isfinite(last) && est.iterations < max_iterations) {
    const double r = 1e-3 * scale;
    throw DivergenceError("refine_zero: vanishing derivative", best - cplx(r, r), best + cplx(r, r));
  }
  est.zero = z;
  est.last_step = last;
  est.multiplicity = circle_multiplicity(f, z, std::max(10.0 * last, 1e-6 * scale), m);
  est.derivative = numerical_derivative(f, z, 1e-6);
  return est;
}

ScanResult find_zeros(const AnalyticHandle& f, const Rect& rect, double h, const ScanOptions& opts) {
  if (!(rect.width() > 0.0 && rect.height() > 0.0)) throw DomainError("find_zeros: degenerate rectangle");
  ScanResult res;
  const double unit = opts.jitter_unit > 0.0 ? opts.jitter_unit : 0.01 * std::min(rect.width(), rect.height());
  bool counted = false;
  for (double off : jitter_schedule(unit)) {
    const Rect r = expand(rect, off);
    try {
      res.total_winding = winding_count(f, r, opts.boundary_tol);
      res.counted_rect = r;
      counted = true;
      break;
    } catch (const BoundaryZeroError&) {
    } catch (const NonIntegerWindingError&) {
    }
  }
  if (!counted) throw BoundaryZeroError("find_zeros: every jittered rectangle has a zero on its boundary");

  Finder finder{f, opts, h, unit, res, {}};
  finder.recurse(res.counted_rect, res.total_winding, 0);

  auto zs = std::move(finder.found);
  std::sort(zs.begin(), zs.end(), [](const ZeroEstimate& a, const ZeroEstimate& b) {
    return a.zero.real() != b.zero.real() ? a.zero.real() < b.zero.real() : a.zero.imag() < b.zero.imag();
  });
  std::vector<Resonance> merged;
  for (const auto& z : zs) {
    if (!merged.empty() && std::abs(merged.back().lambda - z.zero) <= opts.dedup_tol) {
      merged.back().multiplicity += z.multiplicity;
      continue;
    }
    merged.push_back(Resonance{z.zero, z.multiplicity, h, z.derivative, rect});
  }
  int total = 0;
  for (const auto& r : merged) total += r.multiplicity;
  if (total != res.total_winding)
    throw ConvergenceError("find_zeros: multiplicities do not add up to the winding count");
  res.resonances = std::move(merged);
  return res;
}

ScanResult scan_resonances(const PotentialModel& model, const Rect& rect, double h, const ScanOptions& opts) {
  const double unit = opts.jitter_unit > 0.0 ? opts.jitter_unit : 0.01 * std::min(rect.width(), rect.height());
  const WronskianEvaluator wev(model, h, expand(rect, unit), opts.continuation);
  ScanResult res = find_zeros(wev.handle(), rect, h, opts);
  if (opts.extended_polish)
    for (auto& r : res.resonances) {
      if (r.multiplicity != 1) continue;
      const auto z = polish_zero_extended(wev, r.lambda);
      const cplx p(static_cast<double>(z.lambda.real()), static_cast<double>(z.lambda.imag()));
      if (std::abs(p - r.lambda) <= 1e-8 * std::max(1.0, std::abs(r.lambda))) r.lambda = p;
    }
  std::vector<Resonance> kept;
  for (auto& r : res.resonances) {
    if (r.lambda.imag() > opts.spurious_im && r.lambda.real() > 0.0) res.spurious.push_back(r);
    else kept.push_back(r);
  }
  res.resonances = std::move(kept);
  return res;
}

ScanResult scan_resonances(const PotentialModel& model, const FrequencyWindow& window, double h,
                           const ScanOptions& opts) {
  FrequencyWindow w = window;
  w.h = h;
  w.validate();
  ScanOptions o = opts;
  if (o.jitter_unit <= 0.0) o.jitter_unit = w.exclusion_radius;
  auto res = scan_resonances(model, w.rect(), h, o);
  for (auto& r : res.resonances) r.source_window = w.rect();
  return res;
}

double jensen_zero_bound(const AnalyticHandle& f, cplx center, double rho1, double rho2, std::size_t samples) {
  if (!(rho1 > rho2 && rho2 > 0.0)) throw DomainError("jensen_zero_bound: need rho1 > rho2 > 0");
  const double fc = std::abs(f(center));
  if (fc == 0.0) throw DomainError("jensen_zero_bound: f vanishes at the center");
  double sup = 0.0;
  for (std::size_t k = 0; k < samples; ++k)
    sup = std::max(sup, std::abs(f(center + rho1 * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(samples)))));
  return std::max(0.0, (std::log(sup) - std::log(fc)) / std::log(rho1 / rho2));
}

cplx blaschke_product(cplx lambda, cplx center, double rho2, const std::vector<cplx>& zeros) {
  cplx phi = 1.0;
  for (cplx r : zeros) {
    phi *= -rho2 / (r - center);
    phi *= rho2 * (lambda - r) / (rho2 * rho2 - std::conj(r - center) * (lambda - center));
  }
  return phi;
}

BlaschkeCertificate blaschke_lower_bound(const AnalyticHandle& f, cplx center, double rho1, double rho2,
                                         double rho3, const std::vector<cplx>& zeros, double S,
                                         std::size_t check_points) {
  if (!(rho1 > rho2 && rho2 > rho3 && rho3 > 0.0)) throw DomainError("blaschke: need rho1 > rho2 > rho3 > 0");
  if (!(S > 0.0)) throw DomainError("blaschke: S must be > 0");
  for (cplx z : zeros)
    if (std::abs(z - center) >= rho2) throw DomainError("blaschke: zero outside the rho2-disk");
  const cplx fc = f(center);
  if (fc == cplx(0.0)) throw DomainError("blaschke: f vanishes at the center");
  const int winding = contour_winding(f, ContourSpec::circle(center, rho2));
  if (winding != static_cast<int>(zeros.size()))
    throw CompletenessError("blaschke: zero list does not match the winding number on the rho2-circle");

  BlaschkeCertificate cert;
  const std::size_t nb = 4096;
  double sup_f = 0.0;
  cert.phi_boundary_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nb; ++k) {
    const cplx z = center + rho2 * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(nb));
    sup_f = std::max(sup_f, std::abs(f(z)));
    cert.phi_boundary_min = std::min(cert.phi_boundary_min, std::abs(blaschke_product(z, center, rho2, zeros)));
  }
  const double eps = rho2 - rho3;
  const double log_sup = std::log(sup_f) + std::log(1.01);
  cert.caratheodory_term = -(2.0 * rho3 / eps) * log_sup + ((rho2 + rho3) / eps) * std::log(std::abs(fc));
  cert.blaschke_term = 0.0;
  for (cplx r : zeros) {
    cert.blaschke_term += std::log(rho2 / std::abs(r - center)) + std::log(S / (rho2 + rho3));
    cert.excluded_disks.push_back(Disk{r, S});
  }
  cert.min_log_modulus = cert.caratheodory_term + cert.blaschke_term;

  // Sunflower sampling of the rho3-disk, enlarged until enough points avoid the excluded disks.
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t total = check_points; cert.sampled_points < check_points && total < 64 * check_points + 64;
       total = total * 3 / 2 + 1) {
    cert.sampled_points = 0;
    cert.sampled_min_log_modulus = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < total; ++i) {
      const double rad = rho3 * std::sqrt((static_cast<double>(i) + 0.5) / static_cast<double>(total));
      const cplx z = center + std::polar(rad, golden * static_cast<double>(i));
      bool excluded = false;
      for (const auto& d : cert.excluded_disks) excluded = excluded || d.contains(z);
      if (excluded) continue;
      cert.sampled_min_log_modulus = std::min(cert.sampled_min_log_modulus, std::log(std::abs(f(z))));
      ++cert.sampled_points;
    }
  }
  cert.sound = cert.sampled_min_log_modulus >= cert.min_log_modulus;
  return cert;
}

}  // namespace halfres
