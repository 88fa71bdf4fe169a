#include "halfres/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "halfres/errors.hpp"

namespace halfres {

Coefficients eval_coefficients(const PotentialModel& model, double x, double h) {
  if (!(x >= 0.0)) throw DomainError("eval_coefficients: x must be >= 0");
  if (!(h > 0.0)) throw DomainError("eval_coefficients: h must be > 0");
  return {model.a(x, h), model.V(x, h)};
}

DecayReport validate_decay(const PotentialModel& model, std::span<const double> grid, double h) {
  DecayReport report;
  const double rate = model.decay_rate();
  // Relative slack so that exact equality V = C e^{-rate x} passes.
  constexpr double kSlack = 1e-12;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t fitted = 0;
  bool first = true;
  for (double x : grid) {
    if (x < model.x_box) continue;
    const auto c = eval_coefficients(model, x, h);
    const double envelope = model.decay_const * std::exp(-rate * x);
    const double worst = std::max(std::abs(c.V), std::abs(c.a - 1.0));
    const double ratio = envelope > 0.0 ? worst / envelope : (worst > 0 ? INFINITY : 0.0);
    if (first || ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_x = x;
      first = false;
    }
    if (worst > envelope * (1.0 + kSlack)) report.passes = false;
    if (c.V != 0.0) {
      const double y = std::log(std::abs(c.V));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++fitted;
    }
  }
  if (fitted >= 2) {
    const double n = static_cast<double>(fitted);
    const double denom = n * sxx - sx * sx;
    report.fitted_rate = denom != 0.0 ? -(n * sxy - sx * sy) / denom : 0.0;
  } else {
    report.fitted_rate = std::numeric_limits<double>::infinity();
  }
  return report;
}

std::vector<double> default_decay_grid(const PotentialModel& model, std::size_t n) {
  std::vector<double> grid(n);
  const double span = 10.0 / model.decay_rate();
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = model.x_box + span * static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep5_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

WeightFunction::WeightFunction(double x_box, double x_linear) : x_box_(x_box), x_linear_(x_linear) {
  if (!(x_box >= 0.0)) throw DomainError("make_weight: x_box must be >= 0");
  if (!(x_linear > x_box)) throw DomainError("make_weight: x_linear must exceed x_box");
}

double WeightFunction::operator()(double x) const {
  if (x <= x_box_) return 0.0;
  if (x >= x_linear_) return x;
  return smoothstep5((x - x_box_) / (x_linear_ - x_box_)) * x;
}

double WeightFunction::derivative(double x) const {
  if (x <= x_box_) return 0.0;
  if (x >= x_linear_) return 1.0;
  const double len = x_linear_ - x_box_;
  const double t = (x - x_box_) / len;
  return smoothstep5_derivative(t) * x / len + smoothstep5(t);
}

WeightFunction make_weight(double x_box, double x_linear) { return WeightFunction(x_box, x_linear); }

Rect FrequencyWindow::rect() const {
  return {cplx(a0 + eps, (-gamma + eps0 + eps) * h), cplx(b0 - eps, 1.0)};
}

void FrequencyWindow::validate() const {
  if (!(a0 > 0.0 && b0 > a0)) throw DomainError("window: need 0 < a0 < b0");
  if (!(eps0 > 0.0 && eps >= 0.0)) throw DomainError("window: need eps0 > 0, eps >= 0");
  if (!(h > 0.0 && gamma > 0.0)) throw DomainError("window: need h > 0, gamma > 0");
  if (!(a0 + eps < b0 - eps)) throw DomainError("window: eps too large for (a0, b0)");
  if (!(eps0 + eps < gamma + 1.0 / h)) throw DomainError("window: empty imaginary range");
  if (!(exclusion_radius > 0.0 && exclusion_radius < (b0 - a0) / 4.0))
    throw DomainError("window: exclusion radius must satisfy 0 < S < (b0 - a0)/4");
}

bool FrequencyWindow::excluded(cplx lambda) const {
  for (const auto& c : exclusion_centers)
    if (std::abs(lambda - c) < exclusion_radius) return true;
  return false;
}

namespace {

void require_arity(const std::string& name, std::span<const double> params, std::size_t n) {
  if (params.size() != n) {
    std::ostringstream os;
    os << "builtin_model: " << name << " expects " << n << " parameter(s), got " << params.size();
    throw DomainError(os.str());
  }
}

// sup_{x >= x0} B exp(-(x-xc)^2/w^2 + r x)
double gaussian_envelope_const(double B, double xc, double w, double r, double x0) {
  const double xs = std::max(x0, xc + r * w * w / 2.0);
  return B * std::exp(-(xs - xc) * (xs - xc) / (w * w) + r * xs);
}

}  // namespace

PotentialModel builtin_model(const std::string& name, std::span<const double> params) {
  PotentialModel m;
  m.label = name;
  m.params.assign(params.begin(), params.end());
  m.a = [](double, double) { return 1.0; };
  m.gamma = 1.0;
  m.delta = 1.0;
  m.a_min = 1.0;

  if (name == "free") {
    require_arity(name, params, 0);
    m.V = [](double, double) { return 0.0; };
    m.x_box = 0.0;
    m.decay_const = 1.0;
    m.compact_support = 0.0;
  } else if (name == "square_well") {
    require_arity(name, params, 2);
    const double depth = params[0], width = params[1];
    if (!(width > 0.0)) throw DomainError("square_well: width must be > 0");
    if (!std::isfinite(depth)) throw DomainError("square_well: depth must be finite");
    m.V = [depth, width](double x, double) { return x < width ? -depth : 0.0; };
    m.x_box = width;
    m.decay_const = std::max(std::abs(depth), 1e-300);
    m.breakpoints = {width};
    m.compact_support = width;
  } else if (name == "gauss_barrier") {
    require_arity(name, params, 3);
    const double B = params[0], xc = params[1], w = params[2];
    if (!(w > 0.0)) throw DomainError("gauss_barrier: width must be > 0");
    if (!std::isfinite(B) || !std::isfinite(xc)) throw DomainError("gauss_barrier: bad parameters");
    m.V = [B, xc, w](double x, double) { return B * std::exp(-(x - xc) * (x - xc) / (w * w)); };
    m.x_box = 0.0;
    m.decay_const = gaussian_envelope_const(std::abs(B), xc, w, m.decay_rate(), m.x_box) * (1.0 + 1e-12);
  } else if (name == "ads_like") {
    require_arity(name, params, 1);
    const double ell = params[0];
    if (!(ell > 0.0)) throw DomainError("ads_like: l must be > 0");
    using P = AdsProfile;
    m.V = [](double x, double) {
      return P::barrier * std::exp(-(x - P::center) * (x - P::center) / (P::width * P::width)) +
             P::tail * std::exp(-P::tail_rate * x);
    };
    m.x_box = 0.0;
    m.decay_const =
        (gaussian_envelope_const(P::barrier, P::center, P::width, m.decay_rate(), 0.0) + P::tail) *
        (1.0 + 1e-12);
    m.h_default = 1.0 / ell;
  } else {
    throw DomainError("builtin_model: unknown model '" + name + "'");
  }
  return m;
}

}  // namespace halfres
