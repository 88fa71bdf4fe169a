#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "halfres/types.hpp"

namespace halfres {

/// Half-line operator P(h) = -(h d/dx) a(x;h) (h d/dx) + V(x;h) with a Dirichlet condition at 0.
///
/// Coefficients are stored as callables of (x, h); the built-in models ignore h.
/// Beyond x_box the perturbation obeys |a-1|, |V| <= decay_const * exp(-(2 gamma + delta) x).
struct PotentialModel {
  std::string label;
  std::vector<double> params;
  std::function<double(double, double)> a;
  std::function<double(double, double)> V;
  double x_box = 0.0;
  double gamma = 1.0;
  double delta = 1.0;
  double decay_const = 1.0;
  double a_min = 1.0;
  /// Points where a or V is not smooth; integrators step onto them exactly.
  std::vector<double> breakpoints;
  /// If set, a == 1 and V == 0 for x >= compact_support.
  std::optional<double> compact_support;
  /// Semiclassical parameter attached to the model (ads_like sets h = 1/l).
  std::optional<double> h_default;

  double decay_rate() const { return 2.0 * gamma + delta; }
};

struct Coefficients {
  double a;
  double V;
};

Coefficients eval_coefficients(const PotentialModel& model, double x, double h);

struct DecayReport {
  bool passes = true;
  /// Least-squares exponential rate of |V|; +inf when V vanishes on the grid.
  double fitted_rate = 0.0;
  /// Grid point with the largest ratio |perturbation| / envelope.
  double worst_x = 0.0;
  double worst_ratio = 0.0;
};

DecayReport validate_decay(const PotentialModel& model, std::span<const double> grid, double h);

/// Grid on [x_box, x_box + 10/(2 gamma + delta)] used by the model invariants.
std::vector<double> default_decay_grid(const PotentialModel& model, std::size_t n = 200);

/// Quintic C^2 blend: 0 for t <= 0, 1 for t >= 1.
double smoothstep5(double t);
double smoothstep5_derivative(double t);

/// Smooth weight phi: 0 on [0, x_box], x for x >= x_linear.
///
/// On the taper interval phi = s(t) * x with s the quintic blend, which keeps phi
/// nondecreasing and C^2 at both ends.
class WeightFunction {
 public:
  WeightFunction(double x_box, double x_linear);

  double operator()(double x) const;
  double derivative(double x) const;
  double x_box() const { return x_box_; }
  double x_linear() const { return x_linear_; }

 private:
  double x_box_;
  double x_linear_;
};

WeightFunction make_weight(double x_box, double x_linear);

/// Frequency window Omega_eps(h) = (a0+eps, b0-eps) + i((-gamma+eps0+eps) h, 1) with exclusion disks.
struct FrequencyWindow {
  double a0 = 0.5;
  double b0 = 1.5;
  double eps0 = 0.1;
  double eps = 0.0;
  double h = 1.0;
  double gamma = 1.0;
  double exclusion_radius = 0.01;
  std::vector<cplx> exclusion_centers;

  Rect rect() const;
  /// Throws DomainError when an invariant fails.
  void validate() const;
  bool excluded(cplx lambda) const;
};

/// Built-in model library: free, square_well(V0, width), gauss_barrier(B0, xc, w), ads_like(l).
PotentialModel builtin_model(const std::string& name, std::span<const double> params);

/// Default parameters of the ads_like barrier profile.
struct AdsProfile {
  static constexpr double barrier = 2.0;
  static constexpr double center = 2.0;
  static constexpr double width = 0.5;
  static constexpr double tail = 0.5;
  static constexpr double tail_rate = 3.0;
};

}  // namespace halfres
