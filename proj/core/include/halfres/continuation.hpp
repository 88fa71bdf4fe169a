#pragma once

#include <optional>
#include <span>
#include <vector>

#include "halfres/complex_utils.hpp"
#include "halfres/model.hpp"
#include "halfres/ode.hpp"
#include "halfres/types.hpp"

namespace halfres {

struct ContinuationOptions {
  /// Bound on the neglected tail of the outgoing data.
  double tail_tol = 1e-12;
  OdeOptions ode{};
  /// Required gap between Im sigma and the edge -(gamma + delta/2) of the continuation region.
  double strip_margin = 0.05;
  /// Inward integration starts at max(x_tail, start_min).
  double start_min = 0.0;
  /// Number of points in [0, X_w] where the Wronskian is sampled.
  int wronskian_points = 8;
  /// Each frozen-mesh interval is split into this many steps by evaluate_extended.
  int extended_subdivision = 4;
};

/// Outgoing (Jost) solution f = e^{i sigma x} m(x) with m -> 1 at infinity, sampled at requested
/// points. af_prime holds a(x) f'(x).
struct JostSolution {
  cplx lambda;
  double h = 1.0;
  double x_tail = 0.0;
  double x_start = 0.0;
  std::vector<double> x;
  std::vector<cplx> f;
  std::vector<cplx> af_prime;
  std::vector<cplx> m;
};

/// Dirichlet solution u0(0) = 0, u0'(0) = 1. au_prime holds a(x) u0'(x).
struct RegularSolution {
  cplx lambda;
  double h = 1.0;
  std::vector<double> x;
  std::vector<cplx> u;
  std::vector<cplx> au_prime;
};

struct MatchingDeterminant {
  cplx lambda;
  double h = 1.0;
  /// Mean of a (f u0' - f' u0) over the evaluation points.
  cplx value;
  /// max |W(x_k) - value| / |value| (or absolute when value == 0).
  double relative_spread = 0.0;
  /// Standard deviation of the samples relative to |value|.
  double relative_std = 0.0;
  std::vector<double> eval_points;
  std::vector<cplx> samples;
};

/// Radius beyond which C e^{-kappa x}/(kappa h^2) < tol, kappa = 2 gamma + delta - 2 max(0, -Im sigma).
/// Compactly supported models return their support radius. Throws StripError when kappa is not
/// positive by strip_margin.
double jost_tail_radius(const PotentialModel& model, cplx sigma, double h, const ContinuationOptions& opts);

JostSolution integrate_jost(const PotentialModel& model, cplx lambda, double h,
                            const ContinuationOptions& opts = {},
                            std::span<const double> sample_points = {});

RegularSolution regular_solution(const PotentialModel& model, cplx lambda, double h,
                                 std::span<const double> sample_points,
                                 const ContinuationOptions& opts = {});

/// Points in [0, X_w] used for the Wronskian, X_w = x_box (or 1 when x_box = 0) capped by x_tail.
std::vector<double> wronskian_points(const PotentialModel& model, double x_tail, int count);

/// a (f u0' - f' u0) averaged over several points, with adaptive integration at this lambda.
MatchingDeterminant wronskian(const PotentialModel& model, cplx lambda, double h,
                              const ContinuationOptions& opts = {});

/// Wronskian on a fixed integration mesh shared by every lambda in a region, so that the computed
/// W is an analytic function of lambda there. The mesh is the union of adaptive meshes at the
/// corners and the center of the region.
class WronskianEvaluator {
 public:
  WronskianEvaluator(PotentialModel model, double h, Rect region, ContinuationOptions opts = {});

  MatchingDeterminant evaluate(cplx lambda) const;
  cplx operator()(cplx lambda) const { return evaluate(lambda).value; }
  AnalyticHandle handle() const;
  /// The same determinant with long double arithmetic on the frozen mesh. Rounding in double
  /// limits Im lambda of a zero to about 1e-16 |lambda|; this lowers the floor by three digits.
  xcplx evaluate_extended(xcplx lambda) const;

  double h() const { return h_; }
  const Rect& region() const { return region_; }
  double x_start() const { return x_start_; }
  std::size_t mesh_size() const { return jost_mesh_.size() + regular_mesh_.size(); }

 private:
  PotentialModel model_;
  double h_;
  Rect region_;
  ContinuationOptions opts_;
  double x_tail_ = 0.0;
  double x_start_ = 0.0;
  std::vector<double> eval_points_;
  std::vector<double> jost_mesh_;
  std::vector<double> regular_mesh_;
};

struct ExtendedZero {
  xcplx lambda;
  int iterations = 0;
  double last_step = 0.0;
  double value_abs = 0.0;
};

/// Newton iteration on evaluate_extended from seed; stops when the step stalls. Meant for simple
/// zeros already located in double precision.
ExtendedZero polish_zero_extended(const WronskianEvaluator& ev, cplx seed, int max_iterations = 30);

/// Jost and regular solutions on a uniform grid together with W; the Green's function is
/// G(x, y) = u0(min) f(max) / (h^2 W).
struct GreenData {
  cplx lambda;
  double h = 1.0;
  UniformGrid grid;
  std::vector<cplx> u0;
  std::vector<cplx> f;
  cplx W;
};

GreenData green_data(const PotentialModel& model, cplx lambda, double h, const UniformGrid& grid,
                     const ContinuationOptions& opts = {});

/// Resolvent kernel value from precomputed grid data (x, y given as grid indices).
cplx green_function(const GreenData& data, std::size_t i, std::size_t j);

/// y = e^{-gamma phi} G Q e^{-gamma phi} g with trapezoid weights Q, in O(n) via prefix sums.
/// gamma = 0 (or no weight) gives the unweighted resolvent.
std::vector<cplx> apply_green(const GreenData& data, std::span<const cplx> g, double gamma,
                              const WeightFunction* weight);

/// Throws NearResonanceError when |W| < 1e-8 max(1, w_scale).
std::vector<cplx> resolvent_apply(const PotentialModel& model, cplx lambda, double h,
                                  const UniformGrid& grid, std::span<const cplx> g, double gamma,
                                  const WeightFunction* weight, double w_scale = 1.0,
                                  const ContinuationOptions& opts = {});

/// Grid application of P(h) - lambda^2 by second-order finite differences in energy form.
std::vector<cplx> apply_operator(const PotentialModel& model, cplx lambda, double h,
                                 const UniformGrid& grid, std::span<const cplx> u);

struct ResidueReport {
  int order = 0;
  int winding = 0;
  /// order == winding; a mismatch flags a non-generic test function.
  bool generic = true;
  /// |c_j| for j = 1..order_cap, c_j = (1/2 pi i) \oint (lambda - r)^{j-1} <g, R g> dlambda.
  std::vector<double> laurent_abs;
};

/// Order of the pole of the bilinear form <g, R(lambda) g> at r from contour integrals on a circle.
/// Throws IsolationError if the winding of W on the circle differs from expected_multiplicity
/// (when given) or from the winding on the half-radius circle.
ResidueReport residue_order(const PotentialModel& model, cplx r, double h, double radius,
                            const UniformGrid& grid, std::span<const double> g,
                            std::optional<int> expected_multiplicity = std::nullopt,
                            const ContinuationOptions& opts = {});

}  // namespace halfres
