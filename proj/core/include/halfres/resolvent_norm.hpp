#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halfres/complex_utils.hpp"
#include "halfres/continuation.hpp"
#include "halfres/model.hpp"
#include "halfres/quasimodes.hpp"
#include "halfres/resonance_search.hpp"
#include "halfres/types.hpp"

namespace halfres {

struct NormOptions {
  double rtol = 1e-4;
  int max_iterations = 3000;
  /// Typical |W| over the window; the near-resonance threshold is 1e-8 max(1, w_scale).
  double w_scale = 1.0;
  ContinuationOptions continuation{};
};

/// Uniform grid on [0, x_linear + 12/gamma] resolving the semiclassical wavelength 2 pi h / |lambda|
/// with points_per_wavelength points (dx <= 0.05).
UniformGrid default_resolvent_grid(double lambda_abs, double h, double gamma, const WeightFunction& weight,
                                   double points_per_wavelength = 12.0);

/// Largest singular value of g -> e^{-gamma phi} R(lambda, h) e^{-gamma phi} g discretized with trapezoid
/// weights, by power iteration with O(n) matrix-vector products.
/// Throws NearResonanceError when |W| is below the deflation threshold.
double weighted_resolvent_norm(const PotentialModel& model, cplx lambda, double h, double gamma,
                               const WeightFunction& weight, const UniformGrid& grid, const NormOptions& opts = {});

/// Dense matrix of the same discretized operator (for cross-checks on small grids).
Eigen::MatrixXcd weighted_resolvent_matrix(const PotentialModel& model, cplx lambda, double h, double gamma,
                                           const WeightFunction& weight, const UniformGrid& grid,
                                           const ContinuationOptions& opts = {});

struct NormScan {
  std::vector<cplx> lambdas;
  /// NaN for points inside an exclusion disk.
  std::vector<double> norms;
  std::vector<bool> excluded;
  double h = 1.0;
  double gamma = 1.0;
  double S = 0.0;
  std::string model_label;
  std::vector<Disk> exclusions;
};

/// Weighted norms at the given points; points inside any exclusion disk are skipped.
NormScan norm_scan(const PotentialModel& model, const std::vector<cplx>& lambdas, double h, double gamma,
                   const WeightFunction& weight, const UniformGrid& grid, const std::vector<Disk>& exclusions,
                   const NormOptions& opts = {}, std::size_t threads = 1);

/// Scan data for one h together with the resonances found in the same window.
struct AprioriInput {
  NormScan scan;
  std::vector<Resonance> resonances;
  int total_winding = 0;
};

struct BoundViolation {
  double h = 0.0;
  cplx lambda;
  double norm = 0.0;
  double bound = 0.0;
};

struct AprioriReport {
  /// "pass" or "no fit".
  std::string status;
  bool feasible = false;
  double A_fit = 0.0;
  double p_fit = 0.0;
  std::vector<BoundViolation> violations;
  std::size_t points_used = 0;
  std::size_t points_excluded = 0;
};

/// Smallest p in {0, 0.5, ..., 4} (then smallest A <= A_cap) with norm <= exp(A h^{-p} log(1/S)) at every
/// scanned point outside the S-disks. Throws CompletenessError when a total winding differs from
/// the sum of multiplicities.
AprioriReport apriori_bound_check(const std::vector<AprioriInput>& inputs, double A_cap = 10.0);

struct MaxPrincipleReport {
  bool holds = false;
  std::optional<cplx> witness;
  double max_inner = 0.0;
  double bound = 0.0;
  double max_top = 0.0;
  double max_region = 0.0;
};

struct MaxPrincipleParams {
  double a = 0.0;
  double b = 1.0;
  double w = 0.0;
  double alpha = 1.0;
  double S_minus = 0.01;
  double S_plus = 0.01;
  double M = 1.0;
  std::size_t samples_per_edge = 256;
  std::size_t inner_nx = 101;
  std::size_t inner_ny = 41;
};

/// Default margin w = S_minus alpha log(alpha).
double default_margin(double S_minus, double alpha);

/// Checks the hypotheses by sampling |F| on the boundary of [a-w, b+w] + i[-alpha S_minus, S_plus]
/// (|F| <= e^alpha) and on its top edge (|F| <= M), then samples [a, b] + i[-S_minus, S_plus] and
/// reports whether |F| <= e^3 M there. Throws HypothesisError when a hypothesis fails.
MaxPrincipleReport max_principle_check(const AnalyticHandle& F, const MaxPrincipleParams& params);

/// max |F| over the hypothesis boundary and over the top edge, as used by max_principle_check.
std::pair<double, double> max_principle_boundary_maxima(const AnalyticHandle& F, const MaxPrincipleParams& params);

struct TransferReport {
  double required_norm = 0.0;
  double fitted_bound = 0.0;
  /// required_norm > fitted_bound: the resonance-free bound cannot hold at lambda(h).
  bool contradiction = false;
  std::optional<double> nearest_resonance_distance;
  /// A resonance lies within c(h) of lambda(h).
  bool explained_by_resonance = false;
};

/// Lower bound 1/R(h) for the weighted resolvent norm at lambda(h) implied by the quasimode, compared with
/// the fitted bound exp(A h^{-p} log(1/S)).
TransferReport resonance_free_bound_transfer(const AprioriReport& fit, double S, const Quasimode& quasimode,
                                             const std::vector<Resonance>& resonances = {},
                                             std::optional<double> c_h = std::nullopt);

/// Distance from z to the proxy spectrum {E_k} U [0, inf).
double distance_to_spectrum(cplx z, const std::vector<double>& eigenvalues);

}  // namespace halfres
