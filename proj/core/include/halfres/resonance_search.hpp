#pragma once

#include <vector>

#include "halfres/complex_utils.hpp"
#include "halfres/continuation.hpp"
#include "halfres/model.hpp"
#include "halfres/types.hpp"

namespace halfres {

struct Resonance {
  cplx lambda;
  int multiplicity = 1;
  double h = 1.0;
  /// Numerical derivative of the determinant at lambda (first derivative; zero order > 1 makes it small).
  cplx wronskian_derivative;
  Rect source_window{};
};

/// Argument-principle count of zeros in a rectangle. Throws BoundaryZeroError when
/// min |f| <= boundary_tol * max |f| on the sampled boundary.
int winding_count(const AnalyticHandle& f, const Rect& rect, double boundary_tol = 1e-9);

struct ZeroEstimate {
  cplx zero;
  int multiplicity = 1;
  int iterations = 0;
  double last_step = 0.0;
  cplx derivative;
};

/// Newton refinement with central-difference derivatives (step 1e-6 * scale). The multiplicity is
/// the winding on a circle of radius max(10 |last step|, 1e-6 scale); once it exceeds one the
/// iteration switches to the multiplicity-corrected step.
/// Throws DivergenceError (carrying the best rectangle) after max_iterations.
ZeroEstimate refine_zero(const AnalyticHandle& f, cplx seed, double tol = 1e-12,
                         int max_iterations = 100);

struct ScanOptions {
  double boundary_tol = 1e-9;
  double dedup_tol = 1e-10;
  double zero_tol = 1e-12;
  /// Resonances with Im lambda above this are reported as spurious.
  double spurious_im = 1e-8;
  int max_depth = 48;
  /// Unit S of the jitter schedule +-S/7, +-S/3; zero picks 1% of the smaller rectangle side.
  double jitter_unit = 0.0;
  /// Polish simple zeros with the extended-precision determinant.
  bool extended_polish = false;
  ContinuationOptions continuation{};
};

struct SubdivisionRecord {
  Rect rect;
  int parent_count = 0;
  int children_sum = 0;
  int depth = 0;
};

struct ScanResult {
  std::vector<Resonance> resonances;
  std::vector<Resonance> spurious;
  int total_winding = 0;
  /// Rectangle actually counted (after jitter, if any).
  Rect counted_rect{};
  std::vector<SubdivisionRecord> subdivisions;
};

/// Zeros of an analytic function in a rectangle by recursive subdivision with a conservation
/// check at every split. Returned multiplicities sum to the winding count of the rectangle.
ScanResult find_zeros(const AnalyticHandle& f, const Rect& rect, double h = 1.0,
                      const ScanOptions& opts = {});

/// Zeros of the matching determinant in a rectangle of the lambda-plane.
ScanResult scan_resonances(const PotentialModel& model, const Rect& rect, double h,
                           const ScanOptions& opts = {});
ScanResult scan_resonances(const PotentialModel& model, const FrequencyWindow& window, double h,
                           const ScanOptions& opts = {});

/// (log sup_{|z-c|=rho1} |f| - log |f(c)|) / log(rho1/rho2), an upper bound for the number of
/// zeros in the disk of radius rho2.
double jensen_zero_bound(const AnalyticHandle& f, cplx center, double rho1, double rho2,
                         std::size_t samples = 4096);

struct BlaschkeCertificate {
  /// Certified lower bound for log |f| on the rho3-disk outside the excluded disks.
  double min_log_modulus = 0.0;
  std::vector<Disk> excluded_disks;
  /// Minimum of |phi| on the rho2-circle (>= 1 when the zero list is complete).
  double phi_boundary_min = 0.0;
  double caratheodory_term = 0.0;
  double blaschke_term = 0.0;
  /// Direct sampling of log |f| at check points in the rho3-disk outside the excluded disks.
  double sampled_min_log_modulus = 0.0;
  std::size_t sampled_points = 0;
  bool sound = false;
};

/// Lower bound for log |f| on D(c, rho3) minus the disks D(z_j, S) via the Blaschke product of the
/// zeros in D(c, rho2) and the Caratheodory estimate for f / phi.
/// Throws CompletenessError when the winding on the rho2-circle differs from zeros.size().
BlaschkeCertificate blaschke_lower_bound(const AnalyticHandle& f, cplx center, double rho1,
                                         double rho2, double rho3, const std::vector<cplx>& zeros,
                                         double S, std::size_t check_points = 500);

/// Blaschke product phi(lambda) normalized so that phi(center) = 1.
cplx blaschke_product(cplx lambda, cplx center, double rho2, const std::vector<cplx>& zeros);

}  // namespace halfres
