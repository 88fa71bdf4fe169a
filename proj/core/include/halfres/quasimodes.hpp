#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "halfres/model.hpp"
#include "halfres/types.hpp"

namespace halfres {

struct EigenPair {
  double eigenvalue = 0.0;  // lambda^2
  std::vector<double> x;    // grid including both Dirichlet ends
  std::vector<double> u;    // grid-normalized, u(0) = u(L) = 0
  double dx = 0.0;
};

/// Symmetric fourth-order energy-form discretization of -h^2 d a d + V on [0, L] with Dirichlet
/// ends: A = D^T diag(a at half points) D with a staggered fourth-order difference D and odd
/// reflection ghosts. n_interior unknowns.
Eigen::MatrixXd dirichlet_matrix(const PotentialModel& model, double L, double h, std::size_t n_interior);

/// Lowest `count` eigenpairs, sorted. The default grid is default_interior_points(model, L, h).
std::vector<EigenPair> dirichlet_eigensolve(const PotentialModel& model, double L, double h, std::size_t count,
                                            std::optional<std::size_t> n_interior = std::nullopt);

/// Interior points giving points_per_wavelength at energy max V + 1 (clamped to [400, 20000]).
std::size_t default_interior_points(const PotentialModel& model, double L, double h,
                                   double points_per_wavelength = 120.0);

struct CutoffSpec {
  double x_cut = 0.0;
  double width = 0.0;
};

/// Default cutoff width 4 h^{1/2} clipped to [0.2, 1].
double default_cutoff_width(double h);

struct Quasimode {
  std::vector<double> x;
  std::vector<double> u;
  double dx = 0.0;
  double lambda = 0.0;  // sqrt of the eigenvalue
  double h = 1.0;
  double accuracy = 0.0;
  double support_radius = 0.0;
  CutoffSpec cutoff{};
};

struct QuasimodeOptions {
  /// |u| at x_cut relative to max |u| must lie below this.
  double tail_threshold = 1e-8;
  /// Optional energy window (a0, b0) for lambda^2.
  std::optional<std::pair<double, double>> energy_window;
};

/// u = normalize(chi * eigenfunction) with chi = 1 on [0, x_cut] and 0 beyond x_cut + width.
/// The grid is extended with zeros up to L_out (>= support) so the residual is taken on the same
/// stencil as the eigenproblem. Throws BadCutoffError when the eigenfunction is not small at x_cut
/// and DomainError when lambda^2 lies outside the energy window.
Quasimode build_quasimode(const PotentialModel& model, const EigenPair& pair, double h, CutoffSpec cutoff,
                          const QuasimodeOptions& opts = {});

/// Grid norm of (P(h) - lambda^2) u with the quasimode stencil.
double quasimode_residual(const PotentialModel& model, const Quasimode& q);

/// <u, P(h) u> on the quasimode stencil.
double rayleigh_quotient(const PotentialModel& model, const Quasimode& q);

struct IndependenceReport {
  bool independent = false;
  double margin = 0.0;
  double threshold = 0.0;
};

/// margin = smallest singular value of the member matrix U (sqrt of the smallest Gram eigenvalue);
/// independent iff margin > 2 m h^N / M.
IndependenceReport independence_check(const std::vector<Quasimode>& family, double h, double N, double M);

}  // namespace halfres
