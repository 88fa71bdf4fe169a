#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "halfres/model.hpp"
#include "halfres/types.hpp"

namespace halfres {

/// Whole-line outgoing kernel (i/(2 sigma)) e^{i sigma |x-y|}.
cplx r0_kernel_line(cplx sigma, double x, double y);

/// Dirichlet half-line kernel (i/(2 sigma)) (e^{i sigma |x-y|} - e^{i sigma (x+y)}).
cplx r0_kernel_halfline(cplx sigma, double x, double y);

/// Spectral kernel M(sigma, x, y) = (i/2)(e^{i sigma (x-y)} + e^{-i sigma (x-y)}).
cplx m_kernel(cplx sigma, double x, double y);

using LineKernel = std::function<cplx(cplx, double, double)>;

/// max(|R0(sigma) - R0(-sigma) - M(sigma)/sigma|, |M - (i/2) Phi^t(sigma) Phi(-sigma)|) at (x, y).
/// The kernel is injectable so that fault-injected variants can be checked.
double reflection_identity_residual(cplx sigma, double x, double y,
                                    const LineKernel& kernel = r0_kernel_line);

/// Uniform grid on [0, x_linear + 12/gamma] with at least points_per_wavelength points per
/// wavelength 2 pi / |sigma| (and dx <= 0.05).
UniformGrid default_kernel_grid(cplx sigma, double gamma, const WeightFunction& weight,
                                double points_per_wavelength = 12.0);

/// Quadrature-weighted dense matrix of e^{-gamma phi} d^s K e^{-gamma phi} for a kernel K on a grid.
/// Derivatives in x are taken by finite differences of the weighted kernel columns.
Eigen::MatrixXcd weighted_kernel_matrix(const std::function<cplx(double, double)>& kernel,
                                        double gamma, const WeightFunction& weight,
                                        const UniformGrid& grid, int s = 0);

/// Largest singular value of the discretized e^{-gamma phi} d^s R0(sigma) e^{-gamma phi}.
/// Throws DomainError for Im sigma <= -gamma and ResolutionError for fewer than 10 points per
/// wavelength.
double weighted_r0_norm(cplx sigma, double gamma, const WeightFunction& weight,
                        const UniformGrid& grid, int s = 0);

struct MDecayReport {
  std::vector<double> norms;
  double sup = 0.0;
  double inf = 0.0;
  double ratio = 0.0;
};

/// Weighted norms of M(sigma) over a list of frequencies with |Im sigma| < gamma - eps.
MDecayReport verify_m_decay(std::span<const cplx> sigmas, double gamma, double eps,
                            const WeightFunction& weight,
                            std::optional<UniformGrid> grid = std::nullopt);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line y = slope * x + intercept.
SlopeFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace halfres
