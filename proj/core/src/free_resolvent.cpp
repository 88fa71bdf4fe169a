#include "halfres/free_resolvent.hpp"

#include <cmath>

#include "halfres/errors.hpp"
#include "halfres/singular_value.hpp"

namespace halfres {

cplx r0_kernel_line(cplx sigma, double x, double y) {
  if (sigma == cplx(0.0)) throw DomainError("free resolvent kernel: sigma must be nonzero");
  return 1i / (2.0 * sigma) * std::exp(1i * sigma * std::abs(x - y));
}

cplx r0_kernel_halfline(cplx sigma, double x, double y) {
  if (sigma == cplx(0.0)) throw DomainError("free resolvent kernel: sigma must be nonzero");
  return 1i / (2.0 * sigma) * (std::exp(1i * sigma * std::abs(x - y)) - std::exp(1i * sigma * (x + y)));
}

cplx m_kernel(cplx sigma, double x, double y) {
  return 0.5i * (std::exp(1i * sigma * (x - y)) + std::exp(-1i * sigma * (x - y)));
}

double reflection_identity_residual(cplx sigma, double x, double y, const LineKernel& kernel) {
  if (sigma == cplx(0.0)) throw DomainError("reflection identity: sigma must be nonzero");
  const cplx m = m_kernel(sigma, x, y);
  const double r1 = std::abs(kernel(sigma, x, y) - kernel(-sigma, x, y) - m / sigma);
  cplx phi_product = 0.0;
  for (double omega : {1.0, -1.0})
    phi_product += std::exp(1i * sigma * omega * x) * std::exp(-1i * sigma * omega * y);
  const double r2 = std::abs(m - 0.5i * phi_product);
  return std::max(r1, r2);
}

UniformGrid default_kernel_grid(cplx sigma, double gamma, const WeightFunction& weight,
                                double points_per_wavelength) {
  if (!(gamma > 0.0)) throw DomainError("kernel grid: gamma must be > 0");
  const double wavelength = 2.0 * kPi / std::max(std::abs(sigma), 1e-12);
  const double dx = std::min(0.05, wavelength / points_per_wavelength);
  const double x_max = weight.x_linear() + 12.0 / gamma;
  const double n = std::ceil(x_max / dx);
  return UniformGrid{n * dx, dx};
}

Eigen::MatrixXcd weighted_kernel_matrix(const std::function<cplx(double, double)>& kernel,
                                        double gamma, const WeightFunction& weight,
                                        const UniformGrid& grid, int s) {
  if (s < 0 || s > 2) throw DomainError("weighted kernel: derivative order must be 0, 1 or 2");
  const auto xs = grid.points();
  const auto q = grid.trapezoid_weights();
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = std::exp(-gamma * weight(xs[static_cast<std::size_t>(i)]));

  Eigen::MatrixXcd K(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      K(i, j) = e(i) * kernel(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]) * e(j);

  if (s > 0) {
    const double dx = grid.dx;
    Eigen::MatrixXcd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (s == 1) {
          if (i == 0) D(i, j) = (K(1, j) - K(0, j)) / dx;
          else if (i == n - 1) D(i, j) = (K(n - 1, j) - K(n - 2, j)) / dx;
          else D(i, j) = (K(i + 1, j) - K(i - 1, j)) / (2.0 * dx);
        } else {
          const Eigen::Index c = std::clamp<Eigen::Index>(i, 1, n - 2);
          D(i, j) = (K(c + 1, j) - 2.0 * K(c, j) + K(c - 1, j)) / (dx * dx);
        }
      }
    }
    K = std::move(D);
  }
  Eigen::VectorXd sq(n);
  for (Eigen::Index i = 0; i < n; ++i) sq(i) = std::sqrt(q[static_cast<std::size_t>(i)]);
  return sq.asDiagonal() * K * sq.asDiagonal();
}

double weighted_r0_norm(cplx sigma, double gamma, const WeightFunction& weight,
                        const UniformGrid& grid, int s) {
  if (sigma == cplx(0.0)) throw DomainError("weighted_r0_norm: sigma must be nonzero");
  if (!(gamma > 0.0)) throw DomainError("weighted_r0_norm: gamma must be > 0");
  if (sigma.imag() <= -gamma) throw DomainError("weighted_r0_norm: Im sigma must exceed -gamma");
  const double wavelength = 2.0 * kPi / std::abs(sigma);
  if (grid.dx > wavelength / 10.0)
    throw ResolutionError("weighted_r0_norm: fewer than 10 grid points per wavelength");
  const auto B = weighted_kernel_matrix(
      [sigma](double x, double y) { return r0_kernel_halfline(sigma, x, y); }, gamma, weight, grid, s);
  return largest_singular_value(B).value;
}

MDecayReport verify_m_decay(std::span<const cplx> sigmas, double gamma, double eps,
                            const WeightFunction& weight, std::optional<UniformGrid> grid) {
  if (sigmas.empty()) throw DomainError("verify_m_decay: empty frequency list");
  if (!(eps > 0.0) || !(gamma > eps)) throw DomainError("verify_m_decay: need 0 < eps < gamma");
  for (cplx s : sigmas) {
    if (std::abs(s.imag()) >= gamma - eps)
      throw DomainError("verify_m_decay: |Im sigma| must be below gamma - eps");
    if (s.real() < 1.0) throw DomainError("verify_m_decay: Re sigma must be >= 1");
  }
  MDecayReport rep;
  rep.inf = INFINITY;
  for (cplx s : sigmas) {
    const UniformGrid g = grid ? *grid : default_kernel_grid(s, gamma, weight);
    const auto B = weighted_kernel_matrix([s](double x, double y) { return m_kernel(s, x, y); },
                                          gamma, weight, g, 0);
    const double v = largest_singular_value(B).value;
    rep.norms.push_back(v);
    rep.sup = std::max(rep.sup, v);
    rep.inf = std::min(rep.inf, v);
  }
  rep.ratio = rep.inf > 0.0 ? rep.sup / rep.inf : INFINITY;
  return rep;
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double vx = sxx - sx * sx / n;
  if (vx <= 0.0) throw DomainError("fit_line: degenerate abscissae");
  SlopeFit fit;
  fit.slope = (sxy - sx * sy / n) / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double vy = syy - sy * sy / n;
  fit.r_squared = vy > 0.0 ? (fit.slope * (sxy - sx * sy / n)) / vy : 1.0;
  return fit;
}

}  // namespace halfres
