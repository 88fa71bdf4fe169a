#include "halfres/resolvent_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "halfres/errors.hpp"
#include "halfres/parallel.hpp"
#include "halfres/singular_value.hpp"

namespace halfres {

namespace {

struct WeightedGreen {
  GreenData data;
  std::vector<double> scale;  // sqrt(q_i) e^{-gamma phi(x_i)}
};

WeightedGreen weighted_green(const PotentialModel& model, cplx lambda, double h, double gamma,
                             const WeightFunction& weight, const UniformGrid& grid, const ContinuationOptions& opts,
                             double w_scale) {
  WeightedGreen wg{green_data(model, lambda, h, grid, opts), {}};
  if (!std::isfinite(std::abs(wg.data.W)) || std::abs(wg.data.W) < 1e-8 * std::max(1.0, w_scale))
    throw NearResonanceError("weighted resolvent: Wronskian below the deflation threshold", lambda,
                             std::abs(wg.data.W));
  const auto q = grid.trapezoid_weights();
  wg.scale.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) wg.scale[i] = std::sqrt(q[i]) * std::exp(-gamma * weight(grid.x(i)));
  return wg;
}

// out = S G S in, S = diag(scale); G symmetric semiseparable.
void apply_symmetric(const WeightedGreen& wg, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  const auto& d = wg.data;
  const Eigen::Index n = in.size();
  const cplx c = 1.0 / (d.h * d.h * d.W);
  Eigen::VectorXcd t(n);
  for (Eigen::Index i = 0; i < n; ++i) t(i) = wg.scale[static_cast<std::size_t>(i)] * in(i);
  std::vector<cplx> upper(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = n; i-- > 0;)
    upper[static_cast<std::size_t>(i)] = upper[static_cast<std::size_t>(i) + 1] + d.f[static_cast<std::size_t>(i)] * t(i);
  out.resize(n);
  cplx lower = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    lower += d.u0[k] * t(i);
    out(i) = wg.scale[k] * c * (d.f[k] * lower + d.u0[k] * upper[k + 1]);
  }
}

}  // namespace

UniformGrid default_resolvent_grid(double lambda_abs, double h, double gamma, const WeightFunction& weight,
                                   double points_per_wavelength) {
  if (!(h > 0.0) || !(gamma > 0.0)) throw DomainError("resolvent grid: need h > 0 and gamma > 0");
  const double wavelength = 2.0 * kPi * h / std::max(lambda_abs, 1e-12);
  const double dx = std::min(0.05, wavelength / points_per_wavelength);
  const double x_max = weight.x_linear() + 12.0 / gamma;
  return UniformGrid{std::ceil(x_max / dx) * dx, dx};
}

double weighted_resolvent_norm(const PotentialModel& model, cplx lambda, double h, double gamma,
                               const WeightFunction& weight, const UniformGrid& grid, const NormOptions& opts) {
  if (!(gamma > 0.0)) throw DomainError("weighted_resolvent_norm: gamma must be > 0");
  if (grid.dx > 2.0 * kPi * h / std::max(std::abs(lambda), 1e-12) / 10.0)
    throw ResolutionError("weighted_resolvent_norm: grid does not resolve the semiclassical wavelength");
  const auto wg = weighted_green(model, lambda, h, gamma, weight, grid, opts.continuation, opts.w_scale);
  const auto n = static_cast<Eigen::Index>(grid.size());
  auto apply = [&wg](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { apply_symmetric(wg, in, out); };
  // B is complex symmetric, so B^H v = conj(B conj(v)).
  auto adjoint = [&wg](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    Eigen::VectorXcd tmp;
    apply_symmetric(wg, in.conjugate(), tmp);
    out = tmp.conjugate();
  };
  return largest_singular_value(n, apply, adjoint, opts.rtol, opts.max_iterations).value;
}

Eigen::MatrixXcd weighted_resolvent_matrix(const PotentialModel& model, cplx lambda, double h, double gamma,
                                           const WeightFunction& weight, const UniformGrid& grid,
                                           const ContinuationOptions& opts) {
  const auto wg = weighted_green(model, lambda, h, gamma, weight, grid, opts, 1.0);
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd B(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      B(i, j) = wg.scale[static_cast<std::size_t>(i)] *
                green_function(wg.data, static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                wg.scale[static_cast<std::size_t>(j)];
  return B;
}

NormScan norm_scan(const PotentialModel& model, const std::vector<cplx>& lambdas, double h, double gamma,
                   const WeightFunction& weight, const UniformGrid& grid, const std::vector<Disk>& exclusions,
                   const NormOptions& opts, std::size_t threads) {
  NormScan scan;
  scan.lambdas = lambdas;
  scan.h = h;
  scan.gamma = gamma;
  scan.model_label = model.label;
  scan.exclusions = exclusions;
  if (!exclusions.empty()) scan.S = exclusions.front().radius;
  scan.norms.assign(lambdas.size(), std::numeric_limits<double>::quiet_NaN());
  scan.excluded.assign(lambdas.size(), false);
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    for (const auto& d : exclusions)
      if (d.contains(lambdas[i])) scan.excluded[i] = true;
  parallel_for(lambdas.size(), threads, [&](std::size_t i) {
    if (scan.excluded[i]) return;
    scan.norms[i] = weighted_resolvent_norm(model, lambdas[i], h, gamma, weight, grid, opts);
  });
  return scan;
}

AprioriReport apriori_bound_check(const std::vector<AprioriInput>& inputs, double A_cap) {
  if (inputs.empty()) throw DomainError("apriori_bound_check: no scans");
  for (const auto& in : inputs) {
    int total = 0;
    for (const auto& r : in.resonances) total += r.multiplicity;
    if (total != in.total_winding)
      throw CompletenessError("apriori_bound_check: resonance list does not match the winding count");
    if (!(in.scan.S > 0.0 && in.scan.S < 1.0)) throw DomainError("apriori_bound_check: need 0 < S < 1");
  }
  struct Point {
    double h, logS, log_norm;
    cplx lambda;
    double norm;
  };
  std::vector<Point> pts;
  AprioriReport rep;
  for (const auto& in : inputs) {
    for (std::size_t i = 0; i < in.scan.lambdas.size(); ++i) {
      bool excluded = in.scan.excluded.size() > i && in.scan.excluded[i];
      for (const auto& r : in.resonances) excluded = excluded || std::abs(in.scan.lambdas[i] - r.lambda) < in.scan.S;
      if (excluded || !std::isfinite(in.scan.norms[i])) {
        ++rep.points_excluded;
        continue;
      }
      pts.push_back({in.scan.h, std::log(1.0 / in.scan.S), std::log(in.scan.norms[i]), in.scan.lambdas[i], in.scan.norms[i]});
    }
  }
  rep.points_used = pts.size();
  auto A_for = [&](double p) {
    double A = 0.0;
    for (const auto& pt : pts) A = std::max(A, pt.log_norm / (std::pow(pt.h, -p) * pt.logS));
    return A;
  };
  for (int k = 0; k <= 8; ++k) {
    const double p = 0.5 * k;
    const double A = A_for(p);
    if (A <= A_cap) {
      rep.feasible = true;
      rep.status = "pass";
      rep.p_fit = p;
      rep.A_fit = A;
      return rep;
    }
  }
  rep.status = "no fit";
  rep.p_fit = 4.0;
  rep.A_fit = A_cap;
  for (const auto& pt : pts) {
    const double bound = std::exp(A_cap * std::pow(pt.h, -4.0) * pt.logS);
    if (pt.norm > bound) rep.violations.push_back({pt.h, pt.lambda, pt.norm, bound});
  }
  return rep;
}

double default_margin(double S_minus, double alpha) { return S_minus * alpha * std::log(alpha); }

std::pair<double, double> max_principle_boundary_maxima(const AnalyticHandle& F, const MaxPrincipleParams& p) {
  const Rect big{cplx(p.a - p.w, -p.alpha * p.S_minus), cplx(p.b + p.w, p.S_plus)};
  const std::size_t n = std::max<std::size_t>(p.samples_per_edge, 2);
  double region = 0.0, top = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    const double x = big.lo.real() + t * big.width();
    const double y = big.lo.imag() + t * big.height();
    const double ft = std::abs(F(cplx(x, big.hi.imag())));
    top = std::max(top, ft);
    region = std::max({region, ft, std::abs(F(cplx(x, big.lo.imag()))), std::abs(F(cplx(big.lo.real(), y))),
                       std::abs(F(cplx(big.hi.real(), y)))});
  }
  return {region, top};
}

MaxPrincipleReport max_principle_check(const AnalyticHandle& F, const MaxPrincipleParams& p) {
  if (!(p.S_plus > 0.0 && p.S_plus <= p.S_minus)) throw HypothesisError("max principle: need 0 < S_plus <= S_minus");
  if (!(p.alpha >= 1.0)) throw HypothesisError("max principle: need alpha >= 1");
  if (!(p.S_minus * p.alpha * std::log(p.alpha) <= p.w * (1.0 + 1e-12)))
    throw HypothesisError("max principle: need S_minus alpha log(alpha) <= w");
  if (!(p.M >= 1.0)) throw HypothesisError("max principle: need M >= 1");
  if (!(p.b > p.a)) throw HypothesisError("max principle: need a < b");
  MaxPrincipleReport rep;
  const auto [region, top] = max_principle_boundary_maxima(F, p);
  rep.max_region = region;
  rep.max_top = top;
  if (region > std::exp(p.alpha) * (1.0 + 1e-9)) throw HypothesisError("max principle: |F| exceeds e^alpha on the region");
  if (top > p.M * (1.0 + 1e-9)) throw HypothesisError("max principle: |F| exceeds M on the top edge");
  rep.bound = std::exp(3.0) * p.M;
  const Rect inner{cplx(p.a, -p.S_minus), cplx(p.b, p.S_plus)};
  for (const cplx z : rect_grid(inner, p.inner_nx, p.inner_ny)) {
    const double v = std::abs(F(z));
    if (v > rep.max_inner) rep.max_inner = v;
    if (!rep.witness && v > rep.bound * (1.0 + 1e-12)) rep.witness = z;
  }
  rep.holds = !rep.witness.has_value();
  return rep;
}

TransferReport resonance_free_bound_transfer(const AprioriReport& fit, double S, const Quasimode& quasimode,
                                             const std::vector<Resonance>& resonances, std::optional<double> c_h) {
  if (!(S > 0.0 && S < 1.0)) throw DomainError("bound transfer: need 0 < S < 1");
  TransferReport rep;
  rep.required_norm = quasimode.accuracy > 0.0 ? 1.0 / quasimode.accuracy : std::numeric_limits<double>::infinity();
  rep.fitted_bound = std::exp(fit.A_fit * std::pow(quasimode.h, -fit.p_fit) * std::log(1.0 / S));
  rep.contradiction = rep.required_norm > rep.fitted_bound;
  for (const auto& r : resonances) {
    const double d = std::abs(r.lambda - quasimode.lambda);
    if (!rep.nearest_resonance_distance || d < *rep.nearest_resonance_distance) rep.nearest_resonance_distance = d;
  }
  rep.explained_by_resonance = c_h && rep.nearest_resonance_distance && *rep.nearest_resonance_distance <= *c_h;
  return rep;
}

double distance_to_spectrum(cplx z, const std::vector<double>& eigenvalues) {
  double d = z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z);
  for (double e : eigenvalues) d = std::min(d, std::abs(z - e));
  return d;
}

}  // namespace halfres
