#include "halfres/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "halfres/errors.hpp"

namespace halfres {

namespace {

double decay_gap(const PotentialModel& model, cplx sigma) {
  return model.decay_rate() - 2.0 * std::max(0.0, -sigma.imag());
}

OdeRhs jost_rhs(const PotentialModel& model, double h, cplx sigma) {
  const double h2 = h * h;
  return [&model, h, h2, sigma](double x, const OdeState& y) {
    const double a = model.a(x, h);
    const double q = model.V(x, h) / h2;
    return OdeState{y[1] / a - 1i * sigma * y[0], (q - sigma * sigma) * y[0] - 1i * sigma * y[1]};
  };
}

OdeRhs regular_rhs(const PotentialModel& model, double h, cplx sigma) {
  const double h2 = h * h;
  return [&model, h, h2, sigma](double x, const OdeState& y) {
    const double a = model.a(x, h);
    const double q = model.V(x, h) / h2;
    return OdeState{y[1] / a, (q - sigma * sigma) * y[0]};
  };
}

// Outgoing data at xs with a first Born correction of the free solution m = 1.
template <class T>
std::array<std::complex<T>, 2> jost_start_t(const PotentialModel& model, double h, std::complex<T> sigma, double xs) {
  using C = std::complex<T>;
  const C I(0, 1);
  const T a_xs = model.a(xs, h);
  if (model.compact_support && xs >= *model.compact_support) return {C(1), a_xs * I * sigma};
  const cplx sigma_d(static_cast<double>(sigma.real()), static_cast<double>(sigma.imag()));
  const double kappa = std::max(decay_gap(model, sigma_d), 1e-3);
  const double length = 40.0 / kappa;
  const std::size_t n = 2 * static_cast<std::size_t>(std::max(1000.0, 20.0 * std::abs(sigma_d) * length));
  const T dt = static_cast<T>(length) / static_cast<T>(n);
  C int_m(0), int_mp(0);
  const bool tiny = std::abs(sigma_d) < 1e-8;
  for (std::size_t k = 0; k <= n; ++k) {
    const T s = static_cast<T>(k) * dt;
    const T w = (k == 0 || k == n) ? T(1) : (k % 2 ? T(4) : T(2));
    const T q = static_cast<T>(model.V(xs + static_cast<double>(s), h)) / static_cast<T>(h * h);
    const C e = std::exp(T(2) * I * sigma * s);
    const C kernel = tiny ? C(s) : (e - T(1)) / (T(2) * I * sigma);
    int_m += w * kernel * q;
    int_mp -= w * e * q;
  }
  int_m *= dt / T(3);
  int_mp *= dt / T(3);
  const C m = T(1) + int_m;
  return {m, a_xs * (int_mp + I * sigma * m)};
}

OdeState jost_start(const PotentialModel& model, double h, cplx sigma, double xs) {
  return jost_start_t<double>(model, h, sigma, xs);
}

std::vector<double> stops_with(const PotentialModel& model, std::span<const double> extra) {
  std::vector<double> s(model.breakpoints.begin(), model.breakpoints.end());
  s.insert(s.end(), extra.begin(), extra.end());
  return s;
}

// Index of each requested point in the trajectory mesh (exact node match).
std::vector<std::size_t> node_indices(const OdeTrajectory& traj, std::span<const double> pts) {
  std::vector<std::size_t> order(traj.mesh.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return traj.mesh[a] < traj.mesh[b]; });
  std::vector<std::size_t> out;
  out.reserve(pts.size());
  for (double x : pts) {
    auto it = std::lower_bound(order.begin(), order.end(), x,
                               [&](std::size_t i, double v) { return traj.mesh[i] < v; });
    if (it == order.end() || traj.mesh[*it] != x) throw DomainError("continuation: sample point missing from mesh");
    out.push_back(*it);
  }
  return out;
}

double wronskian_extent(const PotentialModel& model) { return model.x_box > 0.0 ? model.x_box : 1.0; }

void check_h(double h) {
  if (!(h > 0.0)) throw DomainError("continuation: h must be > 0");
}

// Each interval split into k equal parts; original nodes are kept exactly.
std::vector<double> subdivide(const std::vector<double>& mesh, int k) {
  if (k <= 1 || mesh.size() < 2) return mesh;
  std::vector<double> out;
  out.reserve((mesh.size() - 1) * static_cast<std::size_t>(k) + 1);
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    out.push_back(mesh[i]);
    for (int j = 1; j < k; ++j) out.push_back(mesh[i] + (mesh[i + 1] - mesh[i]) * j / k);
  }
  out.push_back(mesh.back());
  return out;
}

MatchingDeterminant summarize(cplx lambda, double h, std::vector<double> pts, std::vector<cplx> samples) {
  MatchingDeterminant md;
  md.lambda = lambda;
  md.h = h;
  cplx mean = 0.0;
  for (cplx w : samples) mean += w;
  mean /= static_cast<double>(samples.size());
  double spread = 0.0, var = 0.0;
  for (cplx w : samples) {
    spread = std::max(spread, std::abs(w - mean));
    var += std::norm(w - mean);
  }
  const double scale = std::abs(mean) > 0.0 ? std::abs(mean) : 1.0;
  md.value = mean;
  md.relative_spread = spread / scale;
  md.relative_std = std::sqrt(var / static_cast<double>(samples.size())) / scale;
  md.eval_points = std::move(pts);
  md.samples = std::move(samples);
  return md;
}

}  // namespace

double jost_tail_radius(const PotentialModel& model, cplx sigma, double h, const ContinuationOptions& opts) {
  check_h(h);
  if (model.compact_support) return *model.compact_support;
  const double kappa = decay_gap(model, sigma);
  if (kappa <= 2.0 * opts.strip_margin)
    throw StripError("continuation: Im sigma too negative for the declared decay rate");
  const double arg = model.decay_const / (kappa * h * h * opts.tail_tol);
  return std::max(model.x_box, arg > 1.0 ? std::log(arg) / kappa : 0.0);
}

std::vector<double> wronskian_points(const PotentialModel& model, double /*x_tail*/, int count) {
  if (count < 2) throw DomainError("wronskian_points: need at least two points");
  const double xw = wronskian_extent(model);
  std::vector<double> pts(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) pts[static_cast<std::size_t>(k)] = xw * k / (count - 1);
  return pts;
}

JostSolution integrate_jost(const PotentialModel& model, cplx lambda, double h,
                            const ContinuationOptions& opts, std::span<const double> sample_points) {
  check_h(h);
  const cplx sigma = lambda / h;
  JostSolution js;
  js.lambda = lambda;
  js.h = h;
  js.x_tail = jost_tail_radius(model, sigma, h, opts);
  double xs = std::max(js.x_tail, opts.start_min);
  for (double x : sample_points) {
    if (x < 0.0) throw DomainError("integrate_jost: sample points must be >= 0");
    xs = std::max(xs, x);
  }
  js.x_start = xs;
  const auto stops = stops_with(model, sample_points);
  const auto traj = integrate_adaptive(jost_rhs(model, h, sigma), xs, 0.0, jost_start(model, h, sigma, xs),
                                       opts.ode, stops);
  const auto idx = node_indices(traj, sample_points);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double x = sample_points[k];
    const OdeState& s = traj.states[idx[k]];
    const cplx e = std::exp(1i * sigma * x);
    js.x.push_back(x);
    js.m.push_back(s[0]);
    js.f.push_back(e * s[0]);
    js.af_prime.push_back(e * s[1]);
  }
  return js;
}

RegularSolution regular_solution(const PotentialModel& model, cplx lambda, double h,
                                 std::span<const double> sample_points, const ContinuationOptions& opts) {
  check_h(h);
  const cplx sigma = lambda / h;
  double x_end = 0.0;
  for (double x : sample_points) {
    if (x < 0.0) throw DomainError("regular_solution: sample points must be >= 0");
    x_end = std::max(x_end, x);
  }
  const auto stops = stops_with(model, sample_points);
  const auto traj = integrate_adaptive(regular_rhs(model, h, sigma), 0.0, x_end,
                                       OdeState{0.0, model.a(0.0, h)}, opts.ode, stops);
  RegularSolution rs;
  rs.lambda = lambda;
  rs.h = h;
  const auto idx = node_indices(traj, sample_points);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    rs.x.push_back(sample_points[k]);
    rs.u.push_back(traj.states[idx[k]][0]);
    rs.au_prime.push_back(traj.states[idx[k]][1]);
  }
  return rs;
}

MatchingDeterminant wronskian(const PotentialModel& model, cplx lambda, double h, const ContinuationOptions& opts) {
  auto pts = wronskian_points(model, 0.0, opts.wronskian_points);
  const auto js = integrate_jost(model, lambda, h, opts, pts);
  const auto rs = regular_solution(model, lambda, h, pts, opts);
  std::vector<cplx> samples(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k)
    samples[k] = js.f[k] * rs.au_prime[k] - js.af_prime[k] * rs.u[k];
  return summarize(lambda, h, std::move(pts), std::move(samples));
}

WronskianEvaluator::WronskianEvaluator(PotentialModel model, double h, Rect region, ContinuationOptions opts)
    : model_(std::move(model)), h_(h), region_(region), opts_(opts) {
  check_h(h_);
  const cplx worst_sigma(region_.center().real() / h_, region_.lo.imag() / h_);
  x_tail_ = jost_tail_radius(model_, worst_sigma, h_, opts_);
  eval_points_ = wronskian_points(model_, x_tail_, opts_.wronskian_points);
  x_start_ = std::max({x_tail_, opts_.start_min, eval_points_.back()});
  const auto stops = stops_with(model_, eval_points_);
  const std::vector<cplx> probes{region_.lo, region_.hi, cplx(region_.lo.real(), region_.hi.imag()),
                                 cplx(region_.hi.real(), region_.lo.imag()), region_.center()};
  std::vector<std::vector<double>> jm, rm;
  for (cplx lam : probes) {
    const cplx sigma = lam / h_;
    jm.push_back(integrate_adaptive(jost_rhs(model_, h_, sigma), x_start_, 0.0,
                                    jost_start(model_, h_, sigma, x_start_), opts_.ode, stops).mesh);
    rm.push_back(integrate_adaptive(regular_rhs(model_, h_, sigma), 0.0, eval_points_.back(),
                                    OdeState{0.0, model_.a(0.0, h_)}, opts_.ode, stops).mesh);
  }
  jost_mesh_ = merge_meshes(jm);
  regular_mesh_ = merge_meshes(rm);
}

MatchingDeterminant WronskianEvaluator::evaluate(cplx lambda) const {
  const cplx sigma = lambda / h_;
  if (!model_.compact_support && decay_gap(model_, sigma) <= 2.0 * opts_.strip_margin)
    throw StripError("continuation: Im sigma too negative for the declared decay rate");
  const auto jt = integrate_on_mesh(jost_rhs(model_, h_, sigma), jost_mesh_, jost_start(model_, h_, sigma, x_start_));
  const auto rt = integrate_on_mesh(regular_rhs(model_, h_, sigma), regular_mesh_, OdeState{0.0, model_.a(0.0, h_)});
  const auto ji = node_indices(jt, eval_points_);
  const auto ri = node_indices(rt, eval_points_);
  std::vector<cplx> samples(eval_points_.size());
  for (std::size_t k = 0; k < eval_points_.size(); ++k) {
    const OdeState& j = jt.states[ji[k]];
    const OdeState& r = rt.states[ri[k]];
    samples[k] = std::exp(1i * sigma * eval_points_[k]) * (j[0] * r[1] - j[1] * r[0]);
  }
  return summarize(lambda, h_, eval_points_, std::move(samples));
}

xcplx WronskianEvaluator::evaluate_extended(xcplx lambda) const {
  using R = long double;
  const xcplx I(0, 1);
  const xcplx sigma = lambda / static_cast<R>(h_);
  const R h2 = static_cast<R>(h_) * static_cast<R>(h_);
  const PotentialModel& m = model_;
  const double h = h_;
  const OdeRhsX jost = [&m, h, h2, sigma, I](R x, const OdeStateX& y) {
    const R a = m.a(static_cast<double>(x), h);
    const R q = static_cast<R>(m.V(static_cast<double>(x), h)) / h2;
    return OdeStateX{y[1] / a - I * sigma * y[0], (q - sigma * sigma) * y[0] - I * sigma * y[1]};
  };
  const OdeRhsX regular = [&m, h, h2, sigma](R x, const OdeStateX& y) {
    const R a = m.a(static_cast<double>(x), h);
    const R q = static_cast<R>(m.V(static_cast<double>(x), h)) / h2;
    return OdeStateX{y[1] / a, (q - sigma * sigma) * y[0]};
  };
  const auto jm = subdivide(jost_mesh_, opts_.extended_subdivision);
  const auto rm = subdivide(regular_mesh_, opts_.extended_subdivision);
  const auto js = integrate_on_mesh_extended(jost, jm, jost_start_t<R>(model_, h_, sigma, x_start_));
  const auto rs = integrate_on_mesh_extended(regular, rm, OdeStateX{xcplx(0), xcplx(model_.a(0.0, h_))});
  xcplx sum(0);
  for (double x : eval_points_) {
    const auto ji = static_cast<std::size_t>(std::find(jm.begin(), jm.end(), x) - jm.begin());
    const auto ri = static_cast<std::size_t>(std::find(rm.begin(), rm.end(), x) - rm.begin());
    if (ji == jm.size() || ri == rm.size())
      throw DomainError("continuation: sample point missing from mesh");
    sum += std::exp(I * sigma * static_cast<R>(x)) * (js[ji][0] * rs[ri][1] - js[ji][1] * rs[ri][0]);
  }
  return sum / static_cast<R>(eval_points_.size());
}

ExtendedZero polish_zero_extended(const WronskianEvaluator& ev, cplx seed, int max_iterations) {
  using R = long double;
  const xcplx I(0, 1);
  ExtendedZero out;
  xcplx z(seed.real(), seed.imag());
  R best_abs = std::abs(ev.evaluate_extended(z));
  out.lambda = z;
  R prev_step = std::numeric_limits<R>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    const R d = 1e-7L * std::max(R(1), std::abs(z));
    const xcplx deriv = (ev.evaluate_extended(z + d) - ev.evaluate_extended(z - d) -
                         I * (ev.evaluate_extended(z + I * d) - ev.evaluate_extended(z - I * d))) /
                        (R(4) * d);
    const xcplx step = ev.evaluate_extended(z) / deriv;
    z -= step;
    out.iterations = it;
    out.last_step = static_cast<double>(std::abs(step));
    const R val = std::abs(ev.evaluate_extended(z));
    if (val <= best_abs) {
      best_abs = val;
      out.lambda = z;
    }
    if (std::abs(step) <= 1e-18L * std::max(R(1), std::abs(z)) || std::abs(step) >= prev_step) break;
    prev_step = std::abs(step);
  }
  out.value_abs = static_cast<double>(best_abs);
  return out;
}

AnalyticHandle WronskianEvaluator::handle() const {
  auto self = std::make_shared<const WronskianEvaluator>(*this);
  AnalyticHandle hd;
  hd.eval = [self](cplx z) { return self->evaluate(z).value; };
  hd.domain = region_;
  hd.declared_analytic = true;
  hd.label = "W[" + model_.label + "]";
  return hd;
}

GreenData green_data(const PotentialModel& model, cplx lambda, double h, const UniformGrid& grid,
                     const ContinuationOptions& opts) {
  const auto xs = grid.points();
  const auto wp = wronskian_points(model, 0.0, opts.wronskian_points);
  std::vector<double> pts = xs;
  pts.insert(pts.end(), wp.begin(), wp.end());
  const auto js = integrate_jost(model, lambda, h, opts, pts);
  const auto rs = regular_solution(model, lambda, h, pts, opts);
  GreenData gd;
  gd.lambda = lambda;
  gd.h = h;
  gd.grid = grid;
  gd.u0.assign(rs.u.begin(), rs.u.begin() + static_cast<std::ptrdiff_t>(xs.size()));
  gd.f.assign(js.f.begin(), js.f.begin() + static_cast<std::ptrdiff_t>(xs.size()));
  cplx w = 0.0;
  for (std::size_t k = xs.size(); k < pts.size(); ++k) w += js.f[k] * rs.au_prime[k] - js.af_prime[k] * rs.u[k];
  gd.W = w / static_cast<double>(wp.size());
  return gd;
}

cplx green_function(const GreenData& data, std::size_t i, std::size_t j) {
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  return data.u0[lo] * data.f[hi] / (data.h * data.h * data.W);
}

std::vector<cplx> apply_green(const GreenData& data, std::span<const cplx> g, double gamma,
                              const WeightFunction* weight) {
  const std::size_t n = data.u0.size();
  if (g.size() != n) throw DomainError("apply_green: input size does not match the grid");
  const auto q = data.grid.trapezoid_weights();
  std::vector<double> e(n, 1.0);
  if (weight && gamma != 0.0)
    for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(-gamma * (*weight)(data.grid.x(i)));
  std::vector<cplx> gt(n);
  for (std::size_t i = 0; i < n; ++i) gt[i] = e[i] * q[i] * g[i];
  std::vector<cplx> upper(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) upper[i] = upper[i + 1] + data.f[i] * gt[i];
  std::vector<cplx> out(n);
  cplx lower = 0.0;
  const cplx scale = 1.0 / (data.h * data.h * data.W);
  for (std::size_t i = 0; i < n; ++i) {
    lower += data.u0[i] * gt[i];
    out[i] = e[i] * scale * (data.f[i] * lower + data.u0[i] * upper[i + 1]);
  }
  return out;
}

std::vector<cplx> resolvent_apply(const PotentialModel& model, cplx lambda, double h, const UniformGrid& grid,
                                  std::span<const cplx> g, double gamma, const WeightFunction* weight,
                                  double w_scale, const ContinuationOptions& opts) {
  const auto gd = green_data(model, lambda, h, grid, opts);
  if (std::abs(gd.W) < 1e-8 * std::max(1.0, w_scale))
    throw NearResonanceError("resolvent_apply: Wronskian below the deflation threshold", lambda, std::abs(gd.W));
  return apply_green(gd, g, gamma, weight);
}

std::vector<cplx> apply_operator(const PotentialModel& model, cplx lambda, double h, const UniformGrid& grid,
                                 std::span<const cplx> u) {
  const std::size_t n = grid.size();
  if (u.size() != n) throw DomainError("apply_operator: input size does not match the grid");
  std::vector<cplx> out(n, 0.0);
  const double dx = grid.dx;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double x = grid.x(i);
    const double ap = model.a(x + 0.5 * dx, h), am = model.a(x - 0.5 * dx, h);
    const cplx lap = (ap * (u[i + 1] - u[i]) - am * (u[i] - u[i - 1])) / (dx * dx);
    out[i] = -h * h * lap + (model.V(x, h) - lambda * lambda) * u[i];
  }
  return out;
}

ResidueReport residue_order(const PotentialModel& model, cplx r, double h, double radius,
                            const UniformGrid& grid, std::span<const double> g,
                            std::optional<int> expected_multiplicity, const ContinuationOptions& opts) {
  if (!(radius > 0.0)) throw DomainError("residue_order: radius must be > 0");
  if (g.size() != grid.size()) throw DomainError("residue_order: test function size mismatch");
  const Rect box{r - cplx(radius, radius), r + cplx(radius, radius)};
  const WronskianEvaluator wev(model, h, box, opts);
  const auto wh = wev.handle();
  ResidueReport rep;
  rep.winding = contour_winding(wh, ContourSpec::circle(r, radius));
  const int inner = contour_winding(wh, ContourSpec::circle(r, 0.5 * radius));
  if (inner != rep.winding) throw IsolationError("residue_order: zeros of W between radius/2 and radius");
  if (expected_multiplicity && *expected_multiplicity != rep.winding)
    throw IsolationError("residue_order: winding on the circle differs from the multiplicity");

  const auto q = grid.trapezoid_weights();
  std::vector<cplx> gc(g.begin(), g.end());
  auto bilinear = [&](cplx lam) {
    const auto gd = green_data(model, lam, h, grid, opts);
    const auto y = apply_green(gd, gc, 0.0, nullptr);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += q[i] * g[i] * y[i];
    return acc;
  };
  const int cap = std::max(rep.winding, 1) + 2;
  auto laurent = [&](std::size_t n, std::vector<cplx>& vals) {
    if (vals.size() != n) {
      std::vector<cplx> fine(n);
      for (std::size_t k = 0; k < n; ++k) {
        if (k % 2 == 0 && !vals.empty()) fine[k] = vals[k / 2];
        else fine[k] = bilinear(r + radius * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n)));
      }
      vals = std::move(fine);
    }
    std::vector<cplx> c(static_cast<std::size_t>(cap));
    for (std::size_t k = 0; k < n; ++k) {
      const cplx d = radius * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
      cplx p = d;
      for (int j = 1; j <= cap; ++j) {
        c[static_cast<std::size_t>(j - 1)] += vals[k] * p;
        p *= d;
      }
    }
    for (auto& v : c) v /= static_cast<double>(n);
    return c;
  };
  std::vector<cplx> vals;
  const auto coarse = laurent(64, vals);
  const auto fine = laurent(128, vals);
  double fmax = 0.0;
  for (cplx v : vals) fmax = std::max(fmax, std::abs(v));
  rep.order = 0;
  for (int j = 1; j <= cap; ++j) {
    const double cj = std::abs(fine[static_cast<std::size_t>(j - 1)]);
    rep.laurent_abs.push_back(cj);
    const double thr = 1e-6 * std::pow(radius, j) * fmax;
    const double drift = std::abs(fine[static_cast<std::size_t>(j - 1)] - coarse[static_cast<std::size_t>(j - 1)]);
    if (cj > thr && cj > 10.0 * drift) rep.order = j;
  }
  rep.generic = rep.order == rep.winding;
  return rep;
}

}  // namespace halfres
