#include "halfres/ode.hpp"

#include <algorithm>
#include <cmath>

#include "halfres/errors.hpp"

namespace halfres {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

OdeState axpy(const OdeState& y, double h, std::initializer_list<std::pair<double, const OdeState*>> terms) {
  OdeState out = y;
  for (const auto& [c, k] : terms)
    for (std::size_t i = 0; i < 2; ++i) out[i] += h * c * (*k)[i];
  return out;
}

struct StepResult {
  OdeState y;
  OdeState err;
  OdeState k7;
};

StepResult dp_step(const OdeRhs& f, double x, const OdeState& y, const OdeState& k1, double h) {
  const OdeState k2 = f(x + c2 * h, axpy(y, h, {{a21, &k1}}));
  const OdeState k3 = f(x + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
  const OdeState k4 = f(x + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const OdeState k5 =
      f(x + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const OdeState k6 =
      f(x + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const OdeState ynew =
      axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const OdeState k7 = f(x + h, ynew);
  OdeState err{};
  for (std::size_t i = 0; i < 2; ++i)
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  return {ynew, err, k7};
}

double error_norm(const OdeState& err, const OdeState& y0, const OdeState& y1, const OdeOptions& o) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / 2.0);
}

bool finite_state(const OdeState& y) {
  return std::isfinite(y[0].real()) && std::isfinite(y[0].imag()) && std::isfinite(y[1].real()) &&
         std::isfinite(y[1].imag());
}

}  // namespace

const OdeState& OdeTrajectory::at(double x) const {
  for (std::size_t i = 0; i < mesh.size(); ++i)
    if (mesh[i] == x) return states[i];
  throw DomainError("ode: requested point is not a mesh node");
}

OdeTrajectory integrate_adaptive(const OdeRhs& rhs, double x0, double x1, const OdeState& y0,
                                 const OdeOptions& opts, std::span<const double> stops) {
  const double dir = x1 >= x0 ? 1.0 : -1.0;
  std::vector<double> targets;
  for (double s : stops)
    if ((s - x0) * dir > 0.0 && (x1 - s) * dir > 0.0) targets.push_back(s);
  targets.push_back(x1);
  std::sort(targets.begin(), targets.end(), [dir](double a, double b) { return a * dir < b * dir; });
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  OdeTrajectory traj;
  traj.mesh.push_back(x0);
  traj.states.push_back(y0);
  if (x0 == x1) return traj;

  double x = x0;
  OdeState y = y0;
  OdeState k1 = rhs(x, y);
  const double span = std::abs(x1 - x0);
  double h = std::min(span, 1e-2 * std::max(span, 1e-3));
  std::size_t steps = 0;
  std::size_t next = 0;
  while (next < targets.size()) {
    const double target = targets[next];
    const double remaining = std::abs(target - x);
    bool land = false;
    double step = h;
    if (step >= remaining) {
      step = remaining;
      land = true;
    }
    if (++steps > opts.max_steps) throw StiffnessError("ode: maximum number of steps exceeded");
    if (!land && step < opts.min_step * std::max(1.0, std::abs(x)))
      throw StiffnessError("ode: step size underflow; tolerance cannot be met");
    auto res = dp_step(rhs, x, y, k1, dir * step);
    const double en = finite_state(res.y) ? error_norm(res.err, y, res.y, opts) : INFINITY;
    if (en <= 1.0) {
      x = land ? target : x + dir * step;
      y = res.y;
      k1 = land ? rhs(x, y) : res.k7;
      traj.mesh.push_back(x);
      traj.states.push_back(y);
      if (land) ++next;
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h = std::max(h, step) * fac;
      if (land) h = std::max(h, step);
    } else {
      const double fac = std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.1;
      h = step * fac;
    }
  }
  return traj;
}

OdeTrajectory integrate_on_mesh(const OdeRhs& rhs, std::span<const double> mesh, const OdeState& y0) {
  if (mesh.empty()) throw DomainError("ode: empty mesh");
  OdeTrajectory traj;
  traj.mesh.assign(mesh.begin(), mesh.end());
  traj.states.reserve(mesh.size());
  traj.states.push_back(y0);
  OdeState y = y0;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    const double x = mesh[i];
    const OdeState k1 = rhs(x, y);
    y = dp_step(rhs, x, y, k1, mesh[i + 1] - x).y;
    traj.states.push_back(y);
  }
  return traj;
}

std::vector<OdeStateX> integrate_on_mesh_extended(const OdeRhsX& rhs, std::span<const double> mesh,
                                                  const OdeStateX& y0) {
  if (mesh.empty()) throw DomainError("ode: empty mesh");
  using R = long double;
  constexpr R C2 = 1.0L / 5, C3 = 3.0L / 10, C4 = 4.0L / 5, C5 = 8.0L / 9;
  constexpr R A21 = 1.0L / 5, A31 = 3.0L / 40, A32 = 9.0L / 40, A41 = 44.0L / 45, A42 = -56.0L / 15,
              A43 = 32.0L / 9, A51 = 19372.0L / 6561, A52 = -25360.0L / 2187, A53 = 64448.0L / 6561,
              A54 = -212.0L / 729, A61 = 9017.0L / 3168, A62 = -355.0L / 33, A63 = 46732.0L / 5247,
              A64 = 49.0L / 176, A65 = -5103.0L / 18656;
  constexpr R B1 = 35.0L / 384, B3 = 500.0L / 1113, B4 = 125.0L / 192, B5 = -2187.0L / 6784, B6 = 11.0L / 84;
  auto comb = [](const OdeStateX& y, R h, std::initializer_list<std::pair<R, const OdeStateX*>> terms) {
    OdeStateX out = y;
    for (const auto& [c, k] : terms)
      for (std::size_t i = 0; i < 2; ++i) out[i] += h * c * (*k)[i];
    return out;
  };
  std::vector<OdeStateX> states;
  states.reserve(mesh.size());
  states.push_back(y0);
  OdeStateX y = y0;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    const R x = mesh[i];
    const R h = static_cast<R>(mesh[i + 1]) - x;
    const OdeStateX k1 = rhs(x, y);
    const OdeStateX k2 = rhs(x + C2 * h, comb(y, h, {{A21, &k1}}));
    const OdeStateX k3 = rhs(x + C3 * h, comb(y, h, {{A31, &k1}, {A32, &k2}}));
    const OdeStateX k4 = rhs(x + C4 * h, comb(y, h, {{A41, &k1}, {A42, &k2}, {A43, &k3}}));
    const OdeStateX k5 = rhs(x + C5 * h, comb(y, h, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}}));
    const OdeStateX k6 = rhs(x + h, comb(y, h, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}}));
    y = comb(y, h, {{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}});
    states.push_back(y);
  }
  return states;
}

std::vector<double> merge_meshes(const std::vector<std::vector<double>>& meshes, double tol) {
  if (meshes.empty()) return {};
  std::vector<double> all;
  for (const auto& m : meshes) all.insert(all.end(), m.begin(), m.end());
  const bool descending = meshes.front().size() > 1 && meshes.front().back() < meshes.front().front();
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double v : all)
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  if (descending) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace halfres
