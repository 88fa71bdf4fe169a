#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "halfres/continuation.hpp"
#include "halfres/errors.hpp"
#include "oracles.hpp"

using namespace halfres;

namespace {

const PotentialModel kFree = builtin_model("free", {});
const PotentialModel kWell = builtin_model("square_well", std::vector<double>{10.0, 1.0});
const PotentialModel kGauss = builtin_model("gauss_barrier", std::vector<double>{2.0, 2.0, 0.5});

double bump(double x, double lo, double hi) {
  if (x <= lo || x >= hi) return 0.0;
  const double t = (x - lo) / (hi - lo);
  return std::pow(std::sin(kPi * t), 4);
}

// Dirichlet solution of the square well with h = 1.
cplx well_u0(cplx s, double x) {
  const cplx k = std::sqrt(s * s + 10.0);
  if (x <= 1.0) return std::sin(k * x) / k;
  return std::sin(k) / k * std::cos(s * (x - 1.0)) + std::cos(k) * std::sin(s * (x - 1.0)) / s;
}

}  // namespace

TEST(Jost, FreeIsPlaneWave) {
  const double h = 0.5;
  const cplx lam(1.2, -0.05);
  const cplx s = lam / h;
  const std::vector<double> xs{0.0, 0.7, 2.0, 5.0};
  const auto sol = integrate_jost(kFree, lam, h, {}, xs);
  ASSERT_EQ(sol.f.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const cplx e = std::exp(cplx(0.0, 1.0) * s * xs[i]);
    EXPECT_LT(std::abs(sol.f[i] - e), 1e-10 * std::abs(e));
    EXPECT_LT(std::abs(sol.m[i] - 1.0), 1e-10);
  }
  EXPECT_LT(std::abs(wronskian(kFree, lam, h).value - 1.0), 1e-10);
}

TEST(Jost, SquareWellMatchesClosedForm) {
  for (cplx lam : {cplx(3.0, -0.05), cplx(1.5, 0.2), cplx(6.0, -1.0)}) {
    const std::vector<double> xs{0.0};
    const auto sol = integrate_jost(kWell, lam, 1.0, {}, xs);
    const cplx want = oracle::square_well_jost_at_zero(lam, 10.0, 1.0);
    EXPECT_LT(std::abs(sol.f[0] - want) / std::abs(want), 1e-8) << lam;
    const cplx W = wronskian(kWell, lam, 1.0).value;
    EXPECT_LT(std::abs(W - want) / std::abs(want), 1e-8) << lam;
  }
}

TEST(Regular, ClosedForms) {
  const std::vector<double> xs{0.25, 0.6, 1.0, 1.8, 3.0};
  const cplx lam(2.0, -0.1);
  const auto free = regular_solution(kFree, lam, 1.0, xs);
  const auto well = regular_solution(kWell, lam, 1.0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const cplx a = std::sin(lam * xs[i]) / lam;
    EXPECT_LT(std::abs(free.u[i] - a), 1e-9 * std::max(1.0, std::abs(a)));
    const cplx b = well_u0(lam, xs[i]);
    EXPECT_LT(std::abs(well.u[i] - b), 1e-8 * std::max(1.0, std::abs(b)));
  }
}

TEST(Regular, RealForRealEnergy) {
  const std::vector<double> xs{0.3, 1.1, 2.5, 4.0};
  for (cplx lam : {cplx(2.5, 0.0), cplx(0.0, 1.5)}) {
    const auto u = regular_solution(kGauss, lam, 0.5, xs);
    for (const cplx v : u.u) EXPECT_LT(std::abs(v.imag()), 1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST(Wronskian, SchwarzReflection) {
  for (cplx lam : {cplx(0.9, -0.03), cplx(1.3, 0.1)}) {
    const cplx a = wronskian(kGauss, lam, 0.1).value;
    const cplx b = wronskian(kGauss, -std::conj(lam), 0.1).value;
    EXPECT_LT(std::abs(b - std::conj(a)), 1e-9 * std::abs(a)) << lam;
  }
}

TEST(Wronskian, IndependentOfMatchingPoint) {
  const std::vector<std::pair<PotentialModel, cplx>> cases{
      {kFree, cplx(1.0, -0.2)},
      {kWell, cplx(3.0, -0.5)},
      {kGauss, cplx(1.0, -0.05)},
      {builtin_model("ads_like", std::vector<double>{6.0}), cplx(1.0, -0.01)}};
  for (const auto& [m, lam] : cases) {
    const double h = m.h_default.value_or(m.label == "gauss_barrier" ? 0.1 : 1.0);
    const auto d = wronskian(m, lam, h);
    EXPECT_LT(d.relative_std, 1e-9) << m.label;
    EXPECT_GE(d.samples.size(), 2u);
  }
}

TEST(Wronskian, TailDoublingIsStable) {
  const double h = 0.1;
  const cplx lam(1.0, -0.05);
  ContinuationOptions opts;
  const double X = jost_tail_radius(kGauss, lam / h, h, opts);
  const cplx a = wronskian(kGauss, lam, h, opts).value;
  opts.start_min = 2.0 * X;
  const cplx b = wronskian(kGauss, lam, h, opts).value;
  EXPECT_LT(std::abs(a - b) / std::abs(a), 1e-9);
}

TEST(Wronskian, TailRadiusMonotone) {
  const double h = 0.1;
  ContinuationOptions opts;
  const double upper = jost_tail_radius(kGauss, cplx(10.0, 0.5), h, opts);
  const double lower = jost_tail_radius(kGauss, cplx(10.0, -0.5), h, opts);
  EXPECT_LE(upper, lower);
  ContinuationOptions tight = opts;
  tight.tail_tol = 1e-14;
  EXPECT_LE(lower, jost_tail_radius(kGauss, cplx(10.0, -0.5), h, tight));
  EXPECT_THROW(jost_tail_radius(kGauss, cplx(10.0, -2.0), h, opts), StripError);
  EXPECT_DOUBLE_EQ(jost_tail_radius(kWell, cplx(3.0, -5.0), 1.0, opts), 1.0);
}

TEST(Resolvent, InvertsOperator) {
  const UniformGrid grid{6.0, 2e-3};
  std::vector<cplx> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = bump(grid.x(i), 0.5, 2.5);
  const std::vector<std::tuple<PotentialModel, cplx, double>> cases{
      {kFree, cplx(1.5, 0.0), 1.0}, {kFree, cplx(1.5, -0.3), 1.0}, {kGauss, cplx(1.0, -0.02), 0.1}};
  for (const auto& [m, lam, h] : cases) {
    const auto u = resolvent_apply(m, lam, h, grid, g, 0.0, nullptr);
    const auto back = apply_operator(m, lam, h, grid, u);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      err = std::max(err, std::abs(back[i] - g[i]));
      ref = std::max(ref, std::abs(g[i]));
    }
    EXPECT_LT(err / ref, 1e-3) << m.label << " " << lam;
  }
}

TEST(Resolvent, MatchesBoundaryValueSolve) {
  const double X = 4.0;
  const std::size_t n = 8000;
  const UniformGrid grid{X, X / static_cast<double>(n)};
  const auto gfun = [](double x) { return cplx(bump(x, 0.2, 1.6), 0.0); };
  std::vector<cplx> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = gfun(grid.x(i));
  for (cplx lam : {cplx(2.0, 0.0), cplx(4.5, 0.0)}) {
    const auto u = resolvent_apply(kWell, lam, 1.0, grid, g, 0.0, nullptr);
    const double dx = grid.dx;
    const auto V = [dx](double x) { return std::abs(x - 1.0) < 0.5 * dx ? -5.0 : kWell.V(x, 1.0); };
    const auto v = oracle::robin_bvp_solve(V, lam, 1.0, X, n, gfun);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      err = std::max(err, std::abs(u[i] - v[i]));
      ref = std::max(ref, std::abs(v[i]));
    }
    EXPECT_LT(err / ref, 1e-4) << lam;
  }
}

TEST(Resolvent, ZeroSourceGivesZero) {
  const UniformGrid grid{3.0, 0.01};
  const std::vector<cplx> g(grid.size(), 0.0);
  for (const cplx v : resolvent_apply(kWell, cplx(2.0, -0.1), 1.0, grid, g, 0.0, nullptr)) EXPECT_EQ(v, 0.0);
}

TEST(Resolvent, NearResonanceThrows) {
  const auto roots = oracle::square_well_roots(10.0, 1.0, 1.0, 8.0, -2.0, 0.2);
  ASSERT_FALSE(roots.empty());
  const UniformGrid grid{3.0, 0.01};
  const std::vector<cplx> g(grid.size(), 1.0);
  EXPECT_THROW(resolvent_apply(kWell, roots[0], 1.0, grid, g, 0.0, nullptr), NearResonanceError);
}

TEST(Residue, SimplePoleAndRegularPoint) {
  const auto roots = oracle::square_well_roots(10.0, 1.0, 1.0, 8.0, -2.0, 0.2);
  ASSERT_EQ(roots.size(), 2u);
  const UniformGrid grid{2.0, 0.01};
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = bump(grid.x(i), 0.1, 0.9);
  const auto at_root = residue_order(kWell, roots[0], 1.0, 0.1, grid, g, 1);
  EXPECT_EQ(at_root.order, 1);
  EXPECT_EQ(at_root.winding, 1);
  EXPECT_TRUE(at_root.generic);
  const auto regular = residue_order(kWell, cplx(5.0, -0.3), 1.0, 0.1, grid, g);
  EXPECT_EQ(regular.order, 0);
  EXPECT_EQ(regular.winding, 0);
  EXPECT_THROW(residue_order(kWell, roots[0], 1.0, 0.1, grid, g, 2), IsolationError);
}

TEST(Residue, ProjectedTestFunctionIsFlagged) {
  const auto roots = oracle::square_well_roots(10.0, 1.0, 1.0, 8.0, -2.0, 0.2);
  const cplx r = roots.at(0);
  const UniformGrid grid{2.0, 0.01};
  const auto q = grid.trapezoid_weights();
  std::vector<double> g1(grid.size()), g2(grid.size()), g3(grid.size());
  cplx I1 = 0.0, I2 = 0.0, I3 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    g1[i] = bump(x, 0.1, 0.9);
    g2[i] = x * g1[i];
    g3[i] = x * x * g1[i];
    const cplx u = well_u0(r, x);
    I1 += q[i] * g1[i] * u;
    I2 += q[i] * g2[i] * u;
    I3 += q[i] * g3[i] * u;
  }
  const double det = I2.real() * I3.imag() - I3.real() * I2.imag();
  const double a = (-I1.real() * I3.imag() + I3.real() * I1.imag()) / det;
  const double b = (-I2.real() * I1.imag() + I1.real() * I2.imag()) / det;
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = g1[i] + a * g2[i] + b * g3[i];
  const auto rep = residue_order(kWell, r, 1.0, 0.1, grid, g, 1);
  EXPECT_EQ(rep.winding, 1);
  EXPECT_EQ(rep.order, 0);
  EXPECT_FALSE(rep.generic);
}

TEST(Extended, PolishMatchesClosedFormRoot) {
  const auto roots = oracle::square_well_roots(10.0, 1.0, 1.0, 8.0, -2.0, 0.2);
  for (const cplx r : roots) {
    const WronskianEvaluator ev(kWell, 1.0, Rect{r - cplx(0.2, 0.2), r + cplx(0.2, 0.2)});
    EXPECT_LT(std::abs(ev(r)), 1e-8);
    const auto z = polish_zero_extended(ev, r + cplx(1e-6, 1e-6));
    const cplx got(static_cast<double>(z.lambda.real()), static_cast<double>(z.lambda.imag()));
    EXPECT_LT(std::abs(got - r), 1e-9) << r;
    EXPECT_LT(got.imag(), 0.0);
  }
}

TEST(Evaluator, AgreesWithAdaptiveWronskian) {
  const Rect rect{cplx(0.7, -0.06), cplx(1.3, 0.1)};
  const WronskianEvaluator ev(kGauss, 0.1, rect);
  for (cplx lam : {cplx(0.8, -0.05), cplx(1.0, 0.0), cplx(1.25, 0.08)}) {
    const cplx a = ev(lam);
    const cplx b = wronskian(kGauss, lam, 0.1).value;
    EXPECT_LT(std::abs(a - b) / std::abs(b), 1e-7) << lam;
  }
}
