#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "halfres/errors.hpp"
#include "halfres/free_resolvent.hpp"
#include "oracles.hpp"

using namespace halfres;

namespace {

const WeightFunction kWeight = make_weight(0.0, 1.0);

double dense_norm(const Eigen::MatrixXcd& B) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
  return svd.singularValues()(0);
}

}  // namespace

TEST(HalflineKernel, DirichletAtOrigin) {
  for (double y : {0.0, 0.4, 3.0}) {
    EXPECT_EQ(std::abs(r0_kernel_halfline(1.0, 0.0, y)), 0.0);
    EXPECT_LT(std::abs(r0_kernel_halfline(cplx(2.0, -0.3), y, 0.0)), 1e-15);
  }
  EXPECT_THROW(r0_kernel_halfline(0.0, 1.0, 1.0), DomainError);
}

TEST(HalflineKernel, MatchesBoundaryValueSolve) {
  // (-d^2 + 1) u = delta_1 with u(0) = 0 is the half-line kernel at sigma = i.
  const double X = 20.0;
  const std::size_t n = 20000;
  const double dx = X / static_cast<double>(n);
  const std::size_t j1 = 1000;
  const auto u = oracle::robin_bvp_solve([](double) { return 0.0; }, cplx(0.0, 1.0), 1.0, X, n,
                                         [&](double x) { return std::abs(x - 1.0) < 0.5 * dx ? 1.0 / dx : 0.0; });
  const cplx g = r0_kernel_halfline(cplx(0.0, 1.0), 1.0, 1.0);
  EXPECT_LT(std::abs(u[j1] - g) / std::abs(g), 1e-4);
  const cplx g2 = r0_kernel_halfline(cplx(0.0, 1.0), 2.5, 1.0);
  EXPECT_LT(std::abs(u[2500] - g2) / std::abs(g2), 1e-4);
}

TEST(HalflineKernel, UnitJumpAndHomogeneousAwayFromSource) {
  const double y = 1.3, d = 1e-4;
  for (cplx s : {cplx(1.0, 0.0), cplx(3.0, -0.4), cplx(0.5, 0.7)}) {
    auto G = [&](double x) { return r0_kernel_halfline(s, x, y); };
    const cplx jump = (G(y + d) - G(y)) / d - (G(y) - G(y - d)) / d;
    EXPECT_NEAR(jump.real(), -1.0, 1e-3);
    EXPECT_NEAR(jump.imag(), 0.0, 1e-3);
    for (double x : {0.4, 2.2, 4.0}) {
      const double e = 1e-3;
      const cplx lhs = -(G(x + e) - 2.0 * G(x) + G(x - e)) / (e * e) - s * s * G(x);
      EXPECT_LT(std::abs(lhs), 1e-4 * std::max(1.0, std::abs(s * s * G(x))));
    }
  }
}

TEST(HalflineKernel, Symmetric) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (cplx s : {cplx(1.0, 0.0), cplx(2.0, -0.5), cplx(0.3, 1.0)}) {
    for (int k = 0; k < 100; ++k) {
      const double x = u(rng);
      const double y = u(rng);
      EXPECT_EQ(r0_kernel_halfline(s, x, y), r0_kernel_halfline(s, y, x));
    }
  }
}

TEST(Reflection, Examples) {
  EXPECT_LT(reflection_identity_residual(2.0, 0.3, 1.7), 1e-13);
  EXPECT_LT(reflection_identity_residual(cplx(1.0, -0.1), 0.3, 1.7), 1e-12);
  EXPECT_LT(reflection_identity_residual(cplx(4.0, -0.6), 2.1, 2.1), 1e-15);
  const cplx mxx = m_kernel(cplx(3.0, -0.2), 0.8, 0.8);
  EXPECT_NEAR(mxx.real(), 0.0, 1e-15);
  EXPECT_NEAR(mxx.imag(), 1.0, 1e-15);
  EXPECT_THROW(reflection_identity_residual(0.0, 1.0, 2.0), DomainError);
}

TEST(Reflection, CosineForm) {
  for (cplx s : {cplx(2.0, 0.0), cplx(1.0, -0.1), cplx(7.5, -0.9)}) {
    for (double d : {-1.4, 0.0, 0.3, 2.0}) {
      const cplx lhs = r0_kernel_line(s, d, 0.0) - r0_kernel_line(-s, d, 0.0);
      const cplx rhs = cplx(0.0, 1.0) / s * std::cos(s * d);
      EXPECT_LT(std::abs(lhs - rhs), 1e-13 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST(Reflection, BrokenKernelIsDetected) {
  const LineKernel wrong = [](cplx s, double x, double y) { return -r0_kernel_line(s, x, y); };
  EXPECT_GT(reflection_identity_residual(2.0, 0.3, 1.7, wrong), 1e-3);
}

TEST(WeightedNorm, SchurBound) {
  const cplx s = 10.0;
  const auto grid = default_kernel_grid(s, 1.0, kWeight);
  const auto q = grid.trapezoid_weights();
  double C = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) C += q[i] * std::exp(-kWeight(grid.x(i)));
  const double v = weighted_r0_norm(s, 1.0, kWeight, grid, 0);
  EXPECT_LE(v, C / 10.0);
  EXPECT_GT(v, 0.0);
}

TEST(WeightedNorm, ImaginaryAxisBound) {
  for (double t : {1.0, 2.0, 4.0}) {
    const cplx s(0.0, t);
    const double v = weighted_r0_norm(s, 1.0, kWeight, default_kernel_grid(s, 1.0, kWeight), 0);
    EXPECT_LE(v, 1.0 / (t * t)) << t;
  }
}

TEST(WeightedNorm, DenseSvdAgrees) {
  const cplx s(3.0, -0.2);
  const auto grid = default_kernel_grid(s, 1.0, kWeight);
  const auto B = weighted_kernel_matrix([s](double x, double y) { return r0_kernel_halfline(s, x, y); }, 1.0,
                                        kWeight, grid, 0);
  EXPECT_NEAR(weighted_r0_norm(s, 1.0, kWeight, grid, 0) / dense_norm(B), 1.0, 1e-3);
}

TEST(WeightedNorm, GridRefinement) {
  const cplx s(4.0, -0.3);
  const auto g = default_kernel_grid(s, 1.0, kWeight);
  const UniformGrid fine{g.x_max, g.dx / 2.0};
  for (int order : {0, 2}) {
    const double a = weighted_r0_norm(s, 1.0, kWeight, g, order);
    const double b = weighted_r0_norm(s, 1.0, kWeight, fine, order);
    EXPECT_LT(std::abs(a - b) / b, 0.01) << order;
  }
}

TEST(WeightedNorm, ScalingOverLastDecade) {
  std::vector<double> lx, l0, l2;
  for (int k = 0; k < 6; ++k) {
    const double s = 6.4 * std::pow(10.0, k / 5.0);
    const auto grid = default_kernel_grid(s, 1.0, kWeight);
    lx.push_back(std::log(s));
    l0.push_back(std::log(weighted_r0_norm(s, 1.0, kWeight, grid, 0)));
    l2.push_back(std::log(weighted_r0_norm(s, 1.0, kWeight, grid, 2)));
  }
  EXPECT_NEAR(oracle::ls_slope(lx, l0), -1.0, 0.1);
  EXPECT_NEAR(oracle::ls_slope(lx, l2), 1.0, 0.15);
  EXPECT_NEAR(fit_line(lx, l0).slope, oracle::ls_slope(lx, l0), 1e-12);
}

TEST(WeightedNorm, MonotoneInGamma) {
  const cplx s(2.0, -0.2);
  const auto grid = default_kernel_grid(s, 0.5, kWeight);
  EXPECT_LE(weighted_r0_norm(s, 1.0, kWeight, grid), weighted_r0_norm(s, 0.5, kWeight, grid) + 1e-10);
}

TEST(WeightedNorm, Errors) {
  const auto grid = default_kernel_grid(2.0, 1.0, kWeight);
  EXPECT_THROW(weighted_r0_norm(cplx(2.0, -1.0), 1.0, kWeight, grid), DomainError);
  EXPECT_THROW(weighted_r0_norm(0.0, 1.0, kWeight, grid), DomainError);
  EXPECT_THROW(weighted_r0_norm(2.0, 1.0, kWeight, UniformGrid{10.0, 0.5}), ResolutionError);
  EXPECT_THROW(weighted_r0_norm(2.0, 1.0, kWeight, grid, 3), DomainError);
}

TEST(MDecay, BoundedOverRange) {
  std::vector<cplx> s;
  for (int k = 0; k < 8; ++k) s.emplace_back(1.0 + 49.0 * k / 7.0, 0.0);
  const auto rep = verify_m_decay(s, 1.0, 0.1, kWeight);
  EXPECT_LT(rep.ratio, 10.0);
  EXPECT_EQ(rep.norms.size(), s.size());
  const auto doubled = verify_m_decay(s, 2.0, 0.1, kWeight);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(doubled.norms[i], rep.norms[i] + 1e-10);
}

TEST(MDecay, StripPrecondition) {
  const std::vector<cplx> inside{cplx(1.0, -0.85)};
  EXPECT_NO_THROW(verify_m_decay(inside, 1.0, 0.1, kWeight));
  const std::vector<cplx> edge{cplx(1.0, -0.9)};
  EXPECT_THROW(verify_m_decay(edge, 1.0, 0.1, kWeight), DomainError);
  const std::vector<cplx> bad{cplx(1.0, -0.95)};
  EXPECT_THROW(verify_m_decay(bad, 1.0, 0.1, kWeight), DomainError);
  const std::vector<cplx> low{cplx(0.5, 0.0)};
  EXPECT_THROW(verify_m_decay(low, 1.0, 0.1, kWeight), DomainError);
}

TEST(FitLine, ExactLine) {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{1.0, 3.0, 5.0, 7.0};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  const std::vector<double> one{1.0};
  EXPECT_THROW(fit_line(one, one), DomainError);
}
