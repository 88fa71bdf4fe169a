#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "halfres/errors.hpp"
#include "halfres/quasimodes.hpp"
#include "oracles.hpp"

using namespace halfres;

namespace {

const PotentialModel kFree = builtin_model("free", {});
const PotentialModel kWell = builtin_model("square_well", std::vector<double>{10.0, 1.0});
const PotentialModel kGauss = builtin_model("gauss_barrier", std::vector<double>{2.0, 2.0, 0.5});

Quasimode synthetic(std::size_t n, double dx, double freq) {
  Quasimode q;
  q.dx = dx;
  q.x.resize(n);
  q.u.resize(n);
  const double L = dx * static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    q.x[i] = static_cast<double>(i) * dx;
    q.u[i] = std::sqrt(2.0 / L) * std::sin(freq * kPi * q.x[i] / L);
  }
  return q;
}

}  // namespace

TEST(Dirichlet, FreeEigenvalues) {
  for (double h : {1.0, 0.5}) {
    const auto pairs = dirichlet_eigensolve(kFree, kPi, h, 5, 800);
    ASSERT_EQ(pairs.size(), 5u);
    for (std::size_t n = 1; n <= 5; ++n) {
      const double want = h * h * static_cast<double>(n * n);
      EXPECT_NEAR(pairs[n - 1].eigenvalue / want, 1.0, 1e-8) << h << " " << n;
    }
  }
}

TEST(Dirichlet, SquareWellShift) {
  const auto pairs = dirichlet_eigensolve(kWell, 1.0, 1.0, 4, 600);
  for (std::size_t n = 1; n <= 4; ++n) {
    const double k = kPi * static_cast<double>(n);
    EXPECT_NEAR(pairs[n - 1].eigenvalue, k * k - 10.0, 1e-6 * k * k) << n;
  }
}

TEST(Dirichlet, AgreesWithDenseOracle) {
  const double h = 0.1, L = 2.4;
  const auto pairs = dirichlet_eigensolve(kGauss, L, h, 4);
  const auto want = oracle::dirichlet_eigenvalues([](double x) { return kGauss.V(x, 0.1); }, L, h, 800, 4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(pairs[i].eigenvalue, want[i], 1e-6 * std::abs(want[i])) << i;
}

TEST(Dirichlet, FourthOrderRefinement) {
  const double exact = 4.0;
  const double e1 = std::abs(dirichlet_eigensolve(kFree, kPi, 1.0, 2, 100)[1].eigenvalue - exact);
  const double e2 = std::abs(dirichlet_eigensolve(kFree, kPi, 1.0, 2, 201)[1].eigenvalue - exact);
  EXPECT_GT(e1 / e2, 10.0);
}

TEST(Dirichlet, EigenvectorsNormalized) {
  const auto pairs = dirichlet_eigensolve(kGauss, 2.4, 0.1, 3);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.u.front(), 0.0);
    EXPECT_EQ(p.u.back(), 0.0);
    double s = 0.0;
    for (double v : p.u) s += v * v * p.dx;
    EXPECT_NEAR(s, 1.0, 1e-10);
  }
  EXPECT_LT(pairs[0].eigenvalue, pairs[1].eigenvalue);
}

TEST(Quasimode, RayleighQuotientWithinResidual) {
  const double h = 0.06;
  const auto pairs = dirichlet_eigensolve(kGauss, 2.4, h, 2);
  const auto q = build_quasimode(kGauss, pairs[0], h, CutoffSpec{2.2, 0.2}, QuasimodeOptions{1e-2, {}});
  EXPECT_NEAR(quasimode_residual(kGauss, q), q.accuracy, 1e-15);
  const double lam2 = q.lambda * q.lambda;
  EXPECT_LE(std::abs(rayleigh_quotient(kGauss, q) - lam2), q.accuracy * (1.0 + 1e-9) + 1e-12);
  double s = 0.0;
  for (double v : q.u) s += v * v * q.dx;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Quasimode, AccuracyImprovesAsHDecreases) {
  std::vector<double> acc;
  for (double h : {0.12, 0.09, 0.06}) {
    const auto pairs = dirichlet_eigensolve(kGauss, 2.4, h, 1);
    acc.push_back(build_quasimode(kGauss, pairs[0], h, CutoffSpec{2.2, 0.2}, QuasimodeOptions{1e-2, {}}).accuracy);
  }
  EXPECT_GT(acc[0], acc[1]);
  EXPECT_GT(acc[1], acc[2]);
}

TEST(Quasimode, SupportedInsideCutoff) {
  const double h = 0.08;
  const auto pairs = dirichlet_eigensolve(kGauss, 2.4, h, 1);
  const CutoffSpec cut{2.1, 0.2};
  const auto q = build_quasimode(kGauss, pairs[0], h, cut, QuasimodeOptions{1e-2, {}});
  EXPECT_DOUBLE_EQ(q.support_radius, 2.3);
  for (std::size_t i = 0; i < q.x.size(); ++i)
    if (q.x[i] >= cut.x_cut + cut.width) {
      EXPECT_EQ(q.u[i], 0.0) << q.x[i];
    }
  EXPECT_GT(q.x.back(), 2.4);
}

TEST(Quasimode, BadCutoffs) {
  const double h = 0.1;
  const auto pairs = dirichlet_eigensolve(kGauss, 2.4, h, 1);
  EXPECT_THROW(build_quasimode(kGauss, pairs[0], h, CutoffSpec{0.7, 0.2}), BadCutoffError);
  EXPECT_THROW(build_quasimode(kGauss, pairs[0], h, CutoffSpec{2.4, 0.2}), BadCutoffError);
  EXPECT_THROW(build_quasimode(kGauss, pairs[0], h, CutoffSpec{0.0, 0.2}), BadCutoffError);
  QuasimodeOptions opts{1e-2, std::make_pair(5.0, 6.0)};
  EXPECT_THROW(build_quasimode(kGauss, pairs[0], h, CutoffSpec{2.2, 0.2}, opts), DomainError);
}

TEST(Quasimode, DefaultCutoffWidth) {
  EXPECT_DOUBLE_EQ(default_cutoff_width(0.01), 0.4);
  EXPECT_DOUBLE_EQ(default_cutoff_width(1e-4), 0.2);
  EXPECT_DOUBLE_EQ(default_cutoff_width(0.5), 1.0);
}

TEST(Independence, OrthonormalDuplicateAndDistinct) {
  const auto a = synthetic(2001, 1e-3, 1.0);
  const auto b = synthetic(2001, 1e-3, 2.0);
  const auto ortho = independence_check({a, b}, 0.1, 0.0, 1.0);
  EXPECT_NEAR(ortho.margin, 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(ortho.threshold, 4.0);
  EXPECT_FALSE(ortho.independent);
  EXPECT_TRUE(independence_check({a, b}, 0.1, 2.0, 1.0).independent);

  const auto dup = independence_check({a, a}, 0.1, 2.0, 1.0);
  EXPECT_LT(dup.margin, 1e-6);
  EXPECT_FALSE(dup.independent);

  const double h = 0.06;
  const auto pairs = dirichlet_eigensolve(kGauss, 2.4, h, 2);
  const QuasimodeOptions qo{1e-2, {}};
  const auto q0 = build_quasimode(kGauss, pairs[0], h, CutoffSpec{2.2, 0.2}, qo);
  const auto q1 = build_quasimode(kGauss, pairs[1], h, CutoffSpec{2.2, 0.2}, qo);
  EXPECT_GT(independence_check({q0, q1}, h, 1.0, 1.0).margin, 0.9);
  EXPECT_THROW(independence_check({}, h, 1.0, 1.0), DomainError);
  EXPECT_THROW(independence_check({q0}, h, 1.0, 0.0), DomainError);
}
