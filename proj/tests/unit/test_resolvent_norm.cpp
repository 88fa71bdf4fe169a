#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "halfres/errors.hpp"
#include "halfres/free_resolvent.hpp"
#include "halfres/resolvent_norm.hpp"
#include "oracles.hpp"

using namespace halfres;

namespace {

const PotentialModel kFree = builtin_model("free", {});
const PotentialModel kWell = builtin_model("square_well", std::vector<double>{10.0, 1.0});
const PotentialModel kGauss = builtin_model("gauss_barrier", std::vector<double>{2.0, 2.0, 0.5});
const WeightFunction kWeight = make_weight(0.0, 1.0);

AnalyticHandle handle(std::function<cplx(cplx)> f) {
  AnalyticHandle h;
  h.eval = std::move(f);
  return h;
}

AprioriInput synthetic_scan(double h, double S, std::vector<cplx> lambdas, std::vector<double> norms) {
  AprioriInput in;
  in.scan.h = h;
  in.scan.S = S;
  in.scan.lambdas = std::move(lambdas);
  in.scan.norms = std::move(norms);
  in.scan.excluded.assign(in.scan.lambdas.size(), false);
  return in;
}

}  // namespace

TEST(WeightedResolvent, FreeAgreesWithClosedFormKernel) {
  for (cplx lam : {cplx(0.0, 1.0), cplx(2.0, -0.2), cplx(5.0, 0.0)}) {
    const auto grid = default_kernel_grid(lam, 1.0, kWeight);
    const double a = weighted_resolvent_norm(kFree, lam, 1.0, 1.0, kWeight, grid);
    const double b = weighted_r0_norm(lam, 1.0, kWeight, grid, 0);
    EXPECT_NEAR(a / b, 1.0, 1e-3) << lam;
  }
  const double at_i = weighted_resolvent_norm(kFree, cplx(0.0, 1.0), 1.0, 1.0, kWeight,
                                              default_resolvent_grid(1.0, 1.0, 1.0, kWeight));
  EXPECT_GT(at_i, 0.0);
  EXPECT_LE(at_i, 1.0);
}

TEST(WeightedResolvent, PowerIterationMatchesDenseSvd) {
  const cplx lam(1.0, -0.02);
  const double h = 0.1;
  const auto grid = default_resolvent_grid(std::abs(lam), h, 1.0, kWeight, 8.0);
  const auto B = weighted_resolvent_matrix(kGauss, lam, h, 1.0, kWeight, grid);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
  const double dense = svd.singularValues()(0);
  EXPECT_NEAR(weighted_resolvent_norm(kGauss, lam, h, 1.0, kWeight, grid) / dense, 1.0, 1e-3);
}

TEST(WeightedResolvent, MonotoneInGamma) {
  const cplx lam(3.0, -0.3);
  const auto grid = default_resolvent_grid(std::abs(lam), 1.0, 0.5, kWeight);
  const double loose = weighted_resolvent_norm(kWell, lam, 1.0, 0.5, kWeight, grid);
  const double tight = weighted_resolvent_norm(kWell, lam, 1.0, 1.0, kWeight, grid);
  EXPECT_LE(tight, loose * (1.0 + 1e-4));
}

TEST(WeightedResolvent, UpperHalfPlaneBound) {
  const std::vector<std::tuple<PotentialModel, cplx, double>> cases{
      {kWell, cplx(1.0, 0.5), 1.0}, {kWell, cplx(3.0, 0.2), 1.0}, {kGauss, cplx(1.0, 0.05), 0.1}};
  for (const auto& [m, lam, h] : cases) {
    const auto grid = default_resolvent_grid(std::abs(lam), h, 1.0, kWeight);
    const double v = weighted_resolvent_norm(m, lam, h, 1.0, kWeight, grid);
    EXPECT_LE(v, (1.0 + 1e-3) / std::abs((lam * lam).imag())) << m.label << " " << lam;
  }
}

TEST(WeightedResolvent, SimplePoleLawNearResonance) {
  const auto roots = oracle::square_well_roots(10.0, 1.0, 1.0, 8.0, -2.0, 0.2);
  const cplx r = roots.at(0);
  const auto grid = default_resolvent_grid(std::abs(r), 1.0, 1.0, kWeight);
  std::vector<double> lt, ln;
  for (double t : {1e-2, 3e-3, 1e-3, 3e-4}) {
    lt.push_back(std::log(t));
    ln.push_back(std::log(weighted_resolvent_norm(kWell, r + t * std::polar(1.0, 0.7), 1.0, 1.0, kWeight, grid)));
  }
  EXPECT_NEAR(oracle::ls_slope(lt, ln), -1.0, 0.05);
  EXPECT_THROW(weighted_resolvent_norm(kWell, r, 1.0, 1.0, kWeight, grid), NearResonanceError);
}

TEST(NormScan, ExcludedPointsAreNan) {
  const std::vector<cplx> pts{cplx(2.0, 0.1), cplx(2.5, 0.1), cplx(3.0, 0.1)};
  const auto grid = default_resolvent_grid(3.0, 1.0, 1.0, kWeight);
  const auto s = norm_scan(kWell, pts, 1.0, 1.0, kWeight, grid, {Disk{cplx(2.5, 0.1), 0.05}});
  ASSERT_EQ(s.norms.size(), 3u);
  EXPECT_TRUE(std::isfinite(s.norms[0]));
  EXPECT_TRUE(std::isnan(s.norms[1]));
  EXPECT_TRUE(s.excluded[1]);
  EXPECT_FALSE(s.excluded[2]);
}

TEST(Apriori, SmallestExponentAndConstant) {
  const std::vector<AprioriInput> in{synthetic_scan(0.2, 0.1, {cplx(1.0, 0.0), cplx(1.1, 0.0)}, {5.0, 2.0}),
                                     synthetic_scan(0.1, 0.1, {cplx(1.0, 0.0)}, {4.0})};
  const auto rep = apriori_bound_check(in, 10.0);
  EXPECT_EQ(rep.status, "pass");
  EXPECT_TRUE(rep.feasible);
  EXPECT_EQ(rep.p_fit, 0.0);
  EXPECT_NEAR(rep.A_fit, std::log(5.0) / std::log(10.0), 1e-14);
  EXPECT_EQ(rep.points_used, 3u);
  EXPECT_TRUE(rep.violations.empty());
}

TEST(Apriori, NoFitListsViolations) {
  const std::vector<AprioriInput> in{synthetic_scan(0.5, 0.1, {cplx(1.0, 0.0), cplx(1.2, 0.0)}, {1e300, 2.0})};
  const auto rep = apriori_bound_check(in, 10.0);
  EXPECT_EQ(rep.status, "no fit");
  EXPECT_FALSE(rep.feasible);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].lambda, cplx(1.0, 0.0));
  EXPECT_GT(rep.violations[0].norm, rep.violations[0].bound);
}

TEST(Apriori, ResonanceDisksAndCompleteness) {
  auto in = synthetic_scan(0.2, 0.1, {cplx(1.0, 0.0), cplx(1.5, 0.0)}, {1e200, 3.0});
  Resonance r;
  r.lambda = cplx(1.0, -0.05);
  in.resonances = {r};
  in.total_winding = 1;
  const auto rep = apriori_bound_check({in}, 10.0);
  EXPECT_EQ(rep.points_excluded, 1u);
  EXPECT_EQ(rep.points_used, 1u);
  EXPECT_EQ(rep.status, "pass");
  in.total_winding = 2;
  EXPECT_THROW(apriori_bound_check({in}, 10.0), CompletenessError);
  EXPECT_THROW(apriori_bound_check({}, 10.0), DomainError);
}

TEST(MaxPrinciple, ConstantAndExponential) {
  MaxPrincipleParams p;
  p.a = 0.5;
  p.b = 1.5;
  p.alpha = 1.0;
  p.S_minus = 0.02;
  p.S_plus = 0.01;
  p.w = default_margin(p.S_minus, p.alpha);
  const auto one = max_principle_check(handle([](cplx) { return cplx(1.0, 0.0); }), p);
  EXPECT_TRUE(one.holds);
  EXPECT_DOUBLE_EQ(one.max_inner, 1.0);

  p.alpha = 3.0;
  p.w = default_margin(p.S_minus, p.alpha);
  const double k = 20.0;
  const auto F = handle([k](cplx z) { return std::exp(cplx(0.0, -k) * z); });
  p.M = std::exp(k * p.S_plus);
  const auto rep = max_principle_check(F, p);
  EXPECT_TRUE(rep.holds);
  EXPECT_NEAR(rep.max_top, p.M, 1e-12 * p.M);
  EXPECT_LE(rep.max_inner, rep.bound);
}

TEST(MaxPrinciple, HypothesisFailures) {
  MaxPrincipleParams p;
  p.alpha = 2.0;
  p.S_minus = 0.02;
  p.S_plus = 0.01;
  p.w = default_margin(p.S_minus, p.alpha);
  const auto F = handle([](cplx z) { return std::exp(cplx(0.0, -20.0) * z); });
  EXPECT_THROW(max_principle_check(F, p), HypothesisError);
  auto q = p;
  q.S_plus = 0.05;
  EXPECT_THROW(max_principle_check(handle([](cplx) { return cplx(1.0); }), q), HypothesisError);
  q = p;
  q.w = 0.5 * p.w;
  EXPECT_THROW(max_principle_check(handle([](cplx) { return cplx(1.0); }), q), HypothesisError);
  q = p;
  q.alpha = 0.5;
  EXPECT_THROW(max_principle_check(handle([](cplx) { return cplx(1.0); }), q), HypothesisError);
  EXPECT_NEAR(default_margin(0.1, std::exp(1.0)), 0.1 * std::exp(1.0), 1e-15);
}

TEST(Transfer, RequiredNormFromQuasimode) {
  AprioriReport fit;
  fit.A_fit = 1.0;
  fit.p_fit = 0.0;
  Quasimode q;
  q.h = 0.1;
  q.lambda = 1.0;
  q.accuracy = 1e-9;
  Resonance r;
  r.lambda = cplx(1.0, -0.001);
  const auto rep = resonance_free_bound_transfer(fit, 0.1, q, {r}, 0.01);
  EXPECT_NEAR(rep.required_norm, 1e9, 1e-3);
  EXPECT_NEAR(rep.fitted_bound, 10.0, 1e-12);
  EXPECT_TRUE(rep.contradiction);
  ASSERT_TRUE(rep.nearest_resonance_distance.has_value());
  EXPECT_NEAR(*rep.nearest_resonance_distance, 0.001, 1e-15);
  EXPECT_TRUE(rep.explained_by_resonance);
  EXPECT_FALSE(resonance_free_bound_transfer(fit, 0.1, q).explained_by_resonance);
  EXPECT_THROW(resonance_free_bound_transfer(fit, 1.5, q), DomainError);
}

TEST(Spectrum, DistanceToProxy) {
  EXPECT_DOUBLE_EQ(distance_to_spectrum(cplx(2.0, 0.3), {}), 0.3);
  EXPECT_DOUBLE_EQ(distance_to_spectrum(cplx(-3.0, 4.0), {}), 5.0);
  EXPECT_DOUBLE_EQ(distance_to_spectrum(cplx(-4.6, 0.1), {-4.6}), 0.1);
}
