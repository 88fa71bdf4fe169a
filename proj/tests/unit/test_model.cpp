#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "halfres/errors.hpp"
#include "halfres/model.hpp"
#include "halfres/model_config.hpp"

using namespace halfres;

namespace {

PotentialModel custom(std::function<double(double, double)> V) {
  PotentialModel m;
  m.label = "custom";
  m.a = [](double, double) { return 1.0; };
  m.V = std::move(V);
  m.gamma = 1.0;
  m.delta = 1.0;
  m.decay_const = 1.0;
  return m;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

}  // namespace

TEST(Coefficients, BuiltinValues) {
  const auto free = builtin_model("free", {});
  for (double x : {0.0, 0.3, 7.0}) {
    const auto c = eval_coefficients(free, x, 0.5);
    EXPECT_EQ(c.a, 1.0);
    EXPECT_EQ(c.V, 0.0);
  }
  const std::vector<double> sw{10.0, 1.0};
  const auto c1 = eval_coefficients(builtin_model("square_well", sw), 0.5, 1.0);
  EXPECT_EQ(c1.a, 1.0);
  EXPECT_EQ(c1.V, -10.0);
  const std::vector<double> gb{2.0, 2.0, 0.5};
  const auto c2 = eval_coefficients(builtin_model("gauss_barrier", gb), 2.0, 1.0);
  EXPECT_EQ(c2.a, 1.0);
  EXPECT_EQ(c2.V, 2.0);
}

TEST(Coefficients, DomainErrors) {
  const auto m = builtin_model("free", {});
  EXPECT_THROW(eval_coefficients(m, -1e-9, 1.0), DomainError);
  EXPECT_THROW(eval_coefficients(m, 1.0, 0.0), DomainError);
  EXPECT_THROW(eval_coefficients(m, 1.0, -2.0), DomainError);
}

TEST(Coefficients, Pure) {
  const std::vector<double> gb{2.0, 2.0, 0.5};
  const auto m = builtin_model("gauss_barrier", gb);
  for (double x : linspace(0.0, 4.0, 37)) {
    const auto p = eval_coefficients(m, x, 0.1);
    const auto q = eval_coefficients(m, x, 0.1);
    EXPECT_EQ(std::memcmp(&p, &q, sizeof p), 0);
  }
}

TEST(Decay, ExactExponentialPasses) {
  const auto m = custom([](double x, double) { return std::exp(-3.0 * x); });
  const auto rep = validate_decay(m, linspace(0.0, 5.0, 100), 1.0);
  EXPECT_TRUE(rep.passes);
  EXPECT_NEAR(rep.fitted_rate, 3.0, 1e-9);
}

TEST(Decay, PolynomialDecayFailsAtLargeX) {
  const auto m = custom([](double x, double) { return 1.0 / (1.0 + x * x); });
  const auto rep = validate_decay(m, linspace(0.0, 10.0, 200), 1.0);
  EXPECT_FALSE(rep.passes);
  EXPECT_GT(rep.worst_x, 5.0);
}

TEST(Decay, GaussBarrierWithGridSupremum) {
  const double rate = 3.0;
  const auto grid = linspace(0.0, 10.0 / rate, 400);
  auto m = custom([](double x, double) { return 2.0 * std::exp(-(x - 2.0) * (x - 2.0) / 0.25); });
  double sup = 0.0;
  for (double x : grid) sup = std::max(sup, m.V(x, 1.0) * std::exp(rate * x));
  m.decay_const = sup;
  EXPECT_TRUE(validate_decay(m, grid, 1.0).passes);
  m.decay_const = 0.9 * sup;
  EXPECT_FALSE(validate_decay(m, grid, 1.0).passes);
}

TEST(Decay, BuiltinsPassOnDeclaredEnvelope) {
  const std::vector<std::pair<std::string, std::vector<double>>> models{
      {"free", {}}, {"square_well", {10.0, 1.0}}, {"gauss_barrier", {2.0, 2.0, 0.5}}, {"ads_like", {8.0}}};
  for (const auto& [name, params] : models) {
    const auto m = builtin_model(name, params);
    const double rate = m.decay_rate();
    const auto grid = linspace(m.x_box, m.x_box + 10.0 / rate, 300);
    EXPECT_TRUE(validate_decay(m, grid, 0.1).passes) << name;
  }
}

TEST(Decay, SquareWellAnyGammaDelta) {
  const std::vector<double> sw{10.0, 1.0};
  auto m = builtin_model("square_well", sw);
  EXPECT_DOUBLE_EQ(m.decay_const, 10.0);
  for (double g : {0.5, 1.0, 4.0}) {
    m.gamma = g;
    m.delta = 2.0 * g;
    EXPECT_TRUE(validate_decay(m, linspace(m.x_box, m.x_box + 5.0, 50), 1.0).passes);
  }
}

TEST(Weight, RegionsAndValues) {
  const auto w01 = make_weight(0.0, 1.0);
  EXPECT_DOUBLE_EQ(w01(2.0), 2.0);
  const auto w13 = make_weight(1.0, 3.0);
  EXPECT_EQ(w13(0.5), 0.0);
  EXPECT_EQ(w13(1.0), 0.0);
  EXPECT_DOUBLE_EQ(w13(3.0), 3.0);
  EXPECT_DOUBLE_EQ(w13(4.5), 4.5);
  EXPECT_THROW(make_weight(2.0, 2.0), DomainError);
  EXPECT_THROW(make_weight(2.0, 1.0), DomainError);
  EXPECT_THROW(make_weight(-1.0, 1.0), DomainError);
}

TEST(Weight, MonotoneWithBoundedSlope) {
  // phi must climb from 0 to 3 over [1, 3], so its slope cannot stay below 1.5 everywhere.
  const auto w = make_weight(1.0, 3.0);
  const double dx = 1e-3;
  double prev = w(1.0), max_slope = 0.0;
  for (double x = 1.0 + dx; x <= 3.0 + 1e-12; x += dx) {
    const double v = w(x);
    const double slope = (v - prev) / dx;
    EXPECT_GE(slope, -1e-12);
    max_slope = std::max(max_slope, slope);
    prev = v;
  }
  EXPECT_GE(max_slope, 1.5);
  EXPECT_LE(max_slope, 4.0);
}

TEST(Weight, ContinuousFirstDerivative) {
  for (const auto& [xb, xl] : std::vector<std::pair<double, double>>{{0.0, 1.0}, {1.0, 3.0}, {0.5, 4.0}}) {
    const auto w = make_weight(xb, xl);
    const double d = 1e-3;
    for (double x0 : {xb, xl}) {
      const double left = (w(x0) - w(x0 - d)) / d;
      const double right = (w(x0 + d) - w(x0)) / d;
      EXPECT_NEAR(left, right, 5e-3) << x0;
      EXPECT_NEAR(w.derivative(x0 - 1e-12), w.derivative(x0 + 1e-12), 1e-6);
    }
    for (double x = xb + 0.01; x < xl; x += 0.07) {
      const double fd = (w(x + 1e-6) - w(x - 1e-6)) / 2e-6;
      EXPECT_NEAR(w.derivative(x), fd, 1e-6);
    }
  }
}

TEST(Window, RectangleAndInvariants) {
  FrequencyWindow w;
  w.a0 = 0.5;
  w.b0 = 1.5;
  w.eps0 = 0.1;
  w.eps = 0.05;
  w.h = 0.1;
  w.gamma = 1.0;
  w.exclusion_radius = 0.01;
  EXPECT_NO_THROW(w.validate());
  const auto r = w.rect();
  EXPECT_DOUBLE_EQ(r.lo.real(), 0.55);
  EXPECT_DOUBLE_EQ(r.hi.real(), 1.45);
  EXPECT_NEAR(r.lo.imag(), (-1.0 + 0.15) * 0.1, 1e-15);
  EXPECT_GT(r.lo.imag(), -w.gamma * w.h);
  EXPECT_DOUBLE_EQ(r.hi.imag(), 1.0);
  w.exclusion_radius = 0.3;
  EXPECT_THROW(w.validate(), DomainError);
}

TEST(Builtin, Library) {
  const auto ads = builtin_model("ads_like", std::vector<double>{8.0});
  ASSERT_TRUE(ads.h_default.has_value());
  EXPECT_DOUBLE_EQ(*ads.h_default, 0.125);
  const auto ads4 = builtin_model("ads_like", std::vector<double>{4.0});
  for (double x : {0.0, 1.0, 2.0, 3.5}) EXPECT_EQ(ads.V(x, 0.125), ads4.V(x, 0.25));

  const std::vector<double> sw{10.0, 1.0};
  const auto m = builtin_model("square_well", sw);
  ASSERT_TRUE(m.compact_support.has_value());
  EXPECT_EQ(m.V(1.0, 1.0), 0.0);
  EXPECT_EQ(m.V(5.0, 1.0), 0.0);

  EXPECT_THROW(builtin_model("harmonic", {}), DomainError);
  EXPECT_THROW(builtin_model("square_well", std::vector<double>{10.0}), DomainError);
  EXPECT_THROW(builtin_model("square_well", std::vector<double>{10.0, 0.0}), DomainError);
  EXPECT_THROW(builtin_model("gauss_barrier", std::vector<double>{2.0, 2.0, -0.5}), DomainError);
  EXPECT_THROW(builtin_model("ads_like", std::vector<double>{0.0}), DomainError);
}

TEST(ModelConfig, RoundTrip) {
  const auto spec = parse_model_spec("name: gauss_barrier\nparams: [2, 2, 0.5]\ngamma: 0.75\n");
  EXPECT_EQ(spec.name, "gauss_barrier");
  ASSERT_EQ(spec.params.size(), 3u);
  const auto model = build_model(spec);
  EXPECT_DOUBLE_EQ(model.gamma, 0.75);
  const auto again = parse_model_spec(format_model_spec(spec_of(model)));
  EXPECT_EQ(again.name, spec.name);
  EXPECT_EQ(again.params, spec.params);
  EXPECT_DOUBLE_EQ(*again.gamma, 0.75);
}

TEST(ModelConfig, Errors) {
  EXPECT_THROW(parse_model_spec("params: [1]\n"), ConfigError);
  EXPECT_THROW(build_model(parse_model_spec("name: free\ngamma: -1\n")), ConfigError);
  EXPECT_THROW(parse_model_spec("name: free\ngamma: abc\n"), ConfigError);
  try {
    parse_model_spec("name: free\n\ngamma: [\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GT(e.line(), 0);
  }
}
