#include <algorithm>
#include <cmath>
#include <random>

#include "halfres/errors.hpp"
#include "halfres/harness/commands.hpp"
#include "halfres/parallel.hpp"

namespace halfres::harness {

namespace {

// Explicit 53-bit mapping so draws do not depend on the standard library.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double config_gamma(const ExperimentConfig& cfg) { return cfg.model.gamma.value_or(1.0); }

std::vector<cplx> geometric_sigmas(std::size_t n, double lo, double hi) {
  std::vector<cplx> s(n);
  for (std::size_t i = 0; i < n; ++i)
    s[i] = lo * std::pow(hi / lo, n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return 1.0;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

double suite_h(const PotentialModel& model, const ExperimentConfig& cfg) {
  if (!cfg.h_list.empty()) return cfg.h_list.front();
  return model.h_default.value_or(1.0);
}

}  // namespace

SuiteResult reflection_suite(const ExperimentConfig& cfg, std::uint64_t seed, const LineKernel& kernel) {
  SuiteResult res{"reflection", false, Json::object()};
  std::mt19937_64 rng(seed);
  const double gamma = config_gamma(cfg);
  double worst = 0.0;
  Json witness;
  for (std::size_t k = 0; k < cfg.bounds.reflection_samples; ++k) {
    const double re = uniform(rng, 0.5, 20.0);
    const cplx sigma(re, -gamma * uniform(rng, 0.0, 0.99));
    const double x = uniform(rng, 0.0, 3.0), y = uniform(rng, 0.0, 3.0);
    const double r = reflection_identity_residual(sigma, x, y, kernel);
    if (!(r <= worst)) {
      worst = r;
      witness = Json{{"sigma", to_json(sigma)}, {"x", x}, {"y", y}};
    }
  }
  res.pass = worst < 1e-12;
  res.details["samples"] = cfg.bounds.reflection_samples;
  res.details["max_residual"] = number_or_null(worst);
  res.details["threshold"] = 1e-12;
  res.details["worst_point"] = witness;
  return res;
}

SuiteResult m_decay_suite(const ExperimentConfig& cfg) {
  SuiteResult res{"m_decay", false, Json::object()};
  const auto sigmas = geometric_sigmas(cfg.bounds.sigma_samples, 1.0, 64.0);
  const auto weight = make_weight(0.0, cfg.norm.taper);
  const auto rep = verify_m_decay(sigmas, config_gamma(cfg), 0.1, weight);
  res.pass = rep.ratio < 10.0;
  Json norms = Json::array();
  for (double n : rep.norms) norms.push_back(number_or_null(n));
  res.details["sigmas"] = Json::array();
  for (auto s : sigmas) res.details["sigmas"].push_back(s.real());
  res.details["norms"] = norms;
  res.details["max_over_min"] = number_or_null(rep.ratio);
  res.details["threshold"] = 10.0;
  return res;
}

SuiteResult r0_slope_suite(const ExperimentConfig& cfg) {
  SuiteResult res{"r0_slope", false, Json::object()};
  const double gamma = config_gamma(cfg);
  const auto sigmas = geometric_sigmas(cfg.bounds.sigma_samples, 1.0, 64.0);
  const auto weight = make_weight(0.0, cfg.norm.taper);
  std::vector<double> lx, l0, l2;
  for (const auto s : sigmas) {
    const auto grid = default_kernel_grid(s, gamma, weight);
    lx.push_back(std::log(s.real()));
    l0.push_back(std::log(weighted_r0_norm(s, gamma, weight, grid, 0)));
    l2.push_back(std::log(weighted_r0_norm(s, gamma, weight, grid, 2)));
  }
  const auto f0 = fit_line(lx, l0);
  const auto f2 = fit_line(lx, l2);
  res.pass = std::abs(f0.slope + 1.0) <= 0.1 && std::abs(f2.slope - 1.0) <= 0.15;
  res.details["gamma"] = gamma;
  res.details["sigmas"] = Json::array();
  for (auto s : sigmas) res.details["sigmas"].push_back(s.real());
  res.details["s0"] = to_json(f0);
  res.details["s2"] = to_json(f2);
  res.details["s0_pass"] = std::abs(f0.slope + 1.0) <= 0.1;
  res.details["s2_pass"] = std::abs(f2.slope - 1.0) <= 0.15;

  const auto tail = geometric_sigmas(cfg.bounds.sigma_samples, 6.4, 64.0);
  std::vector<double> tx, t0, t2;
  for (const auto s : tail) {
    const auto grid = default_kernel_grid(s, gamma, weight);
    tx.push_back(std::log(s.real()));
    t0.push_back(std::log(weighted_r0_norm(s, gamma, weight, grid, 0)));
    t2.push_back(std::log(weighted_r0_norm(s, gamma, weight, grid, 2)));
  }
  res.details["last_decade"] = Json{{"s0", to_json(fit_line(tx, t0))}, {"s2", to_json(fit_line(tx, t2))}};
  res.details["expected"] = Json{{"s0", -1.0}, {"s0_tol", 0.1}, {"s2", 1.0}, {"s2_tol", 0.15}};
  return res;
}

SuiteResult apriori_suite(const PotentialModel& model, const ExperimentConfig& cfg, std::size_t threads) {
  SuiteResult res{"apriori", false, Json::object()};
  const double gamma = model.gamma;
  const auto so = scan_options(cfg);
  const auto weight = make_weight(model.x_box, model.x_box + cfg.norm.taper);
  std::vector<double> hs = cfg.h_list;
  if (hs.empty()) hs.push_back(model.h_default.value_or(1.0));
  std::vector<AprioriInput> inputs(hs.size());
  parallel_for(hs.size(), threads, [&](std::size_t i) {
    const double h = hs[i];
    FrequencyWindow w;
    w.a0 = cfg.window.a0;
    w.b0 = cfg.window.b0;
    w.eps0 = cfg.window.eps0;
    w.eps = cfg.window.eps;
    w.h = h;
    w.gamma = gamma;
    w.exclusion_radius = cfg.window.exclusion_radius;
    Rect rect = w.rect();
    rect.hi = cplx(rect.hi.real(), std::min(rect.hi.imag(), cfg.window.im_top));
    const auto sr = scan_resonances(model, rect, h, so);
    const auto pts = rect_grid(rect, cfg.norm.nx, cfg.norm.ny);
    std::vector<Disk> excl;
    for (const auto& r : sr.resonances) excl.push_back(Disk{r.lambda, cfg.bounds.exclusion_S});
    std::vector<double> wabs;
    double lam_max = 0.0;
    for (const auto z : pts) {
      wabs.push_back(std::abs(wronskian(model, z, h, so.continuation).value));
      lam_max = std::max(lam_max, std::abs(z));
    }
    NormOptions no;
    no.rtol = cfg.norm.rtol;
    no.w_scale = median(wabs);
    no.continuation = so.continuation;
    const auto grid = default_resolvent_grid(lam_max, h, gamma, weight, cfg.norm.points_per_wavelength);
    auto scan = norm_scan(model, pts, h, gamma, weight, grid, excl, no, 1);
    scan.S = cfg.bounds.exclusion_S;
    inputs[i] = {scan, sr.resonances, sr.total_winding};
  });
  const auto rep = apriori_bound_check(inputs, cfg.theorem.A_cap);
  res.details["status"] = rep.status;
  res.details["A_fit"] = rep.A_fit;
  res.details["p_fit"] = rep.p_fit;
  res.details["points_used"] = rep.points_used;
  res.details["points_excluded"] = rep.points_excluded;
  Json viol = Json::array();
  for (const auto& v : rep.violations)
    viol.push_back(Json{{"h", v.h}, {"lambda", to_json(v.lambda)}, {"norm", v.norm}, {"bound", v.bound}});
  res.details["violations"] = viol;
  Json resonances = Json::array();
  for (const auto& in : inputs)
    for (const auto& r : in.resonances) resonances.push_back(to_json(r));
  res.details["resonances"] = resonances;
  res.pass = rep.feasible && rep.violations.empty();

  // Laurent check along a ray at the first simple resonance.
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto it = std::find_if(inputs[i].resonances.begin(), inputs[i].resonances.end(),
                                 [](const Resonance& r) { return r.multiplicity == 1; });
    if (it == inputs[i].resonances.end()) continue;
    const double h = hs[i];
    const cplx r = it->lambda;
    std::vector<double> products;
    NormOptions no;
    no.rtol = cfg.norm.rtol;
    no.continuation = so.continuation;
    for (double t : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
      const cplx lam = r + t * std::polar(1.0, kPi / 4.0);
      const auto grid = default_resolvent_grid(std::abs(lam), h, gamma, weight, cfg.norm.points_per_wavelength);
      products.push_back(weighted_resolvent_norm(model, lam, h, gamma, weight, grid, no) * std::abs(lam * lam - r * r));
    }
    const auto [lo, hi] = std::minmax_element(products.begin(), products.end());
    const double spread = *hi / *lo;
    res.details["ray"] = Json{{"resonance", to_json(r)}, {"h", h}, {"max_over_min", spread}};
    res.pass = res.pass && spread < 2.0;
    break;
  }
  return res;
}

SuiteResult max_principle_suite(const ExperimentConfig& cfg, std::uint64_t seed) {
  SuiteResult res{"max_principle", false, Json::object()};
  const std::size_t want = cfg.bounds.max_principle_functions;
  const std::size_t pool_size = 8 * want + 8;
  auto polys = seeded_function_family(seed, FunctionKind::polynomial, pool_size / 2);
  auto expos = seeded_function_family(seed + 1, FunctionKind::exponential_polynomial, pool_size / 2);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::size_t validated = 0, rejected = 0, tried = 0;
  Json counterexamples = Json::array();
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < pool_size && validated < want; ++k) {
    const auto& g = (k % 2 == 0 ? polys : expos)[k / 2];
    MaxPrincipleParams p;
    p.a = -1.0;
    p.b = 1.0;
    p.S_minus = 0.5;
    p.S_plus = 0.25;
    p.alpha = uniform(rng, 1.5, 5.0);
    p.w = default_margin(p.S_minus, p.alpha);
    p.M = 1.0;
    ++tried;
    const auto [region, top] = max_principle_boundary_maxima(g.handle, p);
    if (!(top > 0.0)) {
      ++rejected;
      continue;
    }
    const double scale = p.M / top;
    AnalyticHandle F;
    F.eval = [&g, scale](cplx z) { return scale * g.handle(z); };
    F.label = g.handle.label;
    if (region * scale > std::exp(p.alpha)) {
      ++rejected;
      continue;
    }
    const auto rep = max_principle_check(F, p);
    ++validated;
    worst_ratio = std::max(worst_ratio, rep.max_inner / rep.bound);
    if (!rep.holds)
      counterexamples.push_back(Json{{"function", g.handle.label}, {"alpha", p.alpha}, {"witness", to_json(*rep.witness)}});
  }
  res.pass = validated == want && counterexamples.empty();
  res.details["validated"] = validated;
  res.details["rejected"] = rejected;
  res.details["tried"] = tried;
  res.details["max_inner_over_bound"] = worst_ratio;
  res.details["counterexamples"] = counterexamples;
  return res;
}

SuiteResult jensen_suite(const ExperimentConfig& cfg, std::uint64_t seed) {
  SuiteResult res{"jensen", false, Json::object()};
  const auto family = seeded_function_family(seed, FunctionKind::polynomial, cfg.bounds.jensen_functions);
  std::mt19937_64 rng(seed + 7);
  Json failures = Json::array();
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& f : family) {
    const double cr = uniform(rng, -1.0, 1.0);
    const cplx c(cr, uniform(rng, -1.0, 1.0));
    const double rho2 = uniform(rng, 0.5, 2.5);
    const double rho1 = rho2 * uniform(rng, 1.3, 3.0);
    int count = 0;
    for (const auto z : polynomial_roots(f.coefficients)) count += std::abs(z - c) < rho2;
    const double bound = jensen_zero_bound(f.handle, c, rho1, rho2);
    min_slack = std::min(min_slack, bound - count);
    if (bound < count - 1e-9)
      failures.push_back(Json{{"function", f.handle.label}, {"bound", bound}, {"count", count}});
  }
  res.pass = failures.empty();
  res.details["functions"] = family.size();
  res.details["min_slack"] = number_or_null(min_slack);
  res.details["failures"] = failures;
  return res;
}

SuiteResult blaschke_suite(const ExperimentConfig& cfg, std::uint64_t seed) {
  SuiteResult res{"blaschke", false, Json::object()};
  const auto family = seeded_function_family(seed + 11, FunctionKind::polynomial, cfg.bounds.blaschke_functions);
  Json cases = Json::array();
  bool all_sound = true;
  for (const auto& f : family) {
    const auto roots = polynomial_roots(f.coefficients);
    const cplx c(0.0, 0.0);
    double rho2 = 2.0;
    // Keep the completeness circle away from the zeros.
    for (int k = 0; k < 20; ++k) {
      bool near = false;
      for (const auto z : roots) near = near || std::abs(std::abs(z - c) - rho2) < 0.05;
      if (!near) break;
      rho2 += 0.07;
    }
    std::vector<cplx> zeros;
    for (const auto z : roots)
      if (std::abs(z - c) < rho2) zeros.push_back(z);
    bool center_clear = true;
    for (const auto z : roots) center_clear = center_clear && std::abs(z - c) > 0.05;
    if (!center_clear) continue;
    const auto cert = blaschke_lower_bound(f.handle, c, rho2 + 1.5, rho2, 0.5 * rho2, zeros, cfg.bounds.exclusion_S,
                                           cfg.bounds.blaschke_points);
    const bool ok = cert.sound && cert.sampled_points >= cfg.bounds.blaschke_points;
    all_sound = all_sound && ok;
    cases.push_back(Json{{"function", f.handle.label},
                         {"zeros", zeros.size()},
                         {"lower_bound", cert.min_log_modulus},
                         {"sampled_min", cert.sampled_min_log_modulus},
                         {"sampled_points", cert.sampled_points},
                         {"sound", ok}});
  }
  res.pass = all_sound && !cases.empty();
  res.details["cases"] = cases;
  return res;
}

SuiteResult selfadjoint_suite(const PotentialModel& model, const ExperimentConfig& cfg, std::uint64_t seed,
                              std::size_t threads) {
  SuiteResult res{"selfadjoint", false, Json::object()};
  const double h = suite_h(model, cfg);
  const double gamma = model.gamma;
  const auto weight = make_weight(model.x_box, model.x_box + cfg.norm.taper);
  const double L_box = model.x_box + 12.0;
  std::vector<double> bound_states;
  for (const auto& p : dirichlet_eigensolve(model, L_box, h, 8))
    if (p.eigenvalue < 0.0) bound_states.push_back(p.eigenvalue);
  std::mt19937_64 rng(seed + 23);
  const std::size_t n = cfg.bounds.selfadjoint_samples;
  std::vector<cplx> lambdas(n);
  for (auto& l : lambdas) {
    const double r = uniform(rng, 0.3, 2.0);
    l = std::polar(r, uniform(rng, 0.02, 0.5 * kPi - 0.02));
  }
  std::vector<double> ratio(n);
  NormOptions no;
  no.rtol = cfg.norm.rtol;
  no.continuation = continuation_options(cfg);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto grid = default_resolvent_grid(std::abs(lambdas[i]), h, gamma, weight, cfg.norm.points_per_wavelength);
    double norm = 0.0;
    try {
      norm = weighted_resolvent_norm(model, lambdas[i], h, gamma, weight, grid, no);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " at lambda = " + format_double(lambdas[i].real()) + " + " +
                  format_double(lambdas[i].imag()) + "i");
    }
    ratio[i] = norm * distance_to_spectrum(lambdas[i] * lambdas[i], bound_states);
  });
  const auto worst = std::max_element(ratio.begin(), ratio.end());
  res.pass = *worst <= 1.05;
  res.details["h"] = h;
  res.details["samples"] = n;
  res.details["bound_states"] = bound_states;
  res.details["max_norm_times_distance"] = *worst;
  res.details["worst_lambda"] = to_json(lambdas[static_cast<std::size_t>(worst - ratio.begin())]);
  res.details["threshold"] = 1.05;
  return res;
}

BoundsReport bounds_suite(const PotentialModel& model, const ExperimentConfig& cfg, const RunContext& ctx) {
  BoundsReport rep;
  for (const auto& name : cfg.bounds.suites) {
    try {
      if (name == "reflection")
        rep.suites.push_back(reflection_suite(cfg, ctx.seed));
      else if (name == "m_decay")
        rep.suites.push_back(m_decay_suite(cfg));
      else if (name == "r0_slope")
        rep.suites.push_back(r0_slope_suite(cfg));
      else if (name == "apriori")
        rep.suites.push_back(apriori_suite(model, cfg, ctx.threads));
      else if (name == "max_principle")
        rep.suites.push_back(max_principle_suite(cfg, ctx.seed));
      else if (name == "jensen")
        rep.suites.push_back(jensen_suite(cfg, ctx.seed));
      else if (name == "blaschke")
        rep.suites.push_back(blaschke_suite(cfg, ctx.seed));
      else if (name == "selfadjoint")
        rep.suites.push_back(selfadjoint_suite(model, cfg, ctx.seed, ctx.threads));
      else
        throw ConfigError("field 'bounds.suites': unknown suite '" + name + "'", "bounds.suites");
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      rep.suites.push_back(SuiteResult{name, false, Json{{"error", e.what()}}});
    }
  }
  rep.pass = std::all_of(rep.suites.begin(), rep.suites.end(), [](const SuiteResult& s) { return s.pass; });
  return rep;
}

}  // namespace halfres::harness
