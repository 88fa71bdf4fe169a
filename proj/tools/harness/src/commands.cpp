#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "halfres/errors.hpp"
#include "halfres/harness/commands.hpp"
#include "halfres/parallel.hpp"

namespace halfres::harness {

namespace {

std::string tag(double h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", h);
  return buf;
}

Json resonance_list(const std::vector<Resonance>& rs) {
  Json a = Json::array();
  for (const auto& r : rs) a.push_back(to_json(r));
  return a;
}

Json model_json(const PotentialModel& m) {
  return Json{{"label", m.label},
              {"params", m.params},
              {"gamma", m.gamma},
              {"delta", m.delta},
              {"x_box", m.x_box},
              {"decay_const", m.decay_const}};
}

CommandResult finish(OutputDir* out, Json report, int status) {
  report["status"] = status == 0 ? "pass" : "fail";
  if (out) out->finish(Json{{"status", report["status"]}});
  return CommandResult{status, std::move(report)};
}

std::unique_ptr<OutputDir> open_out(const RunContext& ctx, const std::string& command) {
  if (!ctx.out) return nullptr;
  return std::make_unique<OutputDir>(*ctx.out, command);
}

Rect window_rect(const ExperimentConfig& cfg, double gamma, double h) {
  FrequencyWindow w;
  w.a0 = cfg.window.a0;
  w.b0 = cfg.window.b0;
  w.eps0 = cfg.window.eps0;
  w.eps = cfg.window.eps;
  w.h = h;
  w.gamma = gamma;
  w.exclusion_radius = cfg.window.exclusion_radius;
  w.validate();
  Rect r = w.rect();
  r.hi = cplx(r.hi.real(), std::min(r.hi.imag(), cfg.window.im_top));
  return r;
}

const Json& resonance_schema() {
  static const Json s = Json::parse(R"({
    "type": "object", "required": ["lambda", "multiplicity", "h"],
    "properties": {
      "lambda": {"type": "object", "required": ["re", "im"],
                 "properties": {"re": {"type": "number"}, "im": {"type": "number"}}},
      "multiplicity": {"type": "integer", "minimum": 1},
      "h": {"type": "number"}}})");
  return s;
}

}  // namespace

// validate

ValidateReport validate_experiment(const ExperimentConfig& cfg) {
  ValidateReport rep;
  const auto model = build_model(cfg.model);
  std::vector<double> hs = cfg.h_list;
  if (hs.empty()) hs.push_back(model.h_default.value_or(1.0));
  rep.details = Json::object();
  rep.details["model"] = model_json(model);

  rep.decay = validate_decay(model, default_decay_grid(model), hs.front());
  rep.details["decay"] = Json{{"passes", rep.decay.passes},
                              {"declared_rate", model.decay_rate()},
                              {"fitted_rate", number_or_null(rep.decay.fitted_rate)},
                              {"worst_x", rep.decay.worst_x},
                              {"worst_ratio", number_or_null(rep.decay.worst_ratio)}};
  if (!rep.decay.passes)
    rep.failures.push_back("decay: perturbation exceeds C exp(-(2 gamma + delta) x); fitted rate " +
                           format_double(rep.decay.fitted_rate) + " vs declared " + format_double(model.decay_rate()));

  try {
    const auto w = make_weight(model.x_box, model.x_box + cfg.norm.taper);
    bool monotone = true, linear = true;
    double prev = w(0.0);
    for (int k = 1; k <= 400; ++k) {
      const double x = (model.x_box + cfg.norm.taper + 2.0) * k / 400.0;
      monotone = monotone && w(x) >= prev - 1e-15;
      prev = w(x);
      if (x >= w.x_linear()) linear = linear && std::abs(w(x) - x) <= 1e-12 * x;
    }
    rep.details["weight"] = Json{{"x_box", w.x_box()}, {"x_linear", w.x_linear()}, {"monotone", monotone},
                                 {"linear_tail", linear}};
    if (!monotone || !linear) rep.failures.push_back("weight: phi not monotone or not linear beyond x_linear");
  } catch (const DomainError& e) {
    rep.failures.push_back(std::string("weight: ") + e.what());
  }

  Json windows = Json::array();
  for (double h : hs) {
    try {
      const Rect r = window_rect(cfg, model.gamma, h);
      windows.push_back(Json{{"h", h}, {"rect", to_json(r)}});
    } catch (const DomainError& e) {
      rep.failures.push_back("window at h=" + tag(h) + ": " + e.what());
    }
  }
  rep.details["windows"] = windows;

  const double h_min = *std::min_element(hs.begin(), hs.end());
  const auto weight = make_weight(model.x_box, model.x_box + cfg.norm.taper);
  const double lam_max = std::abs(cplx(cfg.window.b0, cfg.window.im_top));
  const auto grid = default_resolvent_grid(lam_max, h_min, model.gamma, weight, cfg.norm.points_per_wavelength);
  const double per_wavelength = 2.0 * kPi * h_min / lam_max / grid.dx;
  rep.details["resolvent_grid"] = Json{{"dx", grid.dx}, {"x_max", grid.x_max}, {"points_per_wavelength", per_wavelength}};
  if (per_wavelength < 10.0) rep.failures.push_back("resolvent grid: fewer than 10 points per wavelength");

  const auto n = default_interior_points(model, cfg.quasimode.L, h_min, cfg.quasimode.points_per_wavelength);
  const auto n_needed = default_interior_points(model, cfg.quasimode.L, h_min, 12.0);
  rep.details["quasimode_grid"] = Json{{"interior_points", n}, {"minimum", n_needed}};
  if (n < n_needed) rep.failures.push_back("quasimode grid: below 12 points per wavelength");

  Json ells = Json::array();
  for (double ell : cfg.ell_list) {
    ModelSpec spec = cfg.model;
    spec.name = "ads_like";
    spec.params = {ell};
    const auto m = build_model(spec);
    const auto d = validate_decay(m, default_decay_grid(m), *m.h_default);
    ells.push_back(Json{{"ell", ell}, {"decay_passes", d.passes}, {"fitted_rate", number_or_null(d.fitted_rate)}});
    if (!d.passes) rep.failures.push_back("decay at ell=" + tag(ell));
  }
  rep.details["ell"] = ells;
  rep.pass = rep.failures.empty();
  return rep;
}

CommandResult run_validate(const ExperimentConfig& cfg, const RunContext& ctx) {
  auto out = open_out(ctx, "validate");
  const auto rep = validate_experiment(cfg);
  Json j;
  j["command"] = "validate";
  j["name"] = cfg.name;
  j["pass"] = rep.pass;
  j["failures"] = rep.failures;
  j["details"] = rep.details;
  if (out) out->write_json("validate.json", j, validate_schema());
  return finish(out.get(), j, rep.pass ? 0 : 1);
}

// scan

CommandResult run_scan(const ExperimentConfig& cfg, const RunContext& ctx) {
  const bool sweep = !cfg.ell_list.empty();
  if (!sweep) require_h_list(cfg);
  auto out = open_out(ctx, "scan");
  const std::size_t n = sweep ? cfg.ell_list.size() : cfg.h_list.size();
  std::vector<Json> records(n);
  std::vector<std::vector<Resonance>> found(n);
  const auto so = scan_options(cfg);
  parallel_for(n, ctx.threads, [&](std::size_t i) {
    Json rec;
    ModelSpec spec = cfg.model;
    if (sweep) {
      spec.name = "ads_like";
      spec.params = {cfg.ell_list[i]};
      rec["ell"] = cfg.ell_list[i];
    }
    try {
      const auto model = build_model(spec);
      const double h = sweep ? *model.h_default : cfg.h_list[i];
      rec["h"] = h;
      const Rect rect = window_rect(cfg, model.gamma, h);
      rec["window"] = to_json(rect);
      const auto sr = scan_resonances(model, rect, h, so);
      int sum = 0;
      for (const auto& r : sr.resonances) sum += r.multiplicity;
      rec["total_winding"] = sr.total_winding;
      rec["winding_check"] = sum == sr.total_winding;
      rec["resonances"] = resonance_list(sr.resonances);
      rec["spurious"] = resonance_list(sr.spurious);
      rec["subdivisions"] = sr.subdivisions.size();
      found[i] = sr.resonances;
    } catch (const Error& e) {
      rec["error"] = e.what();
    }
    records[i] = std::move(rec);
  });
  Json j;
  j["command"] = "scan";
  j["name"] = cfg.name;
  j["model"] = cfg.model.name;
  j["records"] = records;
  bool ok = true;
  CsvTable csv({"h", "re_lambda", "im_lambda", "multiplicity"});
  for (std::size_t i = 0; i < n; ++i) {
    ok = ok && !records[i].contains("error") && records[i].value("winding_check", false);
    for (const auto& r : found[i])
      csv.add_row({format_double(records[i]["h"].get<double>()), format_double(r.lambda.real()),
                   format_double(r.lambda.imag()), std::to_string(r.multiplicity)});
  }
  if (out) {
    out->write_json("scan.json", j, scan_schema());
    out->write_csv("resonances.csv", csv);
  }
  return finish(out.get(), j, ok ? 0 : 1);
}

// quasimode

CommandResult run_quasimode(const ExperimentConfig& cfg, const RunContext& ctx) {
  require_h_list(cfg);
  auto out = open_out(ctx, "quasimode");
  const auto model = build_model(cfg.model);
  const std::size_t n = cfg.h_list.size();
  std::vector<ClusterResult> clusters(n);
  std::vector<std::string> errors(n);
  parallel_for(n, ctx.threads, [&](std::size_t i) {
    try {
      clusters[i] = quasimode_cluster(model, cfg, cfg.h_list[i]);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  Json records = Json::array();
  CsvTable summary({"h", "energy", "lambda", "R"});
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = cfg.h_list[i];
    Json rec;
    rec["h"] = h;
    rec["energies"] = clusters[i].energies;
    Json members = Json::array();
    for (std::size_t k = 0; k < clusters[i].members.size(); ++k) {
      const auto& q = clusters[i].members[k];
      members.push_back(Json{{"lambda", q.lambda},
                             {"accuracy", q.accuracy},
                             {"support_radius", q.support_radius},
                             {"x_cut", q.cutoff.x_cut},
                             {"width", q.cutoff.width}});
      summary.add_row({format_double(h), format_double(q.lambda * q.lambda), format_double(q.lambda),
                       format_double(q.accuracy)});
      if (out) {
        CsvTable prof({"x", "u"});
        for (std::size_t j = 0; j < q.x.size(); ++j) prof.add_row({format_double(q.x[j]), format_double(q.u[j])});
        out->write_csv("quasimode_h" + tag(h) + "_" + std::to_string(k) + ".csv", prof);
      }
      any = true;
    }
    rec["members"] = members;
    rec["R"] = clusters[i].R;
    if (clusters[i].members.size() > 1) {
      const auto ind = independence_check(clusters[i].members, h, cfg.theorem.N, cfg.theorem.M);
      rec["independence"] = Json{{"independent", ind.independent}, {"margin", ind.margin}, {"threshold", ind.threshold}};
    }
    if (!clusters[i].unmet.empty()) rec["unmet"] = clusters[i].unmet;
    if (!errors[i].empty()) rec["error"] = errors[i];
    records.push_back(rec);
  }
  Json j;
  j["command"] = "quasimode";
  j["name"] = cfg.name;
  j["model"] = model_json(model);
  j["records"] = records;
  if (out) {
    out->write_json("quasimodes.json", j, quasimode_schema());
    out->write_csv("quasimodes.csv", summary);
  }
  const bool errored = std::any_of(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); });
  return finish(out.get(), j, errored || !any ? 1 : 0);
}

// theorem-check

CommandResult run_theorem_check(const ExperimentConfig& cfg, const RunContext& ctx) {
  auto out = open_out(ctx, "theorem-check");
  const auto model = build_model(cfg.model);
  const auto rep = theorem_check(model, cfg, ctx.threads);
  Json records = Json::array();
  CsvTable csv({"h", "lambda", "R", "S", "c", "re_r", "im_r", "distance", "in_strip", "m", "status"});
  for (const auto& r : rep.records) {
    Json rec;
    rec["h"] = r.h;
    rec["lambda"] = r.lambdas;
    rec["R"] = r.R;
    rec["m"] = r.m;
    rec["S"] = r.S;
    rec["c"] = r.c;
    rec["gate"] = r.gate;
    rec["gate_met"] = r.gate_met;
    rec["strip"] = to_json(r.strip);
    rec["scanned"] = to_json(r.scanned);
    rec["total_winding"] = r.total_winding;
    rec["resonances"] = resonance_list(r.resonances);
    rec["in_strip"] = r.in_strip;
    rec["in_enlarged_strip"] = r.in_enlarged_strip;
    rec["nearest"] = r.nearest ? to_json(*r.nearest) : Json(nullptr);
    rec["nearest_distance"] = r.nearest ? Json(r.nearest_distance) : Json(nullptr);
    rec["status"] = r.status;
    rec["pass"] = r.status == "pass";
    if (!r.detail.empty()) rec["detail"] = r.detail;
    records.push_back(rec);
    csv.add_row({format_double(r.h), r.lambdas.empty() ? "" : format_double(r.lambdas.front()), format_double(r.R),
                 format_double(r.S), format_double(r.c), r.nearest ? format_double(r.nearest->lambda.real()) : "",
                 r.nearest ? format_double(r.nearest->lambda.imag()) : "",
                 r.nearest ? format_double(r.nearest_distance) : "", std::to_string(r.in_strip), std::to_string(r.m),
                 r.status});
  }
  Json j;
  j["command"] = "theorem-check";
  j["name"] = cfg.name;
  j["model"] = model_json(model);
  j["theorem"] = Json{{"N", cfg.theorem.N}, {"M", cfg.theorem.M}, {"B", cfg.theorem.B}, {"C0", cfg.theorem.C0},
                      {"C", cfg.theorem.C}};
  j["apriori"] = Json{{"status", rep.apriori.status},
                      {"A_fit", rep.apriori.A_fit},
                      {"p_fit", rep.apriori.p_fit},
                      {"points_used", rep.apriori.points_used},
                      {"violations", rep.apriori.violations.size()}};
  j["records"] = records;
  j["decay_fit"] = rep.decay_fit ? to_json(*rep.decay_fit) : Json(nullptr);
  j["distance_decreasing"] = rep.distance_decreasing;
  j["all_pass"] = rep.all_pass;
  j["conclusion_violated"] = rep.violated;
  if (out) {
    out->write_json("theorem_report.json", j, theorem_schema());
    out->write_csv("theorem_records.csv", csv);
  }
  return finish(out.get(), j, rep.violated ? 1 : 0);
}

// ads-sweep

CommandResult run_ads_sweep(const ExperimentConfig& cfg, const RunContext& ctx) {
  auto out = open_out(ctx, "ads-sweep");
  const auto rep = ads_sweep(cfg, ctx.threads);
  Json records = Json::array();
  CsvTable csv({"ell", "h", "energy", "re_lambda", "im_lambda", "width", "width_check", "resolved"});
  for (const auto& r : rep.records) {
    Json rec;
    rec["ell"] = r.ell;
    rec["h"] = r.h;
    rec["energy"] = r.energy;
    rec["lambda0"] = r.lambda0;
    rec["R"] = r.R ? Json(*r.R) : Json(nullptr);
    rec["resonance"] = r.nearest ? to_json(*r.nearest) : Json(nullptr);
    rec["width"] = number_or_null(r.width);
    rec["width_check"] = number_or_null(r.width_check);
    rec["resolved"] = r.resolved;
    rec["status"] = r.status;
    if (!r.detail.empty()) rec["detail"] = r.detail;
    records.push_back(rec);
    if (r.nearest)
      csv.add_row({format_double(r.ell), format_double(r.h), format_double(r.energy),
                   format_double(r.nearest->lambda.real()), format_double(r.nearest->lambda.imag()),
                   format_double(r.width), format_double(r.width_check), r.resolved ? "true" : "false"});
  }
  Json j;
  j["command"] = "ads-sweep";
  j["name"] = cfg.name;
  j["records"] = records;
  j["fit"] = rep.fit ? to_json(*rep.fit) : Json(nullptr);
  j["resolved_fit"] = rep.resolved_fit ? to_json(*rep.resolved_fit) : Json(nullptr);
  j["C_min"] = rep.C_min ? Json(*rep.C_min) : Json(nullptr);
  j["all_positive"] = rep.all_positive;
  j["pass"] = rep.pass;
  if (out) {
    out->write_json("ads_sweep.json", j, ads_schema());
    out->write_csv("widths.csv", csv);
  }
  return finish(out.get(), j, rep.pass ? 0 : 1);
}

// bounds

CommandResult run_bounds(const ExperimentConfig& cfg, const RunContext& ctx) {
  auto out = open_out(ctx, "bounds");
  const auto model = build_model(cfg.model);
  const auto rep = bounds_suite(model, cfg, ctx);
  Json suites = Json::array();
  for (const auto& s : rep.suites) suites.push_back(Json{{"name", s.name}, {"pass", s.pass}, {"details", s.details}});
  Json j;
  j["command"] = "bounds";
  j["name"] = cfg.name;
  j["model"] = model_json(model);
  j["seed"] = ctx.seed;
  j["suites"] = suites;
  j["pass"] = rep.pass;
  if (out) out->write_json("bounds.json", j, bounds_schema());
  return finish(out.get(), j, rep.pass ? 0 : 1);
}

// schemas

const Json& validate_schema() {
  static const Json s = Json::parse(R"({
    "type": "object", "required": ["command", "pass", "failures", "details"],
    "properties": {"command": {"enum": ["validate"]}, "pass": {"type": "boolean"},
                   "failures": {"type": "array", "items": {"type": "string"}},
                   "details": {"type": "object", "required": ["model", "decay"]}}})");
  return s;
}

const Json& scan_schema() {
  static const Json s = [] {
    Json j = Json::parse(R"({
      "type": "object", "required": ["command", "records"],
      "properties": {"command": {"enum": ["scan"]},
                     "records": {"type": "array", "items": {"type": "object", "required": ["h"],
                       "properties": {"h": {"type": "number"}, "total_winding": {"type": "integer"},
                                      "resonances": {"type": "array"}}}}}})");
    j["properties"]["records"]["items"]["properties"]["resonances"]["items"] = resonance_schema();
    return j;
  }();
  return s;
}

const Json& quasimode_schema() {
  static const Json s = Json::parse(R"({
    "type": "object", "required": ["command", "records"],
    "properties": {"command": {"enum": ["quasimode"]},
                   "records": {"type": "array", "items": {"type": "object", "required": ["h", "members", "R"],
                     "properties": {"members": {"type": "array", "items": {"type": "object",
                       "required": ["lambda", "accuracy"],
                       "properties": {"lambda": {"type": "number"}, "accuracy": {"type": "number", "minimum": 0}}}}}}}}})");
  return s;
}

const Json& theorem_schema() {
  static const Json s = Json::parse(R"({
    "type": "object", "required": ["command", "records", "apriori", "decay_fit", "all_pass", "conclusion_violated"],
    "properties": {"command": {"enum": ["theorem-check"]},
                   "records": {"type": "array", "items": {"type": "object",
                     "required": ["h", "lambda", "R", "c", "resonances", "nearest_distance", "status", "pass"],
                     "properties": {"status": {"enum": ["pass", "hypotheses unmet", "conclusion violated", "error"]},
                                    "pass": {"type": "boolean"}, "c": {"type": "number"},
                                    "nearest_distance": {"type": ["number", "null"]}}}},
                   "decay_fit": {"type": ["object", "null"]},
                   "all_pass": {"type": "boolean"}, "conclusion_violated": {"type": "boolean"}}})");
  return s;
}

const Json& ads_schema() {
  static const Json s = Json::parse(R"({
    "type": "object", "required": ["command", "records", "fit", "C_min", "all_positive", "pass"],
    "properties": {"command": {"enum": ["ads-sweep"]},
                   "records": {"type": "array", "items": {"type": "object",
                     "required": ["ell", "h", "width", "status"],
                     "properties": {"ell": {"type": "number"}, "width": {"type": ["number", "null"]},
                                    "status": {"type": "string"}}}},
                   "fit": {"type": ["object", "null"]}, "C_min": {"type": ["number", "null"]},
                   "all_positive": {"type": "boolean"}, "pass": {"type": "boolean"}}})");
  return s;
}

const Json& bounds_schema() {
  static const Json s = Json::parse(R"({
    "type": "object", "required": ["command", "suites", "pass"],
    "properties": {"command": {"enum": ["bounds"]}, "pass": {"type": "boolean"},
                   "suites": {"type": "array", "items": {"type": "object", "required": ["name", "pass", "details"],
                     "properties": {"name": {"type": "string"}, "pass": {"type": "boolean"},
                                    "details": {"type": "object"}}}}}})");
  return s;
}

}  // namespace halfres::harness
