#include "halfres/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "halfres/errors.hpp"

namespace halfres::harness {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : -1; }

[[noreturn]] void fail(const std::string& field, const YAML::Node& n, const std::string& msg) {
  const int line = line_of(n);
  throw ConfigError("field '" + field + "': " + msg + (line > 0 ? " (line " + std::to_string(line) + ")" : ""), field,
                    line);
}

class Section {
 public:
  Section(YAML::Node node, std::string prefix, std::set<std::string> allowed)
      : node_(std::move(node)), prefix_(std::move(prefix)) {
    if (!node_) return;
    if (!node_.IsMap()) fail(prefix_, node_, "expected a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(path(key), kv.first, "unknown key");
    }
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  void num(const std::string& key, double& out) const {
    if (!node_ || !node_[key]) return;
    out = as_double(node_[key], path(key));
  }
  void num(const std::string& key, std::optional<double>& out) const {
    if (!node_ || !node_[key]) return;
    out = as_double(node_[key], path(key));
  }
  void count(const std::string& key, std::size_t& out) const {
    if (!node_ || !node_[key]) return;
    const double v = as_double(node_[key], path(key));
    if (!(v >= 0.0) || v != std::floor(v)) fail(path(key), node_[key], "must be a nonnegative integer");
    out = static_cast<std::size_t>(v);
  }
  void flag(const std::string& key, bool& out) const {
    if (!node_ || !node_[key]) return;
    try {
      out = node_[key].as<bool>();
    } catch (const YAML::Exception&) {
      fail(path(key), node_[key], "must be true or false");
    }
  }
  void str(const std::string& key, std::string& out) const {
    if (!node_ || !node_[key]) return;
    if (!node_[key].IsScalar()) fail(path(key), node_[key], "must be a string");
    out = node_[key].as<std::string>();
  }
  void num_list(const std::string& key, std::vector<double>& out) const {
    if (!node_ || !node_[key]) return;
    const auto n = node_[key];
    if (!n.IsSequence()) fail(path(key), n, "must be a list");
    out.clear();
    for (const auto& v : n) out.push_back(as_double(v, path(key)));
  }
  void str_list(const std::string& key, std::vector<std::string>& out) const {
    if (!node_ || !node_[key]) return;
    const auto n = node_[key];
    if (!n.IsSequence()) fail(path(key), n, "must be a list");
    out.clear();
    for (const auto& v : n) out.push_back(v.as<std::string>());
  }
  YAML::Node child(const std::string& key) const { return node_ ? node_[key] : YAML::Node(); }

 private:
  static double as_double(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) fail(field, n, "must be a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(field, n, "must be a number");
    }
  }

  YAML::Node node_;
  std::string prefix_;
};

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("YAML syntax error: " + e.msg + " (line " + std::to_string(e.mark.line + 1) + ")", "",
                      e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("config: expected a mapping at top level");
  ExperimentConfig cfg;
  const Section top(root, "",
                    {"name", "model", "gamma", "window", "h_list", "ell_list", "S", "theorem", "quasimode", "scan",
                     "norm", "bounds", "tolerances", "output_dir"});
  top.str("name", cfg.name);
  top.str("output_dir", cfg.output_dir);
  if (!root["model"]) throw ConfigError("config: missing field 'model'", "model");
  {
    const Section m(root["model"], "model", {"name", "params", "gamma", "delta", "x_box", "decay_const"});
  }
  cfg.model = model_spec_from_yaml(root["model"]);
  std::optional<double> gamma;
  top.num("gamma", gamma);
  if (gamma) cfg.model.gamma = gamma;
  top.num_list("h_list", cfg.h_list);
  top.num_list("ell_list", cfg.ell_list);

  const Section w(top.child("window"), "window", {"a0", "b0", "eps0", "eps", "im_top", "exclusion_radius"});
  w.num("a0", cfg.window.a0);
  w.num("b0", cfg.window.b0);
  w.num("eps0", cfg.window.eps0);
  w.num("eps", cfg.window.eps);
  w.num("im_top", cfg.window.im_top);
  w.num("exclusion_radius", cfg.window.exclusion_radius);

  const Section s(top.child("S"), "S", {"kind", "value", "floor"});
  s.str("kind", cfg.S.kind);
  s.num("value", cfg.S.value);
  s.num("floor", cfg.S.floor);
  if (cfg.S.kind != "accuracy" && cfg.S.kind != "fixed")
    fail("S.kind", top.child("S")["kind"], "must be 'accuracy' or 'fixed'");

  const Section t(top.child("theorem"), "theorem", {"N", "M", "B", "C0", "C", "A_cap"});
  t.num("N", cfg.theorem.N);
  t.num("M", cfg.theorem.M);
  t.num("B", cfg.theorem.B);
  t.num("C0", cfg.theorem.C0);
  t.num("C", cfg.theorem.C);
  t.num("A_cap", cfg.theorem.A_cap);

  const Section q(top.child("quasimode"), "quasimode",
                  {"L", "points_per_wavelength", "x_cut", "width", "tail_threshold", "eigen_count", "target_energy"});
  q.num("L", cfg.quasimode.L);
  q.num("points_per_wavelength", cfg.quasimode.points_per_wavelength);
  q.num("x_cut", cfg.quasimode.x_cut);
  q.num("width", cfg.quasimode.width);
  q.num("tail_threshold", cfg.quasimode.tail_threshold);
  q.count("eigen_count", cfg.quasimode.eigen_count);
  q.num("target_energy", cfg.quasimode.target_energy);

  const Section sc(top.child("scan"), "scan",
                   {"half_width", "depth", "im_upper", "boundary_tol", "dedup_tol", "zero_tol", "extended_polish"});
  sc.num("half_width", cfg.scan.half_width);
  sc.num("depth", cfg.scan.depth);
  sc.num("im_upper", cfg.scan.im_upper);
  sc.num("boundary_tol", cfg.scan.boundary_tol);
  sc.num("dedup_tol", cfg.scan.dedup_tol);
  sc.num("zero_tol", cfg.scan.zero_tol);
  sc.flag("extended_polish", cfg.scan.extended_polish);

  const Section n(top.child("norm"), "norm", {"nx", "ny", "rtol", "points_per_wavelength", "taper"});
  n.count("nx", cfg.norm.nx);
  n.count("ny", cfg.norm.ny);
  n.num("rtol", cfg.norm.rtol);
  n.num("points_per_wavelength", cfg.norm.points_per_wavelength);
  n.num("taper", cfg.norm.taper);

  const Section b(top.child("bounds"), "bounds",
                  {"suites", "reflection_samples", "sigma_samples", "max_principle_functions", "jensen_functions",
                   "blaschke_functions", "blaschke_points", "selfadjoint_samples", "exclusion_S"});
  b.str_list("suites", cfg.bounds.suites);
  b.count("reflection_samples", cfg.bounds.reflection_samples);
  b.count("sigma_samples", cfg.bounds.sigma_samples);
  b.count("max_principle_functions", cfg.bounds.max_principle_functions);
  b.count("jensen_functions", cfg.bounds.jensen_functions);
  b.count("blaschke_functions", cfg.bounds.blaschke_functions);
  b.count("blaschke_points", cfg.bounds.blaschke_points);
  b.count("selfadjoint_samples", cfg.bounds.selfadjoint_samples);
  b.num("exclusion_S", cfg.bounds.exclusion_S);

  const Section tol(top.child("tolerances"), "tolerances", {"ode_rtol", "ode_atol", "check_rtol", "check_atol"});
  tol.num("ode_rtol", cfg.tolerances.ode_rtol);
  tol.num("ode_atol", cfg.tolerances.ode_atol);
  tol.num("check_rtol", cfg.tolerances.check_rtol);
  tol.num("check_atol", cfg.tolerances.check_atol);

  check_config(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

void check_config(const ExperimentConfig& cfg) {
  for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
    if (!(cfg.h_list[i] > 0.0 && cfg.h_list[i] <= 1.0))
      throw ConfigError("field 'h_list': entries must lie in (0, 1]", "h_list");
    if (i > 0 && !(cfg.h_list[i] < cfg.h_list[i - 1]))
      throw ConfigError("field 'h_list': must be strictly decreasing", "h_list");
  }
  for (std::size_t i = 0; i < cfg.ell_list.size(); ++i) {
    if (!(cfg.ell_list[i] > 0.0)) throw ConfigError("field 'ell_list': entries must be > 0", "ell_list");
    if (i > 0 && !(cfg.ell_list[i] > cfg.ell_list[i - 1]))
      throw ConfigError("field 'ell_list': must be strictly increasing", "ell_list");
  }
  const auto& w = cfg.window;
  if (!(w.a0 + w.eps < w.b0 - w.eps)) throw ConfigError("field 'window': a0 + eps must be below b0 - eps", "window");
  if (!(w.a0 + w.eps > 0.0)) throw ConfigError("field 'window.a0': window must lie in Re > 0", "window.a0");
  if (!(w.eps0 > 0.0) || !(w.eps >= 0.0))
    throw ConfigError("field 'window.eps0': need eps0 > 0 and eps >= 0 so the window stays above -gamma h",
                      "window.eps0");
  const double gamma = cfg.model.gamma.value_or(1.0);
  if (!(w.eps0 + w.eps < gamma))
    throw ConfigError("field 'window.eps0': eps0 + eps must be below gamma", "window.eps0");
  if (!(cfg.S.floor > 0.0) || !(cfg.S.value > 0.0 && cfg.S.value < 1.0))
    throw ConfigError("field 'S': need floor > 0 and 0 < value < 1", "S");
  if (!(cfg.theorem.C > 0.0) || !(cfg.theorem.M >= 1.0) || !(cfg.theorem.B > 0.0) || !(cfg.theorem.C0 > 0.0))
    throw ConfigError("field 'theorem': need C, B, C0 > 0 and M >= 1", "theorem");
  const auto& q = cfg.quasimode;
  if (!(q.L > 0.0) || !(q.x_cut > 0.0) || !(q.x_cut < q.L))
    throw ConfigError("field 'quasimode': need 0 < x_cut < L", "quasimode");
  if (q.width && !(*q.width > 0.0 && q.x_cut + *q.width <= q.L + 1e-12))
    throw ConfigError("field 'quasimode.width': cutoff must end inside [0, L]", "quasimode.width");
  if (!(cfg.tolerances.ode_rtol > 0.0 && cfg.tolerances.ode_atol > 0.0))
    throw ConfigError("field 'tolerances': ODE tolerances must be > 0", "tolerances");
}

void require_h_list(const ExperimentConfig& cfg) {
  if (cfg.h_list.empty()) throw ConfigError("config: missing field 'h_list'", "h_list");
}

void require_ell_list(const ExperimentConfig& cfg, std::size_t min_size) {
  if (cfg.ell_list.empty()) throw ConfigError("config: missing field 'ell_list'", "ell_list");
  if (cfg.ell_list.size() < min_size)
    throw ConfigError("field 'ell_list': needs at least " + std::to_string(min_size) + " entries", "ell_list");
}

}  // namespace halfres::harness
