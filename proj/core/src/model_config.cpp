#include "halfres/model_config.hpp"

#include <sstream>

#include "halfres/errors.hpp"

namespace halfres {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : -1; }

double read_double(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError("field '" + field + "' must be a number (line " +
                          std::to_string(line_of(node)) + ")",
                      field, line_of(node));
  }
}

std::optional<double> optional_double(const YAML::Node& parent, const std::string& field) {
  const auto node = parent[field];
  if (!node) return std::nullopt;
  return read_double(node, field);
}

}  // namespace

PotentialModel build_model(const ModelSpec& spec) {
  PotentialModel m = builtin_model(spec.name, spec.params);
  if (spec.gamma) {
    if (!(*spec.gamma > 0)) throw ConfigError("gamma must be > 0", "gamma");
    m.gamma = *spec.gamma;
  }
  if (spec.delta) {
    if (!(*spec.delta > 0)) throw ConfigError("delta must be > 0", "delta");
    m.delta = *spec.delta;
  }
  if (spec.x_box) {
    if (!(*spec.x_box >= 0)) throw ConfigError("x_box must be >= 0", "x_box");
    m.x_box = *spec.x_box;
  }
  if (spec.decay_const) {
    if (!(*spec.decay_const > 0)) throw ConfigError("decay_const must be > 0", "decay_const");
    m.decay_const = *spec.decay_const;
  }
  return m;
}

ModelSpec model_spec_from_yaml(const YAML::Node& node) {
  if (!node || !node.IsMap()) throw ConfigError("model: expected a mapping", "model", line_of(node));
  ModelSpec spec;
  const auto name = node["name"];
  if (!name) throw ConfigError("model: missing field 'name'", "name", line_of(node));
  spec.name = name.as<std::string>();
  if (const auto p = node["params"]) {
    if (!p.IsSequence())
      throw ConfigError("field 'params' must be a list (line " + std::to_string(line_of(p)) + ")",
                        "params", line_of(p));
    for (const auto& v : p) spec.params.push_back(read_double(v, "params"));
  }
  spec.gamma = optional_double(node, "gamma");
  spec.delta = optional_double(node, "delta");
  spec.x_box = optional_double(node, "x_box");
  spec.decay_const = optional_double(node, "decay_const");
  return spec;
}

YAML::Node model_spec_to_yaml(const ModelSpec& spec) {
  YAML::Node node;
  node["name"] = spec.name;
  YAML::Node params(YAML::NodeType::Sequence);
  for (double p : spec.params) params.push_back(p);
  node["params"] = params;
  if (spec.gamma) node["gamma"] = *spec.gamma;
  if (spec.delta) node["delta"] = *spec.delta;
  if (spec.x_box) node["x_box"] = *spec.x_box;
  if (spec.decay_const) node["decay_const"] = *spec.decay_const;
  return node;
}

ModelSpec parse_model_spec(const std::string& text) {
  YAML::Node node;
  try {
    node = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("model config: ") + e.what(), "", e.mark.line + 1);
  }
  return model_spec_from_yaml(node);
}

std::string format_model_spec(const ModelSpec& spec) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << model_spec_to_yaml(spec);
  return std::string(out.c_str()) + "\n";
}

ModelSpec spec_of(const PotentialModel& model) {
  ModelSpec spec;
  spec.name = model.label;
  spec.params = model.params;
  spec.gamma = model.gamma;
  spec.delta = model.delta;
  spec.x_box = model.x_box;
  spec.decay_const = model.decay_const;
  return spec;
}

}  // namespace halfres
