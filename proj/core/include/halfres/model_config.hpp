#pragma once

#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "halfres/model.hpp"

namespace halfres {

/// Serializable description of a model.
///
/// Text form (YAML mapping):
///
///     name: gauss_barrier        # free | square_well | gauss_barrier | ads_like
///     params: [2.0, 2.0, 0.5]
///     gamma: 1.0                 # optional, default 1
///     delta: 1.0                 # optional, default 1
///     x_box: 0.0                 # optional, model default
///     decay_const: 1417.3        # optional, model default
struct ModelSpec {
  std::string name;
  std::vector<double> params;
  std::optional<double> gamma;
  std::optional<double> delta;
  std::optional<double> x_box;
  std::optional<double> decay_const;
};

/// Builds the model; gamma/delta/x_box overrides do not recompute decay_const.
PotentialModel build_model(const ModelSpec& spec);

ModelSpec model_spec_from_yaml(const YAML::Node& node);
YAML::Node model_spec_to_yaml(const ModelSpec& spec);

ModelSpec parse_model_spec(const std::string& text);
std::string format_model_spec(const ModelSpec& spec);

/// Spec describing an existing model (round-trips through build_model).
ModelSpec spec_of(const PotentialModel& model);

}  // namespace halfres
