#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halfres/model_config.hpp"

namespace halfres::harness {

/// Frequency window (a0 + eps, b0 - eps) + i((-gamma + eps0 + eps) h, im_top).
struct WindowSpec {
  double a0 = 0.5;
  double b0 = 1.5;
  double eps0 = 0.1;
  double eps = 0.0;
  double im_top = 0.05;
  double exclusion_radius = 0.01;
};

/// S(h) = max(R(h) h^-2, floor) for "accuracy", the constant `value` for "fixed".
struct SRule {
  std::string kind = "accuracy";
  double value = 0.05;
  double floor = 1e-10;
};

struct TheoremParams {
  double N = 0.0;
  double M = 1.0;
  double B = 1.0;
  double C0 = 1.0;
  /// Gate constant in R(h) <= h^{p+N+1} / (C log(1/h)).
  double C = 1.0;
  double A_cap = 10.0;
};

struct QuasimodeParams {
  double L = 2.4;
  double points_per_wavelength = 480.0;
  double x_cut = 2.1;
  std::optional<double> width;
  double tail_threshold = 1e-2;
  std::size_t eigen_count = 12;
  /// Keep only the eigenvalue nearest this energy; otherwise every eigenvalue with sqrt in the window.
  std::optional<double> target_energy;
};

struct ScanParams {
  /// Box around each quasimode frequency: Re +- half_width, Im in [-depth, im_upper].
  double half_width = 0.02;
  double depth = 0.01;
  double im_upper = 0.01;
  double boundary_tol = 1e-9;
  double dedup_tol = 1e-10;
  double zero_tol = 1e-12;
  /// Refine simple resonances with the long double determinant.
  bool extended_polish = false;
};

/// Sample grid for weighted resolvent norms.
struct NormParams {
  std::size_t nx = 5;
  std::size_t ny = 3;
  double rtol = 1e-4;
  double points_per_wavelength = 12.0;
  /// Weight is linear beyond x_box + taper.
  double taper = 1.0;
};

struct BoundsParams {
  std::vector<std::string> suites{"reflection", "m_decay", "r0_slope", "apriori", "max_principle", "jensen",
                                  "blaschke", "selfadjoint"};
  std::size_t reflection_samples = 1000;
  std::size_t sigma_samples = 7;
  std::size_t max_principle_functions = 200;
  std::size_t jensen_functions = 100;
  std::size_t blaschke_functions = 20;
  std::size_t blaschke_points = 500;
  std::size_t selfadjoint_samples = 50;
  double exclusion_S = 0.05;
};

struct Tolerances {
  double ode_rtol = 1e-12;
  double ode_atol = 1e-14;
  /// Secondary tolerances used to flag unresolved widths in the l-sweep.
  double check_rtol = 1e-13;
  double check_atol = 1e-16;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelSpec model;
  WindowSpec window;
  std::vector<double> h_list;
  std::vector<double> ell_list;
  SRule S;
  TheoremParams theorem;
  QuasimodeParams quasimode;
  ScanParams scan;
  NormParams norm;
  BoundsParams bounds;
  Tolerances tolerances;
  std::string output_dir = "out";
};

/// Parses the YAML text. Unknown keys, wrong types and missing required fields raise ConfigError
/// with the field path and line.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Cross-field invariants: h_list strictly decreasing, window nonempty and inside the continuation
/// strip for the largest h. Throws ConfigError.
void check_config(const ExperimentConfig& cfg);

/// Throws ConfigError naming `field` when the list is empty.
void require_h_list(const ExperimentConfig& cfg);
void require_ell_list(const ExperimentConfig& cfg, std::size_t min_size);

}  // namespace halfres::harness
