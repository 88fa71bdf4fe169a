#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "halfres/free_resolvent.hpp"
#include "halfres/harness/config.hpp"
#include "halfres/harness/io.hpp"
#include "halfres/quasimodes.hpp"
#include "halfres/resolvent_norm.hpp"
#include "halfres/resonance_search.hpp"

namespace halfres::harness {

struct RunContext {
  std::size_t threads = 1;
  /// Seed of the property-suite function families.
  std::uint64_t seed = 20240601;
  /// Experiment directory; nothing is written when empty.
  std::optional<std::filesystem::path> out;
};

/// status: 0 pass, 1 suite failure.
struct CommandResult {
  int status = 0;
  Json report;
};

ContinuationOptions continuation_options(const ExperimentConfig& cfg, bool check_tolerances = false);
ScanOptions scan_options(const ExperimentConfig& cfg, bool check_tolerances = false);

/// Quasimode cluster at one h: eigenvalues nearest target_energy, or all with sqrt in the window.
struct ClusterResult {
  std::vector<Quasimode> members;
  std::vector<double> energies;
  /// Largest residual of the members.
  double R = 0.0;
  /// Empty when the cutoff gate holds for every member.
  std::string unmet;
};
ClusterResult quasimode_cluster(const PotentialModel& model, const ExperimentConfig& cfg, double h);

/// S(h) from the configured rule.
double exclusion_radius(const ExperimentConfig& cfg, double R, double h);

// validate

struct ValidateReport {
  bool pass = true;
  DecayReport decay;
  std::vector<std::string> failures;
  Json details;
};
ValidateReport validate_experiment(const ExperimentConfig& cfg);

// theorem-check

struct TheoremRecord {
  double h = 0.0;
  std::vector<double> lambdas;
  double R = 0.0;
  std::size_t m = 0;
  double S = 0.0;
  double c = 0.0;
  double gate = 0.0;
  bool gate_met = false;
  Rect strip{};
  Rect scanned{};
  std::vector<Resonance> resonances;
  int total_winding = 0;
  int in_strip = 0;
  int in_enlarged_strip = 0;
  std::optional<Resonance> nearest;
  double nearest_distance = 0.0;
  /// "pass", "hypotheses unmet", "conclusion violated" or "error".
  std::string status;
  std::string detail;
  NormScan norms;
};

struct TheoremReport {
  std::string model;
  std::vector<TheoremRecord> records;
  AprioriReport apriori;
  /// log(-Im r(h)) against 1/h over records with a nearest resonance below the axis.
  std::optional<SlopeFit> decay_fit;
  bool distance_decreasing = false;
  bool all_pass = false;
  bool violated = false;
};
TheoremReport theorem_check(const PotentialModel& model, const ExperimentConfig& cfg, std::size_t threads);

// ads-sweep

struct AdsRecord {
  double ell = 0.0;
  double h = 0.0;
  double energy = 0.0;
  double lambda0 = 0.0;
  std::optional<double> R;
  std::optional<Resonance> nearest;
  /// -Im sigma = -Im lambda / h.
  double width = 0.0;
  double width_check = 0.0;
  bool resolved = false;
  std::string status;
  std::string detail;
};

struct AdsReport {
  std::vector<AdsRecord> records;
  std::optional<SlopeFit> fit;
  std::optional<SlopeFit> resolved_fit;
  /// Smallest C with w_l < C e^{-l/C} for every record.
  std::optional<double> C_min;
  bool all_positive = false;
  bool pass = false;
};
AdsReport ads_sweep(const ExperimentConfig& cfg, std::size_t threads);

/// Smallest C > 0 with log w <= log C - l / C for every (l, w).
std::optional<double> smallest_decay_constant(const std::vector<double>& ell, const std::vector<double>& width);

// bounds

struct SuiteResult {
  std::string name;
  bool pass = false;
  Json details;
};

struct BoundsReport {
  std::vector<SuiteResult> suites;
  bool pass = false;
};
BoundsReport bounds_suite(const PotentialModel& model, const ExperimentConfig& cfg, const RunContext& ctx);

SuiteResult reflection_suite(const ExperimentConfig& cfg, std::uint64_t seed,
                             const LineKernel& kernel = r0_kernel_line);
SuiteResult m_decay_suite(const ExperimentConfig& cfg);
SuiteResult r0_slope_suite(const ExperimentConfig& cfg);
SuiteResult apriori_suite(const PotentialModel& model, const ExperimentConfig& cfg, std::size_t threads);
SuiteResult max_principle_suite(const ExperimentConfig& cfg, std::uint64_t seed);
SuiteResult jensen_suite(const ExperimentConfig& cfg, std::uint64_t seed);
SuiteResult blaschke_suite(const ExperimentConfig& cfg, std::uint64_t seed);
SuiteResult selfadjoint_suite(const PotentialModel& model, const ExperimentConfig& cfg, std::uint64_t seed,
                              std::size_t threads);

/// Roots of a polynomial given by ascending coefficients (companion matrix eigenvalues).
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coefficients);

// command entry points; each writes its files and manifest when ctx.out is set

CommandResult run_validate(const ExperimentConfig& cfg, const RunContext& ctx);
CommandResult run_scan(const ExperimentConfig& cfg, const RunContext& ctx);
CommandResult run_quasimode(const ExperimentConfig& cfg, const RunContext& ctx);
CommandResult run_theorem_check(const ExperimentConfig& cfg, const RunContext& ctx);
CommandResult run_ads_sweep(const ExperimentConfig& cfg, const RunContext& ctx);
CommandResult run_bounds(const ExperimentConfig& cfg, const RunContext& ctx);

/// JSON schemas of the report files.
const Json& validate_schema();
const Json& scan_schema();
const Json& quasimode_schema();
const Json& theorem_schema();
const Json& ads_schema();
const Json& bounds_schema();

Json to_json(const Resonance& r);
Json to_json(const Rect& r);
Json to_json(const SlopeFit& f);

}  // namespace halfres::harness
