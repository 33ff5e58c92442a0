#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "levymc/mlmc.hpp"
#include "levymc/payoff.hpp"

namespace levymc {

using json = nlohmann::ordered_json;

// Model document:
// {"dim_x": int, "sigma": [[...]], "drift": [...],
//  "measure": {"kind": "truncated_stable"|"finite_activity"|"tabulated_radial", ...},
//  "lipschitz_budget": r (optional)}
// Measure families:
//   truncated_stable: {"alpha", "intensity", "radius" (default 1),
//                      "one_sided" (default false)}
//   finite_activity:  {"atoms": [{"x": [...], "mass": r}, ...]}
//   tabulated_radial: {"radii": [...], "density": [...]}
// Any measure may carry {"g": {"coefficient": r, "exponent": r}} to register
// or override the dominating function.
LevyModel model_from_json(const json& j);
json model_to_json(const LevyModel& model);

// {"kind": "constant", "matrix": [[...]]}
// {"kind": "affine", "base": [[...]], "slopes": [[[...]], ...]}
// {"kind": "sinusoidal", "base": [[...]], "amp": [[...]], "freq": [...]}
CoefficientField coefficient_from_json(const json& j, int dim_x);

// {"kind": "terminal"|"lookback"|"asian", "weights": [...], "coordinate": int}
Payoff payoff_from_json(const json& j);

struct ScheduleSpec {
  std::string mode;  // "manual" | "case1" | "case2"
  double tau = 0.0, c1 = 1.0, c2 = 1.0;
  bool correction = true;
  std::vector<double> eps, h;
  std::vector<std::int64_t> n;
};

ScheduleSpec schedule_spec_from_json(const json& j);
LevelSchedule build_schedule(const LevyModel& model, const ScheduleSpec& spec);
LevelSchedule build_schedule(const LevyModel& model, const ScheduleSpec& spec, double tau);

struct SweepSpec {
  std::vector<double> tau_list;
  int repetitions = 1;
};

struct ReferenceSpec {
  std::string mode = "auto";  // "auto" | "closed_form" | "simulation"
  std::int64_t n = 50000;
};

struct ExperimentConfig {
  LevyModel model;
  CoefficientField coefficient;
  Eigen::VectorXd y0;
  Payoff payoff;
  ScheduleSpec schedule;
  std::uint64_t seed = 0;
  std::optional<SweepSpec> sweep;
  std::int64_t n_probe = 10000;
  ReferenceSpec reference;
};

// Strict parse: unknown keys anywhere are an error (ConfigError).
ExperimentConfig config_from_json(const json& j);

json result_to_json(const MlmcResult& result);
json skeleton_to_json(const PathSkeleton& path);
json realization_to_json(const DrivingRealization& real);

}  // namespace levymc
