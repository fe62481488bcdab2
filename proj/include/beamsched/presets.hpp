#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "beamsched/scenario.hpp"

namespace beamsched {

enum class TargetType { reckless, cautious };
enum class Population { reckless, cautious, mixed };

std::string_view to_string(TargetType type);
std::string_view to_string(Population population);

/// u0/u1 of the two target types.
ModeProbabilities mode_probabilities(TargetType type);

/// Scalar CV/CT target: F = 1.1 / 1.3, Q = 1 / q_ct, H = 1, R = 2, h = 0.
TargetSpec scalar_target(TargetType type, double q_ct, double weight = 1.0,
                         InitialRule initial = UniformScalarInitial{0.0, 2.0});

/// L = 4 CV/CT target: turn rate 3 degrees, Ts = 1, q_cv = 1, R = 2 I, h = 0,
/// Gram initial covariance.
TargetSpec kinematic_target(TargetType type, double q_ct, double weight = 1.0);

/// Eight-target scenarios of the radar-count tables. Single-type populations
/// weight the first target 5; mixed populations put four reckless targets
/// (weight 5) before four cautious ones (weight 1). `graded` selects
/// q_ct = 2..9 (single type) or 2,3,4,5,2,3,4,5 (mixed); otherwise q_ct = 2.
ScenarioSpec radar_table_scenario(Population population, bool graded, int radars, bool kinematic = false);

/// K = N/4, d = 1, P0 = 0.01, q_ct = 2..N+1 (per type half for mixed).
ScenarioSpec near_optimality_scenario(Population population, int targets);

/// K = N/4, half reckless with d = 5, half cautious with d = 1, q_ct = 4.
ScenarioSpec constant_noise_scenario(int targets, bool kinematic);

/// K = N/4, mixed L = 4 population, q_ct = 2..N/2+1 per type, d = 1.
ScenarioSpec graded_kinematic_scenario(int targets);

std::span<const std::string_view> preset_names();
bool is_preset(std::string_view name);

/// N values swept by the size presets.
inline constexpr int kPresetSizes[] = {4, 8, 12, 16};

struct ReproduceOptions {
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
  int replications = 100;
  int threads = 1;
  std::vector<int> sizes{std::begin(kPresetSizes), std::end(kPresetSizes)};
  bool svg = true;
};

struct ReproduceReport {
  std::string preset;
  nlohmann::json summary;
  std::vector<std::filesystem::path> artifacts;
  bool probes_pass = true;  // probe presets only
};

/// Builds the preset scenarios, runs them and writes CSV, plot data, an
/// optional SVG and summary.json into out_dir.
ReproduceReport reproduce(std::string_view preset, const ReproduceOptions& options);

}  // namespace beamsched
