#pragma once

#include <string>
#include <variant>
#include <vector>

#include "beamsched/error.hpp"
#include "beamsched/types.hpp"

namespace beamsched {

/// One linear dynamics model of a target: x' = F x + w, w ~ (0, Q), Q = q * Q_base.
struct DynamicsMode {
  std::string label;
  Matrix transition;  // F
  Matrix noise;       // Q, already scaled by amplitude
  double amplitude = 1.0;  // q

  static DynamicsMode scalar(std::string label, double f, double q) {
    return {std::move(label), scalar_matrix(f), scalar_matrix(q), q};
  }
};

/// Mode distributions applied after a passive (u0) or active (u1) slot.
struct ModeProbabilities {
  std::vector<double> passive;
  std::vector<double> active;

  const std::vector<double>& for_action(int action) const { return action ? active : passive; }
};

struct MeasurementModel {
  Matrix H;
  Matrix R;
};

/// Initial TEC: a fixed matrix, a uniform scalar draw on (lo, hi), or a Gram
/// draw R0' R0 with R0 entries i.i.d. U(0, 1).
struct FixedInitial {
  Matrix P;
};
struct UniformScalarInitial {
  double lo = 0.0;
  double hi = 2.0;
};
struct GramUniformInitial {
  int dim = 4;
};
using InitialRule = std::variant<FixedInitial, UniformScalarInitial, GramUniformInitial>;

struct TargetSpec {
  std::vector<DynamicsMode> modes;  // ordered by increasing amplitude
  ModeProbabilities probs;
  MeasurementModel meas;
  double weight = 1.0;            // d
  double measurement_cost = 0.0;  // h
  InitialRule initial = UniformScalarInitial{};
  std::string tag;  // "reckless", "cautious" or free-form

  int dim() const { return modes.empty() ? 0 : static_cast<int>(modes.front().transition.rows()); }
  bool is_scalar() const { return dim() == 1; }
};

struct ScenarioSpec {
  std::string id = "scenario";
  std::vector<TargetSpec> targets;
  int radars = 1;          // K
  double discount = 0.9;   // beta
  int horizon = 100;       // T, slots per episode
  int truncation = 100;    // tau, slots used by index metrics
  // Skips the u0[1] > u0[m], u1[1] < u1[m] ordering checks.
  bool relax_probability_order = false;

  int target_count() const { return static_cast<int>(targets.size()); }
  bool all_scalar() const;
};

/// I2 (x) [[1, Ts], [0, 1]], state order [x, vx, y, vy].
Matrix cv_matrix(double sample_time);

/// Coordinated-turn transition for turn rate `omega` in rad/s. Throws
/// ConfigError for omega == 0; use cv_matrix for that limit.
Matrix ct_matrix(double omega, double sample_time);

/// q * I2 (x) [[Ts^3/3, Ts^2/2], [Ts^2/2, Ts]].
Matrix process_noise(double amplitude, double sample_time);

/// [[1,0,0,0],[0,0,1,0]]: position-only measurement of the 4-state model.
Matrix position_measurement();

inline constexpr double kProbabilitySumTolerance = 1e-9;

/// Every invariant violation, in field order; empty when the spec is valid.
std::vector<Violation> find_violations(const ScenarioSpec& spec);

/// Returns the spec with probability vectors renormalized, or throws
/// ConfigError carrying the complete violation list.
ScenarioSpec validate(ScenarioSpec spec);

}  // namespace beamsched
