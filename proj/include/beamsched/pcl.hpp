#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamsched/index.hpp"

namespace beamsched {

struct ProbeSettings {
  IndexSettings index;
  double tolerance = 1e-9;  // allowed decrease between adjacent grid points
  int threads = 1;
};

/// One evaluated grid point. Marginal-work probes fill threshold and work;
/// regularity probes fill work (at the self-threshold) and mp.
struct ProbeRow {
  double state = 0.0;
  std::optional<double> threshold;
  std::optional<double> work;
  std::optional<double> mp;
  std::optional<double> cost;  // marginal cost f
};

struct GridPoint {
  double state = 0.0;
  double threshold = 0.0;
  double work = 0.0;
};

/// Adjacent grid points where the index decreases by more than the tolerance.
struct MonotonicityViolation {
  double state_lo = 0.0;
  double state_hi = 0.0;
  double mp_lo = 0.0;
  double mp_hi = 0.0;
};

enum class ProbeKind { marginal_work, index_regularity };

struct ProbeReport {
  ProbeKind kind = ProbeKind::marginal_work;
  std::vector<double> states;
  std::vector<double> thresholds;  // empty for regularity probes
  std::vector<ProbeRow> rows;

  std::optional<GridPoint> min_work;
  std::vector<GridPoint> nonpositive_work;  // g <= 0 findings

  std::vector<MonotonicityViolation> violations;
  std::optional<double> max_jump;            // largest |mp(P_i+1) - mp(P_i)|
  std::optional<double> max_jump_per_step;   // same jump divided by the grid spacing
  std::optional<double> min_index;
  bool partial = false;  // some self-threshold g <= 0, so mp is missing there

  bool pass = false;
};

/// g(P, z) on the full product grid. Non-positive g is a finding, never an
/// error.
ProbeReport probe_marginal_work(const TargetSpec& target, std::span<const double> states,
                                std::span<const double> thresholds, const ProbeSettings& settings = {});

/// mp*(P) on the grid; monotonicity, adjacent jumps and the minimum value.
ProbeReport probe_index_regularity(const TargetSpec& target, std::span<const double> states,
                                   const ProbeSettings& settings = {});

/// Grid points where `upper` falls below `lower` by more than the tolerance.
/// Both reports must come from the same grid.
std::vector<double> dominance_violations(const ProbeReport& lower, const ProbeReport& upper, double tolerance);

struct NoisePoint {
  double amplitude = 0.0;
  std::optional<double> mp;
};

/// mp*(P_fixed) as the amplitude of mode `mode` (default: the last one) is
/// swept, keeping that mode's noise shape.
std::vector<NoisePoint> probe_index_vs_noise(const TargetSpec& target_template, double state,
                                             std::span<const double> amplitudes, const ProbeSettings& settings = {},
                                             std::optional<std::size_t> mode = std::nullopt);

/// Columns P, z, g, mp_star, f; empty fields where a probe does not apply.
void write_probe_csv(std::ostream& out, const ProbeReport& report);

/// Human-readable PASS/FAIL block for one probe.
std::string probe_summary(const std::string& name, const ProbeReport& report);

}  // namespace beamsched
