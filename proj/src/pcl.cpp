#include "beamsched/pcl.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "beamsched/csv.hpp"
#include "beamsched/parallel.hpp"

namespace beamsched {

namespace {

void require_increasing(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(what) + " grid must be strictly increasing");
}

TecState state_at(const TargetSpec& target, double level) {
  return TecState(identity(target.dim()) * level);
}

}  // namespace

ProbeReport probe_marginal_work(const TargetSpec& target, std::span<const double> states,
                                std::span<const double> thresholds, const ProbeSettings& settings) {
  require_increasing(states, "state");
  require_increasing(thresholds, "threshold");
  ProbeReport r;
  r.kind = ProbeKind::marginal_work;
  r.states.assign(states.begin(), states.end());
  r.thresholds.assign(thresholds.begin(), thresholds.end());
  const std::size_t nz = thresholds.size();
  r.rows.resize(states.size() * nz);
  parallel_for(states.size(), settings.threads, [&](std::size_t i) {
    const TecState p = state_at(target, states[i]);
    for (std::size_t j = 0; j < nz; ++j) {
      const auto m = marginal_metrics(p, Threshold{thresholds[j]}, target, settings.index);
      r.rows[i * nz + j] = {states[i], thresholds[j], m.work, std::nullopt, m.cost};
    }
  });
  for (const auto& row : r.rows) {
    const GridPoint pt{row.state, *row.threshold, *row.work};
    if (!r.min_work || pt.work < r.min_work->work) r.min_work = pt;
    if (!(pt.work > 0.0)) r.nonpositive_work.push_back(pt);
  }
  r.pass = r.nonpositive_work.empty();
  return r;
}

ProbeReport probe_index_regularity(const TargetSpec& target, std::span<const double> states,
                                   const ProbeSettings& settings) {
  require_increasing(states, "state");
  ProbeReport r;
  r.kind = ProbeKind::index_regularity;
  r.states.assign(states.begin(), states.end());
  r.rows.resize(states.size());
  parallel_for(states.size(), settings.threads, [&](std::size_t i) {
    const TecState p = state_at(target, states[i]);
    const auto m = marginal_metrics(p, Threshold{p.level()}, target, settings.index);
    r.rows[i] = {states[i], std::nullopt, m.work, m.ratio(), m.cost};
  });

  const ProbeRow* prev = nullptr;
  for (const auto& row : r.rows) {
    if (!r.min_work || *row.work < r.min_work->work) r.min_work = GridPoint{row.state, row.state, *row.work};
    if (!row.mp) {
      r.partial = true;
      r.nonpositive_work.push_back({row.state, row.state, *row.work});
      prev = nullptr;
      continue;
    }
    const double v = *row.mp;
    if (!r.min_index || v < *r.min_index) r.min_index = v;
    if (prev) {
      const double jump = v - *prev->mp;
      if (jump < -settings.tolerance) r.violations.push_back({prev->state, row.state, *prev->mp, v});
      if (!r.max_jump || std::abs(jump) > *r.max_jump) {
        r.max_jump = std::abs(jump);
        r.max_jump_per_step = std::abs(jump) / (row.state - prev->state);
      }
    }
    prev = &row;
  }
  r.pass = r.violations.empty() && !r.partial;
  return r;
}

std::vector<double> dominance_violations(const ProbeReport& lower, const ProbeReport& upper, double tolerance) {
  if (lower.states != upper.states) throw std::invalid_argument("dominance check needs identical grids");
  std::vector<double> out;
  for (std::size_t i = 0; i < lower.rows.size(); ++i) {
    const auto& lo = lower.rows[i].mp;
    const auto& hi = upper.rows[i].mp;
    if (!lo || !hi || *hi < *lo - tolerance) out.push_back(lower.states[i]);
  }
  return out;
}

std::vector<NoisePoint> probe_index_vs_noise(const TargetSpec& target_template, double state,
                                             std::span<const double> amplitudes, const ProbeSettings& settings,
                                             std::optional<std::size_t> mode) {
  if (target_template.modes.empty()) throw std::invalid_argument("target has no dynamics modes");
  const std::size_t m = mode.value_or(target_template.modes.size() - 1);
  if (m >= target_template.modes.size()) throw std::invalid_argument("mode index out of range");
  for (double q : amplitudes)
    if (!(q > 0.0)) throw std::invalid_argument("noise amplitudes must be positive");
  require_increasing(amplitudes, "amplitude");

  const DynamicsMode& base = target_template.modes[m];
  const Matrix shape = base.noise / base.amplitude;
  std::vector<NoisePoint> out(amplitudes.size());
  parallel_for(amplitudes.size(), settings.threads, [&](std::size_t i) {
    TargetSpec t = target_template;
    t.modes[m].amplitude = amplitudes[i];
    t.modes[m].noise = shape * amplitudes[i];
    const TecState p = state_at(t, state);
    out[i] = {amplitudes[i], marginal_metrics(p, Threshold{p.level()}, t, settings.index).ratio()};
  });
  return out;
}

void write_probe_csv(std::ostream& out, const ProbeReport& report) {
  CsvWriter w(out);
  w.header({"P", "z", "g", "mp_star", "f"});
  for (const auto& row : report.rows) {
    w.field(row.state).field(row.threshold).field(row.work).field(row.mp).field(row.cost);
    w.end_row();
  }
}

std::string probe_summary(const std::string& name, const ProbeReport& report) {
  std::ostringstream s;
  s << (report.pass ? "PASS " : "FAIL ") << name;
  if (report.kind == ProbeKind::marginal_work) {
    s << ": positive marginal work";
    if (report.min_work)
      s << ", min g = " << format_double(report.min_work->work) << " at (P = " << format_double(report.min_work->state)
        << ", z = " << format_double(report.min_work->threshold) << ")";
    s << ", " << report.nonpositive_work.size() << " non-positive\n";
  } else {
    s << ": index regularity, " << report.violations.size() << " monotonicity violations";
    if (report.min_index) s << ", min mp* = " << format_double(*report.min_index);
    if (report.max_jump_per_step) s << ", max jump/step = " << format_double(*report.max_jump_per_step);
    if (report.partial) s << ", partial (" << report.nonpositive_work.size() << " points with g <= 0)";
    s << '\n';
    for (const auto& v : report.violations)
      s << "  decrease " << format_double(v.mp_lo) << " -> " << format_double(v.mp_hi) << " on ["
        << format_double(v.state_lo) << ", " << format_double(v.state_hi) << "]\n";
  }
  return s.str();
}

}  // namespace beamsched
