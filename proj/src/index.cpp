#include "beamsched/index.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "beamsched/log.hpp"

namespace beamsched {

int threshold_active(const TecState& p, Threshold z) { return p.level() > z.z ? 1 : 0; }

ThresholdMetrics metrics(const TecState& p, Threshold z, const TargetSpec& target,
                         IndexSettings settings, std::optional<int> first_action) {
  ThresholdMetrics out;
  out.horizon = settings.truncation;
  TecState state = p;
  double disc = 1.0;
  for (int t = 0; t < settings.truncation; ++t) {
    const int a = (t == 0 && first_action) ? *first_action : threshold_active(state, z);
    out.cost += disc * cost(state, a, target);
    out.work += disc * a;
    if (t + 1 < settings.truncation) state = phi(state, a, target);
    disc *= settings.discount;
  }
  return out;
}

MarginalMetrics marginal_metrics(const TecState& p, Threshold z, const TargetSpec& target,
                                 IndexSettings settings) {
  const auto passive_first = metrics(p, z, target, settings, 0);
  const auto active_first = metrics(p, z, target, settings, 1);
  return {passive_first.cost - active_first.cost, active_first.work - passive_first.work};
}

std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::mp: return "mp";
    case IndexKind::tec: return "tec";
    case IndexKind::myopic: return "myopic";
  }
  return "?";
}

IndexValue mp_index(const TecState& p, const TargetSpec& target, IndexSettings settings) {
  const Threshold self{p.level()};
  const auto m = marginal_metrics(p, self, target, settings);
  if (!m.work_positive()) throw IndexAnomaly(p.level(), self.z, m.work);
  return {m.cost / m.work, IndexKind::mp};
}

IndexValue tec_index(const TecState& p, const TargetSpec& target) {
  return {target.weight * p.level(), IndexKind::tec};
}

IndexValue myopic_index(const TecState& p, const TargetSpec& target) {
  const double diff = phi_passive(p, target).trace() - phi_active(p, target).trace();
  return {target.weight * diff / static_cast<double>(p.dim()), IndexKind::myopic};
}

namespace {

void require_increasing(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("index grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("index grid must be strictly increasing");
}

TecState isotropic(double level, int dim) { return TecState(level * identity(dim)); }

std::atomic<bool> g_clamp_warned{false};

}  // namespace

std::vector<IndexRow> tabulate_indices(const TargetSpec& target, IndexSettings settings,
                                       std::span<const double> grid) {
  require_increasing(grid);
  std::vector<IndexRow> rows;
  rows.reserve(grid.size());
  for (double x : grid) {
    const TecState p = isotropic(x, target.dim());
    IndexRow row;
    row.level = x;
    const auto m = marginal_metrics(p, Threshold{p.level()}, target, settings);
    row.marginal_work = m.work;
    row.mp = m.ratio();
    row.tec = tec_index(p, target).value;
    row.myopic = myopic_index(p, target).value;
    rows.push_back(row);
  }
  return rows;
}

IndexTable::IndexTable(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require_increasing(grid_);
  if (grid_.size() != values_.size()) throw std::invalid_argument("index table size mismatch");
}

double IndexTable::operator()(double level) const {
  if (grid_.empty()) throw std::logic_error("lookup in an empty index table");
  if (level <= grid_.front() || level >= grid_.back()) {
    const bool outside = level < grid_.front() || level > grid_.back();
    if (outside && !g_clamp_warned.exchange(true))
      log::warn("index table lookup outside the tabulated grid; clamping to end values");
    return level <= grid_.front() ? values_.front() : values_.back();
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), level);
  const auto hi = static_cast<std::size_t>(it - grid_.begin());
  const auto lo = hi - 1;
  if (level == grid_[lo]) return values_[lo];
  const double w = (level - grid_[lo]) / (grid_[hi] - grid_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

IndexTable index_table(const TargetSpec& target, IndexSettings settings, std::span<const double> grid) {
  require_increasing(grid);
  std::vector<double> values;
  values.reserve(grid.size());
  for (double x : grid) values.push_back(mp_index(isotropic(x, target.dim()), target, settings).value);
  return IndexTable(std::vector<double>(grid.begin(), grid.end()), std::move(values));
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("grid needs step > 0 and hi >= lo");
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-6));
  g.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

}  // namespace beamsched
