#include "fragsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fragsim {

double EmpiricalDensity::total() const {
  double s = underflow + overflow;
  for (double m : masses) s += m;
  return s;
}

EmpiricalDensity empirical_density(std::span<const double> samples, const LogGrid& grid) {
  if (samples.empty()) throw ConfigError("empirical_density: empty sample set");
  std::vector<long> counts(static_cast<std::size_t>(grid.n_cells()), 0);
  long under = 0, over = 0;
  for (double x : samples) {
    const int i = grid.cell_index(x);
    if (i < 0)
      ++under;
    else if (i >= grid.n_cells())
      ++over;
    else
      ++counts[static_cast<std::size_t>(i)];
  }
  EmpiricalDensity e{grid, {}, static_cast<long>(samples.size()), 0.0, 0.0};
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  e.masses.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    e.masses[i] = static_cast<double>(counts[i]) * inv_n;
  e.underflow = static_cast<double>(under) * inv_n;
  e.overflow = static_cast<double>(over) * inv_n;
  return e;
}

namespace {

double histogram_distance(const std::vector<double>& a, double a_under, double a_over,
                          const std::vector<double>& b, double b_under, double b_over,
                          DistanceMode mode) {
  if (mode == DistanceMode::l1) {
    double d = std::abs(a_under - b_under) + std::abs(a_over - b_over);
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
  }
  double cum_a = a_under, cum_b = b_under;
  double gap = std::abs(cum_a - cum_b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    cum_a += a[i];
    cum_b += b[i];
    gap = std::max(gap, std::abs(cum_a - cum_b));
  }
  return gap;
}

}  // namespace

double distance(const EmpiricalDensity& a, const EmpiricalDensity& b, DistanceMode mode) {
  if (!a.grid.same_geometry(b.grid))
    throw ConfigError("distance: histograms live on different grids");
  return histogram_distance(a.masses, a.underflow, a.overflow, b.masses, b.underflow,
                            b.overflow, mode);
}

double distance(const EmpiricalDensity& a, const StationaryProfile& prof, DistanceMode mode) {
  const int n = a.grid.n_cells();
  std::vector<double> target(static_cast<std::size_t>(n));
  double on_grid = 0.0;
  for (int i = 0; i < n; ++i) {
    target[static_cast<std::size_t>(i)] = prof.cell_mass(a.grid.edge(i), a.grid.edge(i + 1));
    on_grid += target[static_cast<std::size_t>(i)];
  }
  const double under = prof.cell_mass(0.0, a.grid.x_min());
  const double over = std::max(0.0, 1.0 - on_grid - under);
  return histogram_distance(a.masses, a.underflow, a.overflow, target, under, over, mode);
}

std::string to_snapshot_csv(const EmpiricalDensity& e, double t) {
  std::ostringstream out;
  char buf[40];
  for (int i = 0; i < e.grid.n_cells(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", t);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", e.grid.center(i));
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", e.masses[static_cast<std::size_t>(i)]);
    out << buf << '\n';
  }
  return out.str();
}

double mass_conservation(std::span<const Trajectory> trajectories, double t, double expected) {
  if (trajectories.empty()) return std::abs(expected);
  long live = 0;
  for (const Trajectory& tr : trajectories)
    if (tr.value_at(t) > 0.0) ++live;
  const double frac = static_cast<double>(live) / static_cast<double>(trajectories.size());
  return std::abs(frac - expected);
}

}  // namespace fragsim
