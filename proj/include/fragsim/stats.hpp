#pragma once

#include <span>
#include <vector>

#include "fragsim/grid.hpp"
#include "fragsim/process.hpp"
#include "fragsim/stationary.hpp"

namespace fragsim {

/// Mass-weighted histogram: each sample carries probability weight 1/n, so the
/// cell masses estimate Pr(Y in cell) -- exactly the measure the convergence
/// statements are phrased in. Out-of-range samples are counted, never dropped.
struct EmpiricalDensity {
  LogGrid grid;
  std::vector<double> masses;
  long n_samples = 0;
  double underflow = 0.0;
  double overflow = 0.0;

  double total() const;
};

EmpiricalDensity empirical_density(std::span<const double> samples, const LogGrid& grid);

enum class DistanceMode { l1, ks };

/// Distance between two histograms on the same grid. L1 sums |mass gaps| over
/// cells plus the under/overflow gaps (boundary mass counts fully, so pushing
/// mass off-grid cannot fake convergence). KS is the max cumulative gap.
double distance(const EmpiricalDensity& a, const EmpiricalDensity& b, DistanceMode mode);

/// Distance to a stationary profile, integrated per cell on a's grid.
double distance(const EmpiricalDensity& a, const StationaryProfile& prof, DistanceMode mode);

/// |live-path fraction - expected| at time t: the fraction of trajectories with
/// positive value, 1 for alpha > 0 (no explosions), decaying for alpha < 0.
double mass_conservation(std::span<const Trajectory> trajectories, double t, double expected);

/// Rows in the solver snapshot schema (t,cell_center,mass), for cross-tool
/// comparison of empirical and deterministic densities. No header.
std::string to_snapshot_csv(const EmpiricalDensity& e, double t);

}  // namespace fragsim
