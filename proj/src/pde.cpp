#include "fragsim/pde.hpp"

#include <cmath>
#include <sstream>

namespace fragsim {

double PdeState::total_mass() const {
  double s = leaked_low + leaked_high;
  for (double w : masses) s += w;
  return s;
}

PdeState point_mass_state(const LogGrid& grid, double x0) {
  const int i = grid.cell_index(x0);
  if (i < 0 || i >= grid.n_cells())
    throw ConfigError("point_mass_state: x0 outside the grid");
  PdeState s{grid, std::vector<double>(static_cast<std::size_t>(grid.n_cells()), 0.0)};
  s.masses[static_cast<std::size_t>(i)] = 1.0;
  return s;
}

PdeState profile_state(const LogGrid& grid, const StationaryProfile& prof) {
  PdeState s{grid, std::vector<double>(static_cast<std::size_t>(grid.n_cells()), 0.0)};
  for (int i = 0; i < grid.n_cells(); ++i)
    s.masses[static_cast<std::size_t>(i)] = prof.cell_mass(grid.edge(i), grid.edge(i + 1));
  return s;
}

PdeState masses_state(const LogGrid& grid, std::vector<double> masses) {
  if (static_cast<int>(masses.size()) != grid.n_cells())
    throw ConfigError("masses_state: size mismatch with grid");
  for (double w : masses)
    if (!(w >= 0.0)) throw ConfigError("masses_state: cell masses must be >= 0");
  return PdeState{grid, std::move(masses)};
}

GrowthFragSolver::GrowthFragSolver(const Kernel& kernel, double alpha, const LogGrid& grid)
    : grid_(grid), alpha_(alpha) {
  if (!(alpha > 0.0)) throw ConfigError("GrowthFragSolver: requires alpha > 0");
  const int n = grid.n_cells();
  const double r = grid.ratio();
  // A jump from the center of cell i lands in cell j with probability
  // H(r^{d+1/2}) - H(r^{d-1/2}), d = j - i <= 0: shift-invariant on a log grid.
  // The telescoping CDF differences make every row sum to 1 exactly after the
  // below-grid remainder is lumped into the leak column.
  stencil_.resize(static_cast<std::size_t>(n));
  stencil_[0] = 1.0 - kernel.cdf(std::pow(r, -0.5));
  for (int d = 1; d < n; ++d)
    stencil_[static_cast<std::size_t>(d)] =
        kernel.cdf(std::pow(r, -d + 0.5)) - kernel.cdf(std::pow(r, -d - 0.5));
  leak_.resize(static_cast<std::size_t>(n));
  phi_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    leak_[static_cast<std::size_t>(i)] = kernel.cdf(std::pow(r, -i - 0.5));
    phi_[static_cast<std::size_t>(i)] = alpha * std::pow(grid.center(i), alpha);
  }
  const double dy = grid.log_width();
  if (kernel.mean_log() < 0.5 * dy && stencil_[0] > 0.5) {
    std::ostringstream msg;
    msg << "GrowthFragSolver: grid too coarse to resolve the jump law "
        << "(self-mass " << stencil_[0] << " with E(-log theta) = " << kernel.mean_log()
        << " < dy/2 = " << 0.5 * dy << ")";
    throw ConfigError(msg.str());
  }
}

double GrowthFragSolver::max_stable_dt() const {
  double phi_max = 0.0;
  for (double p : phi_) phi_max = std::max(phi_max, p);
  return std::min(0.9 * grid_.log_width(), 0.5 / phi_max);
}

void GrowthFragSolver::step(PdeState& s, double dt) const {
  const int n = grid_.n_cells();
  if (static_cast<int>(s.masses.size()) != n)
    throw ConfigError("GrowthFragSolver::step: state/grid mismatch");
  if (!(dt > 0.0)) throw ConfigError("GrowthFragSolver::step: dt must be > 0");
  const double dy = grid_.log_width();
  if (dt > 0.9 * dy * (1.0 + 1e-12))
    throw NumericError("GrowthFragSolver: CFL violation (advection): dt > 0.9 dy");
  double phi_max = 0.0;
  for (double p : phi_) phi_max = std::max(phi_max, p);
  if (dt * phi_max > 0.5 * (1.0 + 1e-12))
    throw NumericError("GrowthFragSolver: CFL violation (jumps): dt max(phi) > 1/2");

  const double before = s.total_mass();
  std::vector<double>& w = s.masses;

  // Upwind advection toward larger x: flux nu w_i leaves cell i rightward.
  const double nu = dt / dy;
  double carry = 0.0;
  for (int i = 0; i < n; ++i) {
    const double flux = nu * w[static_cast<std::size_t>(i)];
    w[static_cast<std::size_t>(i)] += carry - flux;
    carry = flux;
  }
  s.leaked_high += carry;

  // Explicit jump exchange w <- w + dt (R^T - I)(phi w).
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        dt * phi_[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
    w[static_cast<std::size_t>(i)] -= out[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < n; ++i) {
    const double oi = out[static_cast<std::size_t>(i)];
    if (oi == 0.0) continue;
    for (int j = i; j >= 0; --j)
      w[static_cast<std::size_t>(j)] += oi * stencil_[static_cast<std::size_t>(i - j)];
    s.leaked_low += oi * leak_[static_cast<std::size_t>(i)];
  }

  s.t += dt;
  for (int i = 0; i < n; ++i) {
    if (w[static_cast<std::size_t>(i)] < 0.0) {
      std::ostringstream msg;
      msg << "GrowthFragSolver: negative mass " << w[static_cast<std::size_t>(i)]
          << " in cell " << i << " at t = " << s.t << " (dt too large)";
      throw NumericError(msg.str());
    }
  }
  const double after = s.total_mass();
  if (std::abs(after - before) > 1e-12 * std::max(1.0, before))
    throw NumericError("GrowthFragSolver: mass conservation broken within a step");
}

void GrowthFragSolver::evolve(PdeState& s, double dt, double t_until) const {
  if (!(dt > 0.0)) throw ConfigError("GrowthFragSolver::evolve: dt must be > 0");
  while (t_until - s.t > 1e-12 * std::max(1.0, std::abs(t_until))) {
    step(s, std::min(dt, t_until - s.t));
  }
}

double l1_distance_to_profile(const PdeState& s, const StationaryProfile& prof) {
  double d = 0.0;
  for (int i = 0; i < s.grid.n_cells(); ++i)
    d += std::abs(s.masses[static_cast<std::size_t>(i)] -
                  prof.cell_mass(s.grid.edge(i), s.grid.edge(i + 1)));
  return d;
}

double tail_mass(const PdeState& s, double x0) {
  const int i = s.grid.cell_index(x0);
  if (i < 0 || i >= s.grid.n_cells()) throw ConfigError("tail_mass: x0 outside the grid");
  double sum = 0.0;
  for (int j = i + 1; j < s.grid.n_cells(); ++j) sum += s.masses[static_cast<std::size_t>(j)];
  const double frac =
      std::log(s.grid.edge(i + 1) / x0) / s.grid.log_width();  // log-measure split
  return sum + frac * s.masses[static_cast<std::size_t>(i)];
}

FragmentationView transport_to_fragmentation(const PdeState& s, double alpha,
                                             const StationaryProfile* prof) {
  if (!(alpha > 0.0)) throw ConfigError("transport_to_fragmentation: requires alpha > 0");
  if (s.t < 0.0) throw ConfigError("transport_to_fragmentation: state time must be >= 0");
  const double zoom = std::exp(-s.t);  // 1/gamma(t_frag)
  FragmentationView v{LogGrid(s.grid.x_min() * zoom, s.grid.x_max() * zoom, s.grid.n_cells()),
                      s.masses, std::expm1(alpha * s.t), std::nullopt};
  if (prof) {
    std::vector<double> target(s.masses.size());
    // c*(t_frag, .) cell masses: by the zoom invariance these are the
    // stationary cell masses on the original (unscaled) grid.
    for (int i = 0; i < s.grid.n_cells(); ++i)
      target[static_cast<std::size_t>(i)] = prof->cell_mass(s.grid.edge(i), s.grid.edge(i + 1));
    v.self_similar_masses = std::move(target);
  }
  return v;
}

}  // namespace fragsim
