#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fragsim/pde.hpp"
#include "fragsim/stats.hpp"
#include "support.hpp"

using namespace fragsim;

TEST_CASE("redistribution stencil is row-stochastic with boundary lumping") {
  const LogGrid grid(1e-3, 30.0, 64);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1.0, grid);
  const double r = grid.ratio();
  // Uniform theta: mass into displacement d is H(r^{d+1/2}) - H(r^{d-1/2}).
  CHECK(solver.stencil(0) == doctest::Approx(1.0 - std::pow(r, -0.5)).epsilon(1e-13));
  for (int d = 1; d < 5; ++d)
    CHECK(solver.stencil(d) ==
          doctest::Approx(std::pow(r, -d + 0.5) - std::pow(r, -d - 0.5)).epsilon(1e-13));
  for (int i = 0; i < grid.n_cells(); ++i) {
    double row = solver.row_leak(i);
    for (int d = 0; d <= i; ++d) row += solver.stencil(d);
    CHECK(std::abs(row - 1.0) < 1e-12);
  }
}

TEST_CASE("jump rates match the closed form at cell centers") {
  const LogGrid grid(1e-3, 30.0, 64);
  const GrowthFragSolver solver(Kernel::power_law(2.0), 1.5, grid);
  for (int i = 0; i < grid.n_cells(); i += 7)
    CHECK(solver.jump_rate(i) ==
          doctest::Approx(1.5 * std::pow(grid.center(i), 1.5)).epsilon(1e-13));
}

TEST_CASE("a grid too coarse for a concentrated jump law is rejected") {
  const LogGrid coarse(0.1, 10.0, 16);
  CHECK_THROWS_AS(GrowthFragSolver(Kernel::power_law(100.0), 1.0, coarse), ConfigError);
  CHECK_NOTHROW(GrowthFragSolver(Kernel::power_law(100.0), 1.0, LogGrid(0.1, 10.0, 4096)));
}

TEST_CASE("pure advection shifts the mass centroid by exactly t") {
  // alpha ~ 0 stubs out the jump rate; the upwind drift in y is exact in the
  // mean even though the profile diffuses.
  const LogGrid grid(1e-4, 1e4, 256);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1e-9, grid);
  PdeState s = point_mass_state(grid, 1.0);
  auto centroid = [&grid](const PdeState& st) {
    double c = 0.0;
    for (int i = 0; i < grid.n_cells(); ++i)
      c += std::log(grid.center(i)) * st.masses[static_cast<std::size_t>(i)];
    return c;
  };
  const double c0 = centroid(s);
  const double t = 1.0;
  solver.evolve(s, 0.9 * grid.log_width(), t);
  // The alpha ~ 0 stub still dribbles O(alpha) mass through the jump channel.
  CHECK(s.leaked_low + s.leaked_high < 1e-9);
  CHECK(centroid(s) - c0 == doctest::Approx(t).epsilon(1e-9));
}

TEST_CASE("CFL guards") {
  const LogGrid grid(1e-3, 30.0, 64);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1.0, grid);
  PdeState s = point_mass_state(grid, 1.0);
  CHECK_THROWS_AS(solver.step(s, grid.log_width()), NumericError);  // advection
  CHECK_THROWS_AS(solver.step(s, 0.1), NumericError);               // jump rate
  CHECK_THROWS_AS(solver.step(s, 0.0), ConfigError);
  CHECK(solver.max_stable_dt() <= 0.9 * grid.log_width());
  CHECK(solver.max_stable_dt() * solver.jump_rate(grid.n_cells() - 1) <= 0.5 + 1e-12);
}

TEST_CASE("conservation and positivity over many steps") {
  const LogGrid grid(1e-4, 50.0, 256);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1.0, grid);
  PdeState s = point_mass_state(grid, 5.0);
  const double dt = solver.max_stable_dt();
  for (int step = 0; step < 1000; ++step) solver.step(s, dt);
  CHECK(std::abs(s.total_mass() - 1.0) < 1e-12);
  for (double w : s.masses) CHECK(w >= 0.0);
  CHECK(s.leaked_low > 0.0);
}

TEST_CASE("profile-initialized state has zero distance to its profile") {
  const LogGrid grid(1e-4, 50.0, 128);
  const StationaryProfile prof = StationaryProfile::make(Kernel::power_law(1.0), 1.0);
  const PdeState s = profile_state(grid, prof);
  CHECK(l1_distance_to_profile(s, prof) == 0.0);
  const double mass = std::accumulate(s.masses.begin(), s.masses.end(), 0.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));  // tails live off-grid
}

TEST_CASE("convergence toward the stationary profile (short run)") {
  const LogGrid grid(1e-4, 50.0, 256);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1.0, grid);
  const StationaryProfile prof = StationaryProfile::make(Kernel::power_law(1.0), 1.0);
  PdeState s = point_mass_state(grid, 5.0);
  const double dt = solver.max_stable_dt();
  std::vector<double> l1;
  for (double t : {1.0, 2.0, 3.0, 4.0}) {
    solver.evolve(s, dt, t);
    l1.push_back(l1_distance_to_profile(s, prof));
  }
  for (std::size_t i = 1; i < l1.size(); ++i) CHECK(l1[i] < l1[i - 1]);
  CHECK(l1.back() < 0.05);
}

TEST_CASE("benchmark run: recorded baseline at t = 15") {
  // 512 cells on [1e-4, 50], point mass at 5, alpha = beta = 1. The L1 floor
  // of the first-order scheme at this resolution measured 0.0082; the distance
  // dips below the floor around t=5 while the transient crosses the target,
  // then settles there. Tail above 1.0 settles at e^{-1}.
  const LogGrid grid(1e-4, 50.0, 512);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1.0, grid);
  const StationaryProfile prof = StationaryProfile::make(Kernel::power_law(1.0), 1.0);
  PdeState s = point_mass_state(grid, 5.0);
  solver.evolve(s, solver.max_stable_dt(), 15.0);
  const double l1 = l1_distance_to_profile(s, prof);
  CHECK(l1 < 0.05);
  CHECK(l1 == doctest::Approx(0.0082).epsilon(0.35));
  CHECK(std::abs(tail_mass(s, 1.0) - std::exp(-1.0)) < 0.02);
}

TEST_CASE("transported solution matches direct Monte Carlo of the jump process") {
  // PDE evolved to s = log(11) maps to the fragmentation frame at t = 10;
  // against a 1e5-path Y(10) histogram the L1 gap stays within the combined
  // discretization + binning budget.
  const LogGrid grid(1e-4, 50.0, 256);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1.0, grid);
  PdeState s = point_mass_state(grid, 1.0);
  solver.evolve(s, solver.max_stable_dt(), std::log(11.0));
  const FragmentationView view = transport_to_fragmentation(s, 1.0);

  const ProcessParams p{1.0, Kernel::power_law(1.0), Initial::point(1.0)};
  const long n = 100'000;
  std::vector<double> y(n);
  for (long i = 0; i < n; ++i) {
    RngStream rng(161, static_cast<std::uint64_t>(i));
    y[static_cast<std::size_t>(i)] = simulate_jump_process(p, 10.0, rng).value_at(10.0);
  }
  const EmpiricalDensity e = empirical_density(y, view.grid);
  double l1 = e.underflow + e.overflow;  // PDE leak totals are ~0 here
  for (int i = 0; i < view.grid.n_cells(); ++i)
    l1 += std::abs(e.masses[static_cast<std::size_t>(i)] -
                   view.masses[static_cast<std::size_t>(i)]);
  CHECK(l1 < 0.05);
}

TEST_CASE("tail mass accounting") {
  const LogGrid grid(1e-3, 30.0, 64);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1.0, grid);
  PdeState s = point_mass_state(grid, 2.0);
  solver.evolve(s, solver.max_stable_dt(), 1.0);
  const double on_grid = s.total_mass() - s.leaked_low - s.leaked_high;
  CHECK(tail_mass(s, grid.x_min()) == doctest::Approx(on_grid).epsilon(1e-12));
  // Splitting inside one cell is monotone in x0.
  CHECK(tail_mass(s, 1.0) > tail_mass(s, 1.2));
  CHECK_THROWS_AS(tail_mass(s, 1e-5), ConfigError);
  CHECK_THROWS_AS(tail_mass(s, 100.0), ConfigError);
}

TEST_CASE("transport back to the fragmentation frame") {
  const LogGrid grid(1e-3, 30.0, 64);
  const GrowthFragSolver solver(Kernel::power_law(1.0), 1.0, grid);
  const StationaryProfile prof = StationaryProfile::make(Kernel::power_law(1.0), 1.0);
  PdeState s = point_mass_state(grid, 2.0);

  const FragmentationView v0 = transport_to_fragmentation(s, 1.0);
  CHECK(v0.t_frag == 0.0);
  CHECK(v0.grid.x_min() == doctest::Approx(grid.x_min()));
  CHECK(v0.masses == s.masses);

  solver.evolve(s, solver.max_stable_dt(), std::log(2.0));
  const FragmentationView v = transport_to_fragmentation(s, 1.0, &prof);
  CHECK(v.t_frag == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v.grid.x_min() == doctest::Approx(grid.x_min() / 2.0).epsilon(1e-12));
  CHECK(v.grid.x_max() == doctest::Approx(grid.x_max() / 2.0).epsilon(1e-12));
  CHECK(v.masses == s.masses);  // cell masses invariant under the zoom
  REQUIRE(v.self_similar_masses.has_value());
  double target_total = 0.0;
  for (double m : *v.self_similar_masses) target_total += m;
  CHECK(target_total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("state constructors validate") {
  const LogGrid grid(1e-3, 30.0, 8);
  CHECK_THROWS_AS(point_mass_state(grid, 100.0), ConfigError);
  CHECK_THROWS_AS(masses_state(grid, {1.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(masses_state(grid, std::vector<double>(8, -1.0)), ConfigError);
}
