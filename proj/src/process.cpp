#include "fragsim/process.hpp"

namespace fragsim {

double coupling_check(const ProcessParams& p, double t_end, std::uint64_t seed,
                      int grid_points) {
  p.validate();
  if (!(p.alpha > 0.0)) throw ConfigError("coupling_check: requires alpha > 0");
  if (t_end < 0.0) throw ConfigError("coupling_check: t_end must be >= 0");
  if (t_end == 0.0) return 0.0;

  RngStream rng_y(seed, 0);
  RngStream rng_x(seed, 0);
  const double inv_alpha = 1.0 / p.alpha;
  const double x_horizon = inv_alpha * std::log1p(t_end);
  const Trajectory y = simulate_jump_process(p, t_end, rng_y);
  const Trajectory x = simulate_pdmp(p, x_horizon, rng_x);
  if (x.initial_value != y.initial_value)
    throw ConfigError("coupling_check: initial values diverged");

  double worst = 0.0;
  for (int i = 0; i <= grid_points; ++i) {
    const double t = t_end * static_cast<double>(i) / grid_points;
    const double yv = y.value_at(t);
    const double gamma = std::pow(1.0 + t, inv_alpha);
    const double xv = x.value_at(inv_alpha * std::log1p(t)) / gamma;
    worst = std::max(worst, std::abs(yv - xv) / yv);
  }
  return worst;
}

}  // namespace fragsim
