#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "fragsim/errors.hpp"
#include "fragsim/kernel.hpp"
#include "fragsim/rng.hpp"

namespace fragsim {

/// Initial mass: a point x0 > 0 or a caller-supplied sampler.
class Initial {
public:
  static Initial point(double x0) {
    if (!(x0 > 0.0)) throw ConfigError("Initial::point: x0 must be > 0");
    return Initial(x0);
  }
  static Initial sampler(std::function<double(RngStream&)> s) {
    Initial in(1.0);
    in.sampler_ = std::move(s);
    return in;
  }

  bool is_point() const { return !sampler_; }
  double point_value() const { return x0_; }

  template <class Rng>
  double draw(Rng& rng) const {
    if (!sampler_) return x0_;
    if constexpr (std::is_same_v<Rng, RngStream>) {
      return sampler_(rng);
    } else {
      // Stub streams exercise point initials only.
      throw ConfigError("Initial: sampler initials need a real RngStream");
    }
  }

private:
  explicit Initial(double x0) : x0_(x0) {}
  double x0_;
  std::function<double(RngStream&)> sampler_;
};

struct ProcessParams {
  double alpha = 1.0;  // breakage-rate exponent a(x) = x^alpha; nonzero
  Kernel kernel = Kernel::power_law(1.0);
  Initial initial = Initial::point(1.0);

  void validate() const {
    if (!std::isfinite(alpha) || alpha == 0.0)
      throw ConfigError("ProcessParams: alpha must be finite and nonzero");
  }
};

/// Ordered jump record of one path. `values` are post-jump; between jumps the
/// pure-jump process is constant and the growth PDMP flows as e^{t-t_n} X_n.
struct Trajectory {
  double initial_value = 1.0;
  std::vector<double> jump_times;
  std::vector<double> values;
  double t_end = 0.0;
  bool exponential_flow = false;
  bool exploded = false;
  std::optional<double> explosion_time;
  std::optional<double> exp_functional;  // I_inf for shattering paths
  double exp_functional_error = 0.0;     // truncation bound carried with I_inf

  double value_at(double t) const {
    if (exploded && explosion_time && t >= *explosion_time) return 0.0;
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    const std::size_t n = static_cast<std::size_t>(it - jump_times.begin());
    const double base = (n == 0) ? initial_value : values[n - 1];
    if (!exponential_flow) return base;
    const double t_last = (n == 0) ? 0.0 : jump_times[n - 1];
    return base * std::exp(t - t_last);
  }
};

namespace detail {

constexpr long kMaxJumps = 100'000'000;

/// Reconstructs the pure-jump path value at time t from the recorded
/// (epsilon, theta) draws through the compound-Poisson time change:
/// Y(t) = Y0 exp(-Z(rho(Y0^alpha t))) with Z(s) = -sum_{j<=N(s)} log theta_j.
inline double time_change_value(double y0, double alpha, const std::vector<double>& eps,
                                const std::vector<double>& theta, double t) {
  const double budget = std::pow(y0, alpha) * t;
  double spent = 0.0;
  double prod_pow = 1.0;  // prod theta_j^{-alpha} over jumps so far
  double y = y0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (spent + eps[k] * prod_pow > budget) return y;
    spent += eps[k] * prod_pow;
    prod_pow *= std::pow(theta[k], -alpha);
    y *= theta[k];
  }
  return y;
}

}  // namespace detail

/// Event-driven simulation of the pure-jump fragmentation process:
/// holding time eps_n / Y_{n-1}^alpha, then Y_n = theta_n Y_{n-1}.
/// Requires alpha > 0 (use simulate_shattering for alpha < 0).
/// With check_time_change set, every recorded value is cross-checked against
/// the compound-Poisson time-change representation.
template <class Rng>
Trajectory simulate_jump_process(const ProcessParams& p, double t_end, Rng& rng,
                                 bool check_time_change = false) {
  p.validate();
  if (!(p.alpha > 0.0))
    throw ConfigError("simulate_jump_process: requires alpha > 0 (see simulate_shattering)");
  if (!(t_end > 0.0)) throw ConfigError("simulate_jump_process: t_end must be > 0");

  Trajectory traj;
  traj.t_end = t_end;
  traj.initial_value = p.initial.draw(rng);
  double y = traj.initial_value;
  double tau = 0.0;
  std::vector<double> eps_log, theta_log;
  for (long n = 0; n < detail::kMaxJumps; ++n) {
    const double eps = rng.exponential();
    const double next = tau + eps / std::pow(y, p.alpha);
    if (!(next <= t_end)) break;
    const double theta = p.kernel.sample_theta(rng);
    tau = next;
    y *= theta;
    traj.jump_times.push_back(tau);
    traj.values.push_back(y);
    if (check_time_change) {
      eps_log.push_back(eps);
      theta_log.push_back(theta);
    }
    if (n + 2 == detail::kMaxJumps)
      throw NumericError("simulate_jump_process: jump budget exhausted");
  }
  if (check_time_change) {
    for (std::size_t k = 0; k < traj.jump_times.size(); ++k) {
      const double ref = detail::time_change_value(traj.initial_value, p.alpha, eps_log,
                                                   theta_log, traj.jump_times[k] * (1.0 + 1e-13));
      if (std::abs(ref - traj.values[k]) > 1e-10 * std::max(traj.values[k], 1e-300))
        throw NumericError("simulate_jump_process: time-change cross-check failed");
    }
  }
  return traj;
}

/// Growth-fragmentation PDMP: exponential flow e^t between jumps,
/// t_n - t_{n-1} = (1/alpha) log(eps_n / X_{n-1}^alpha + 1),
/// X_n = theta_n (eps_n + X_{n-1}^alpha)^{1/alpha}.
template <class Rng>
Trajectory simulate_pdmp(const ProcessParams& p, double t_end, Rng& rng) {
  p.validate();
  if (!(p.alpha > 0.0)) throw ConfigError("simulate_pdmp: requires alpha > 0");
  if (!(t_end > 0.0)) throw ConfigError("simulate_pdmp: t_end must be > 0");

  Trajectory traj;
  traj.t_end = t_end;
  traj.exponential_flow = true;
  traj.initial_value = p.initial.draw(rng);
  double x = traj.initial_value;
  double t = 0.0;
  const double inv_alpha = 1.0 / p.alpha;
  for (long n = 0; n < detail::kMaxJumps; ++n) {
    const double eps = rng.exponential();
    const double xa = std::pow(x, p.alpha);
    const double next = t + inv_alpha * std::log1p(eps / xa);
    if (!(next <= t_end)) break;
    const double theta = p.kernel.sample_theta(rng);
    t = next;
    x = theta * std::pow(eps + xa, inv_alpha);
    traj.jump_times.push_back(t);
    traj.values.push_back(x);
    if (n + 2 == detail::kMaxJumps)
      throw NumericError("simulate_pdmp: jump budget exhausted");
  }
  return traj;
}

/// Shattering regime (alpha < 0): the jump process explodes at
/// tau_inf = Y0^{-alpha} I_inf with I_inf = sum_k eps_k prod_{j<k} theta_j^{-alpha}.
/// The series is truncated when the conditional expected tail (geometric bound
/// using E theta^{|alpha|}, with a safety factor of 10) drops below tail_tol.
template <class Rng>
Trajectory simulate_shattering(const ProcessParams& p, Rng& rng, double tail_tol = 1e-12) {
  p.validate();
  if (!(p.alpha < 0.0)) throw ConfigError("simulate_shattering: requires alpha < 0");
  if (!(tail_tol > 0.0)) throw ConfigError("simulate_shattering: tail_tol must be > 0");

  const double abs_alpha = -p.alpha;
  const double q = p.kernel.moment(abs_alpha);  // E theta^{-alpha}, in (0,1)
  if (!(q < 1.0)) throw NumericError("simulate_shattering: E theta^{|alpha|} >= 1");

  Trajectory traj;
  traj.initial_value = p.initial.draw(rng);
  const double y0 = traj.initial_value;
  const double scale = std::pow(y0, -p.alpha);  // tau_n = scale * partial sum

  double series = 0.0;   // Y0^alpha tau_n
  double prefix = 1.0;   // prod_{j<=n} theta_j^{-alpha}
  double y = y0;
  double tail_bound = 0.0;
  for (long n = 0; n < detail::kMaxJumps; ++n) {
    const double eps = rng.exponential();
    series += eps * prefix;
    const double theta = p.kernel.sample_theta(rng);
    prefix *= std::pow(theta, abs_alpha);
    y *= theta;
    traj.jump_times.push_back(scale * series);
    traj.values.push_back(y);
    tail_bound = prefix / (1.0 - q);
    if (tail_bound < 0.1 * tail_tol) break;
    if (n + 2 == detail::kMaxJumps)
      throw NumericError("simulate_shattering: jump budget exhausted");
  }
  traj.exploded = true;
  traj.exp_functional = series;
  traj.exp_functional_error = tail_bound;
  traj.explosion_time = scale * series;
  traj.t_end = *traj.explosion_time;
  return traj;
}

/// Pathwise check of the rescaling identity
///   Y(t) = (1+t)^{-1/alpha} X((1/alpha) log(1+t))
/// for both processes driven by the identical (eps, theta) stream and X0 = Y0.
/// Returns the maximum relative discrepancy over a uniform time grid; this is
/// an exact identity, so the result is pure floating-point roundoff.
double coupling_check(const ProcessParams& p, double t_end, std::uint64_t seed,
                      int grid_points = 256);

}  // namespace fragsim
