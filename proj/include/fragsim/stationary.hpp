#pragma once

#include <cstdint>
#include <vector>

#include "fragsim/errors.hpp"
#include "fragsim/kernel.hpp"
#include "fragsim/rng.hpp"
#include "fragsim/specfun.hpp"

namespace fragsim {

struct PerpetuityDraw {
  double value = 0.0;
  long n_terms = 0;
  double tail_bound = 0.0;  // conditional expected tail at the stopping index
};

/// One draw of Z_inf = sum_{k>=1} eps_k prod_{j<k} theta_j^alpha, truncated when
/// the conditional expected tail, prefix/(1 - E theta^alpha), falls below
/// tail_tol/10 (safety factor 10). min_terms forces extra depth (used by the
/// truncation-invariance tests).
template <class Rng>
PerpetuityDraw sample_Zinf_detail(const Kernel& k, double alpha, Rng& rng,
                                  double tail_tol = 1e-12, long min_terms = 0) {
  if (!(alpha > 0.0)) throw ConfigError("sample_Zinf: requires alpha > 0");
  if (!(tail_tol > 0.0)) throw ConfigError("sample_Zinf: tail_tol must be > 0");
  const double q = k.moment(alpha);
  if (!(q < 1.0)) throw NumericError("sample_Zinf: E theta^alpha >= 1");
  PerpetuityDraw d;
  double prefix = 1.0;
  for (long n = 1; n <= 100'000'000; ++n) {
    d.value += rng.exponential() * prefix;
    prefix *= std::pow(k.sample_theta(rng), alpha);
    d.n_terms = n;
    d.tail_bound = prefix / (1.0 - q);
    if (d.tail_bound < 0.1 * tail_tol && n >= min_terms) return d;
  }
  throw NumericError("sample_Zinf: truncation bound not reached");
}

template <class Rng>
double sample_Zinf(const Kernel& k, double alpha, Rng& rng, double tail_tol = 1e-12) {
  return sample_Zinf_detail(k, alpha, rng, tail_tol).value;
}

/// One draw of X_inf = (sum_{k>=1} eps_k prod_{j=1}^k theta_j^alpha)^{1/alpha};
/// same truncation rule with the tail bound prefix * q/(1-q).
template <class Rng>
PerpetuityDraw sample_Xinf_detail(const Kernel& k, double alpha, Rng& rng,
                                  double tail_tol = 1e-12, long min_terms = 0) {
  if (!(alpha > 0.0)) throw ConfigError("sample_Xinf: requires alpha > 0");
  if (!(tail_tol > 0.0)) throw ConfigError("sample_Xinf: tail_tol must be > 0");
  const double q = k.moment(alpha);
  if (!(q < 1.0)) throw NumericError("sample_Xinf: E theta^alpha >= 1");
  PerpetuityDraw d;
  double prefix = 1.0;
  for (long n = 1; n <= 100'000'000; ++n) {
    const double eps = rng.exponential();
    prefix *= std::pow(k.sample_theta(rng), alpha);
    d.value += eps * prefix;
    d.n_terms = n;
    d.tail_bound = prefix * q / (1.0 - q);
    if (d.tail_bound < 0.1 * tail_tol && n >= min_terms) {
      d.value = std::pow(d.value, 1.0 / alpha);
      return d;
    }
  }
  throw NumericError("sample_Xinf: truncation bound not reached");
}

template <class Rng>
double sample_Xinf(const Kernel& k, double alpha, Rng& rng, double tail_tol = 1e-12) {
  return sample_Xinf_detail(k, alpha, rng, tail_tol).value;
}

/// E Z_inf^n = n! / prod_{k=1}^n phi(alpha k); exact product formula.
double moment_Zinf(const Kernel& k, double alpha, int n);

/// Two-sample Kolmogorov-Smirnov statistic between X_inf draws and draws pushed
/// through one chain step X' = theta (eps + X^alpha)^{1/alpha}. Stationarity of
/// the chain law means the statistic stays below the usual critical values.
double fixed_point_distance(const Kernel& k, double alpha, long n_samples,
                            std::uint64_t seed);

struct JumpTimeEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  bool divergent = false;  // E(-log theta) = inf: running mean grows without bound
};

/// MC estimate of E(t1) with X0 drawn from the stationary chain law;
/// equals E(-log theta) whenever that is finite.
JumpTimeEstimate mean_first_jump_time_stationary(const Kernel& k, double alpha,
                                                 long n_samples, std::uint64_t seed);

/// Stationary density u*(x) of the growth-fragmentation semigroup, the mass
/// density u*(x) x, and the self-similar solution built from them.
class StationaryProfile {
public:
  enum class Form { gen_gamma, beta_gamma_product, histogram };

  /// Builds the closed form for power-law and mixture kernels; tabulated
  /// kernels fall back to a histogram of Z_inf draws. Throws ConfigError when
  /// E(-log theta) diverges (no integrable stationary profile exists).
  static StationaryProfile make(const Kernel& k, double alpha,
                                std::uint64_t seed = 20240101,
                                long hist_samples = 1'000'000);

  Form form() const { return form_; }
  double alpha() const { return alpha_; }
  double normalizer() const { return mean_log_; }  // E(-log theta)

  double u_star(double x) const;
  double mass_density(double x) const { return u_star(x) * x; }
  double f_Zinf(double z) const;

  /// \int_lo^hi u*(x) x dx.
  double cell_mass(double lo, double hi) const;
  /// Total mass \int_0^inf u*(x) x dx; equals 1 up to quadrature / binning.
  double mass_total() const;

  double gg_beta() const { return beta_; }
  double bgp_a1() const { return a1_; }
  double bgp_a() const { return a_; }
  double bgp_a2() const { return a2_; }
  int hist_bins() const { return static_cast<int>(zdens_.size()); }
  double hist_z_lo() const { return zedges_.empty() ? 0.0 : zedges_.front(); }
  double hist_z_hi() const { return zedges_.empty() ? 0.0 : zedges_.back(); }

  double self_similar_prop_form(double t, double x) const;
  double self_similar_scaling_form(double t, double x) const;

private:
  StationaryProfile() = default;
  double norm_used() const { return form_ == Form::histogram ? hist_norm_ : mean_log_; }

  Form form_ = Form::gen_gamma;
  double alpha_ = 1.0;
  double mean_log_ = 1.0;
  double beta_ = 1.0;                  // gen_gamma
  double a1_ = 0.0, a_ = 0.0, a2_ = 0.0;  // beta_gamma_product
  std::vector<double> zedges_, zdens_;    // histogram of f_Z
  // The histogram's implied normalizer (1/alpha) E_hist[1/Z]; using it keeps
  // the histogram profile's total mass exactly 1.
  double hist_norm_ = 1.0;
};

struct SelfSimilarValue {
  double prop_form;
  double scaling_form;
};

/// Both algebraically identical forms of c*(t,x); they agree to roundoff.
SelfSimilarValue self_similar_density(const StationaryProfile& prof, double t, double x);

}  // namespace fragsim
