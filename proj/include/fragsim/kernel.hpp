#pragma once

#include <cstdint>
#include <vector>

#include "fragsim/errors.hpp"

namespace fragsim {

/// Homogeneous breakup law, represented as the probability law of the
/// fragment ratio theta in (0,1). We store the mass-weighted density
/// g(z) = h(z) z with CDF H(r) = \int_0^r g; h is recovered as g(z)/z.
class Kernel {
public:
  enum class Family { power_law, mixture, tabulated };

  /// h(z) = beta z^{beta-2}: H(r) = r^beta, theta =d U^{1/beta}.
  static Kernel power_law(double beta);

  /// h = p * power(beta1) + (1-p) * power(beta2).
  static Kernel mixture(double p, double beta1, double beta2);

  /// Tabulated mass-weighted density g on strictly increasing nodes in (0,1].
  /// The input is rescaled to integrate to 1; the applied scale is reported
  /// by tabulated_scale(). The CDF is the piecewise-linear interpolant of the
  /// trapezoid partial integrals, so inverse sampling is exact and monotone.
  static Kernel tabulated(std::vector<double> nodes, std::vector<double> values);

  Family family() const { return family_; }

  /// H(r) = Pr(theta <= r).
  double cdf(double r) const;

  /// H^{-1}(u) for u in (0,1). Closed form for power laws, monotone
  /// root-find for mixtures, exact piecewise-linear inversion for tables.
  double inverse_cdf(double u) const;

  /// g(z) = h(z) z, the density the samples follow.
  double g_density(double z) const;

  /// E theta^q for q >= 0; moment(0) == 1 exactly.
  double moment(double q) const;

  /// phi(q) = E(1 - theta^q) = 1 - moment(q), q > 0.
  double laplace_exponent(double q) const;

  /// E(-log theta), cached; +infinity is a valid result (see divergence
  /// detection over dyadic bands in the implementation).
  double mean_log() const { return mean_log_; }

  /// Integral the raw tabulated input had before rescaling (1 for analytic families).
  double tabulated_scale() const { return tab_scale_; }

  /// One draw of theta. Mixtures pick a component with probability p, then
  /// invert that component's CDF, so a draw may consume two uniforms.
  template <class Rng>
  double sample_theta(Rng& rng) const {
    if (family_ == Family::mixture) {
      const double which = rng.uniform();
      const double u = rng.uniform();
      const double beta = (which < p_) ? beta1_ : beta2_;
      return inverse_power(u, beta);
    }
    return inverse_cdf(rng.uniform());
  }

  double param_beta() const { return beta1_; }
  double param_p() const { return p_; }
  double param_beta1() const { return beta1_; }
  double param_beta2() const { return beta2_; }

private:
  Kernel() = default;
  static double inverse_power(double u, double beta);
  void build_tabulated_cdf();
  double tabulated_moment(double q) const;
  double tabulated_mean_log() const;

  Family family_ = Family::power_law;
  double p_ = 0.0, beta1_ = 1.0, beta2_ = 1.0;
  std::vector<double> nodes_, values_, cdf_;  // tabulated representation
  double tab_scale_ = 1.0;
  double mean_log_ = 1.0;
};

}  // namespace fragsim
