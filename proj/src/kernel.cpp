#include "fragsim/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fragsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_beta(double beta, const char* who) {
  if (!std::isfinite(beta) || !(beta > 0.0))
    throw ConfigError(std::string(who) + ": beta must be finite and > 0");
}

}  // namespace

Kernel Kernel::power_law(double beta) {
  require_beta(beta, "Kernel::power_law");
  Kernel k;
  k.family_ = Family::power_law;
  k.beta1_ = beta;
  k.mean_log_ = 1.0 / beta;
  return k;
}

Kernel Kernel::mixture(double p, double beta1, double beta2) {
  require_beta(beta1, "Kernel::mixture");
  require_beta(beta2, "Kernel::mixture");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("Kernel::mixture: p must lie in [0,1]");
  Kernel k;
  k.family_ = Family::mixture;
  k.p_ = p;
  k.beta1_ = beta1;
  k.beta2_ = beta2;
  k.mean_log_ = p / beta1 + (1.0 - p) / beta2;
  return k;
}

Kernel Kernel::tabulated(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() < 2 || nodes.size() != values.size())
    throw ConfigError("Kernel::tabulated: need >= 2 nodes with matching values");
  if (!(nodes.front() > 0.0) || !(nodes.back() <= 1.0))
    throw ConfigError("Kernel::tabulated: nodes must lie in (0,1]");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i]) || !std::isfinite(values[i]) || values[i] < 0.0)
      throw ConfigError("Kernel::tabulated: nodes/values must be finite, values >= 0");
    if (i > 0 && !(nodes[i] > nodes[i - 1]))
      throw ConfigError("Kernel::tabulated: nodes must be strictly increasing");
  }
  Kernel k;
  k.family_ = Family::tabulated;
  k.nodes_ = std::move(nodes);
  k.values_ = std::move(values);
  k.build_tabulated_cdf();
  k.mean_log_ = k.tabulated_mean_log();
  return k;
}

void Kernel::build_tabulated_cdf() {
  const std::size_t n = nodes_.size();
  cdf_.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    cdf_[i] = cdf_[i - 1] +
              0.5 * (values_[i] + values_[i - 1]) * (nodes_[i] - nodes_[i - 1]);
  }
  const double total = cdf_.back();
  if (!(total > 0.0)) throw ConfigError("Kernel::tabulated: density integrates to zero");
  tab_scale_ = total;
  for (double& v : values_) v /= total;
  for (double& c : cdf_) c /= total;  // cdf_.back() becomes exactly 1
}

double Kernel::cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  switch (family_) {
    case Family::power_law:
      return std::pow(r, beta1_);
    case Family::mixture:
      return p_ * std::pow(r, beta1_) + (1.0 - p_) * std::pow(r, beta2_);
    case Family::tabulated: {
      if (r <= nodes_.front()) return 0.0;
      if (r >= nodes_.back()) return 1.0;
      const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
      const std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
      const double z1 = nodes_[i - 1], z2 = nodes_[i];
      const double w = (r - z1) / (z2 - z1);
      return cdf_[i - 1] + w * (cdf_[i] - cdf_[i - 1]);
    }
  }
  return 0.0;
}

double Kernel::inverse_power(double u, double beta) { return std::pow(u, 1.0 / beta); }

double Kernel::inverse_cdf(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw ConfigError("Kernel::inverse_cdf: u must lie in (0,1)");
  switch (family_) {
    case Family::power_law:
      return inverse_power(u, beta1_);
    case Family::mixture: {
      // H is smooth and strictly increasing; bisection with Newton refinement.
      double lo = 0.0, hi = 1.0;
      double r = std::pow(u, 1.0 / std::min(beta1_, beta2_));
      for (int it = 0; it < 200; ++it) {
        const double f = cdf(r) - u;
        if (f > 0.0)
          hi = r;
        else
          lo = r;
        const double dens = g_density(r);
        double next = (dens > 0.0) ? r - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 1e-16 * std::max(1.0, r)) return next;
        r = next;
      }
      return r;
    }
    case Family::tabulated: {
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      if (it == cdf_.end()) return nodes_.back();
      const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
      if (i == 0) return nodes_.front();
      const double c1 = cdf_[i - 1], c2 = cdf_[i];
      const double z1 = nodes_[i - 1], z2 = nodes_[i];
      return z1 + (u - c1) * (z2 - z1) / (c2 - c1);
    }
  }
  return u;
}

double Kernel::g_density(double z) const {
  if (z <= 0.0 || z > 1.0) return 0.0;
  switch (family_) {
    case Family::power_law:
      return beta1_ * std::pow(z, beta1_ - 1.0);
    case Family::mixture:
      return p_ * beta1_ * std::pow(z, beta1_ - 1.0) +
             (1.0 - p_) * beta2_ * std::pow(z, beta2_ - 1.0);
    case Family::tabulated: {
      if (z < nodes_.front() || z > nodes_.back()) return 0.0;
      const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), z);
      if (it == nodes_.end()) return values_.back();
      const std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
      if (i == 0) return values_.front();
      const double z1 = nodes_[i - 1], z2 = nodes_[i];
      const double w = (z - z1) / (z2 - z1);
      return values_[i - 1] + w * (values_[i] - values_[i - 1]);
    }
  }
  return 0.0;
}

double Kernel::moment(double q) const {
  if (!(q >= 0.0)) throw ConfigError("Kernel::moment: requires q >= 0");
  if (q == 0.0) return 1.0;
  switch (family_) {
    case Family::power_law:
      return beta1_ / (beta1_ + q);
    case Family::mixture:
      return p_ * beta1_ / (beta1_ + q) + (1.0 - p_) * beta2_ / (beta2_ + q);
    case Family::tabulated:
      return tabulated_moment(q);
  }
  return 1.0;
}

double Kernel::tabulated_moment(double q) const {
  // Exact integral of z^q against the piecewise-linear g: per cell,
  //   int z^q [(z2-z)g1 + (z-z1)g2]/(z2-z1) dz
  // expands into the monomial integrals I0 = int z^q, I1 = int z^{q+1}.
  double sum = 0.0;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double z1 = nodes_[i - 1], z2 = nodes_[i];
    const double g1 = values_[i - 1], g2 = values_[i];
    const double dz = z2 - z1;
    const double i0 = (std::pow(z2, q + 1.0) - std::pow(z1, q + 1.0)) / (q + 1.0);
    const double i1 = (std::pow(z2, q + 2.0) - std::pow(z1, q + 2.0)) / (q + 2.0);
    sum += ((g1 * z2 - g2 * z1) * i0 + (g2 - g1) * i1) / dz;
  }
  return sum;
}

double Kernel::laplace_exponent(double q) const {
  if (!(q > 0.0)) throw ConfigError("Kernel::laplace_exponent: requires q > 0");
  return 1.0 - moment(q);
}

namespace {

// F(z) = int (-log z)(A + B z) dz, antiderivative for one linear piece.
double neg_log_linear_antideriv(double A, double B, double z) {
  const double lz = std::log(z);
  return A * (z - z * lz) + B * (0.25 * z * z - 0.5 * z * z * lz);
}

}  // namespace

double Kernel::tabulated_mean_log() const {
  // int over [lo,hi] of (-log z) g(z) dz restricted to table cells.
  auto piece = [this](double lo, double hi) {
    if (!(lo < hi)) return 0.0;
    lo = std::max(lo, nodes_.front());
    hi = std::min(hi, nodes_.back());
    if (!(lo < hi)) return 0.0;
    double sum = 0.0;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), lo);
    std::size_t i = std::max<std::size_t>(1, static_cast<std::size_t>(it - nodes_.begin()));
    for (; i < nodes_.size() && nodes_[i - 1] < hi; ++i) {
      const double z1 = nodes_[i - 1], z2 = nodes_[i];
      const double a = std::max(lo, z1), b = std::min(hi, z2);
      if (!(a < b)) continue;
      const double g1 = values_[i - 1], g2 = values_[i];
      const double slope = (g2 - g1) / (z2 - z1);
      const double A = g1 - slope * z1;
      sum += neg_log_linear_antideriv(A, slope, b) - neg_log_linear_antideriv(A, slope, a);
    }
    return sum;
  };

  // Dyadic bands (2^{-n-1}, 2^{-n}], n = 0..59. If the deepest band still
  // contributes more than 1e-6 the integral has not converged: report +inf.
  double total = 0.0;
  double last_band = 0.0;
  for (int n = 0; n < 60; ++n) {
    last_band = piece(std::ldexp(1.0, -n - 1), std::ldexp(1.0, -n));
    total += last_band;
  }
  if (last_band > 1e-6) return kInf;
  total += piece(nodes_.front(), std::ldexp(1.0, -60));
  return total;
}

}  // namespace fragsim
