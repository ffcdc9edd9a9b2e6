#include "fragsim/stationary.hpp"

#include <algorithm>
#include <cmath>

namespace fragsim {

double moment_Zinf(const Kernel& k, double alpha, int n) {
  if (!(alpha > 0.0)) throw ConfigError("moment_Zinf: requires alpha > 0");
  if (n < 1) throw ConfigError("moment_Zinf: requires n >= 1");
  double fact = 1.0, prod = 1.0;
  for (int i = 1; i <= n; ++i) {
    fact *= i;
    prod *= k.laplace_exponent(alpha * i);
  }
  return fact / prod;
}

namespace {

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double gap = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    gap = std::max(gap, std::abs(i / na - j / nb));
  }
  return gap;
}

}  // namespace

double fixed_point_distance(const Kernel& k, double alpha, long n_samples,
                            std::uint64_t seed) {
  if (!(alpha > 0.0)) throw ConfigError("fixed_point_distance: requires alpha > 0");
  if (n_samples < 1000) throw ConfigError("fixed_point_distance: requires n_samples >= 1e3");
  std::vector<double> a(n_samples), b(n_samples);
  for (long i = 0; i < n_samples; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    a[i] = sample_Xinf(k, alpha, rng);
  }
  const double inv_alpha = 1.0 / alpha;
  for (long i = 0; i < n_samples; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(n_samples + i));
    const double x = sample_Xinf(k, alpha, rng);
    const double eps = rng.exponential();
    const double theta = k.sample_theta(rng);
    b[i] = theta * std::pow(eps + std::pow(x, alpha), inv_alpha);
  }
  return two_sample_ks(std::move(a), std::move(b));
}

JumpTimeEstimate mean_first_jump_time_stationary(const Kernel& k, double alpha,
                                                 long n_samples, std::uint64_t seed) {
  if (!(alpha > 0.0))
    throw ConfigError("mean_first_jump_time_stationary: requires alpha > 0");
  if (n_samples < 1)
    throw ConfigError("mean_first_jump_time_stationary: requires n_samples >= 1");
  JumpTimeEstimate est;
  est.divergent = !std::isfinite(k.mean_log());
  double mean = 0.0, m2 = 0.0;
  const double inv_alpha = 1.0 / alpha;
  for (long i = 0; i < n_samples; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const double x = sample_Xinf(k, alpha, rng);
    const double eps = rng.exponential();
    const double t1 = inv_alpha * std::log1p(eps / std::pow(x, alpha));
    const double delta = t1 - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (t1 - mean);
  }
  est.mean = mean;
  est.std_error =
      (n_samples > 1) ? std::sqrt(m2 / (static_cast<double>(n_samples) - 1.0) /
                                  static_cast<double>(n_samples))
                      : 0.0;
  return est;
}

StationaryProfile StationaryProfile::make(const Kernel& k, double alpha,
                                          std::uint64_t seed, long hist_samples) {
  if (!(alpha > 0.0)) throw ConfigError("StationaryProfile: requires alpha > 0");
  if (!std::isfinite(k.mean_log()))
    throw ConfigError(
        "StationaryProfile: no integrable stationary profile (E(-log theta) diverges)");
  StationaryProfile p;
  p.alpha_ = alpha;
  p.mean_log_ = k.mean_log();
  switch (k.family()) {
    case Kernel::Family::power_law:
      p.form_ = Form::gen_gamma;
      p.beta_ = k.param_beta();
      return p;
    case Kernel::Family::mixture: {
      // Canonical ordering: beta2 > beta1, p the weight of the smaller exponent.
      double w = k.param_p(), b1 = k.param_beta1(), b2 = k.param_beta2();
      if (b1 > b2) {
        std::swap(b1, b2);
        w = 1.0 - w;
      }
      const double a1 = b1 / alpha, a2 = b2 / alpha;
      const double a = w * (a2 - a1);
      if (a < 1e-12) {  // degenerate: pure power law of exponent b2
        p.form_ = Form::gen_gamma;
        p.beta_ = b2;
        return p;
      }
      p.form_ = Form::beta_gamma_product;
      p.a1_ = a1;
      p.a_ = a;
      p.a2_ = a2;
      return p;
    }
    case Kernel::Family::tabulated:
      break;
  }
  // Histogram fallback: bin Z_inf draws over the central 99.98% sample range.
  if (hist_samples < 1000) throw ConfigError("StationaryProfile: hist_samples too small");
  std::vector<double> z(static_cast<std::size_t>(hist_samples));
  for (long i = 0; i < hist_samples; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    z[static_cast<std::size_t>(i)] = sample_Zinf(k, alpha, rng);
  }
  std::sort(z.begin(), z.end());
  const std::size_t lo_i = static_cast<std::size_t>(1e-4 * hist_samples);
  const std::size_t hi_i = z.size() - 1 - lo_i;
  const double z_lo = z[lo_i], z_hi = z[hi_i];
  if (!(z_lo > 0.0 && z_hi > z_lo))
    throw NumericError("StationaryProfile: degenerate Z_inf sample range");
  constexpr int kBins = 512;
  p.form_ = Form::histogram;
  p.zedges_.resize(kBins + 1);
  const double llo = std::log(z_lo), lhi = std::log(z_hi);
  for (int b = 0; b <= kBins; ++b)
    p.zedges_[b] = std::exp(llo + (lhi - llo) * b / kBins);
  p.zedges_.front() = z_lo;
  p.zedges_.back() = z_hi;
  std::vector<long> counts(kBins, 0);
  long kept = 0;
  for (double v : z) {
    if (v < z_lo || v >= z_hi) continue;
    int b = static_cast<int>(std::floor((std::log(v) - llo) / (lhi - llo) * kBins));
    b = std::clamp(b, 0, kBins - 1);
    ++counts[b];
    ++kept;
  }
  p.zdens_.resize(kBins);
  for (int b = 0; b < kBins; ++b)
    p.zdens_[b] = static_cast<double>(counts[b]) /
                  (static_cast<double>(kept) * (p.zedges_[b + 1] - p.zedges_[b]));
  // Implied normalizer (1/alpha) E[1/Z]; exact for the binned density.
  double e_inv = 0.0;
  for (int b = 0; b < kBins; ++b)
    e_inv += p.zdens_[b] * std::log(p.zedges_[b + 1] / p.zedges_[b]);
  p.hist_norm_ = e_inv / alpha;
  return p;
}

double StationaryProfile::f_Zinf(double z) const {
  if (!(z > 0.0)) throw ConfigError("f_Zinf: requires z > 0");
  switch (form_) {
    case Form::gen_gamma: {
      const double c = beta_ / alpha_;
      return std::exp(c * std::log(z) - z - log_gamma(1.0 + c));
    }
    case Form::beta_gamma_product:
      return beta_gamma_product_pdf(a1_, a_, a2_, z);
    case Form::histogram: {
      if (z < zedges_.front() || z >= zedges_.back()) return 0.0;
      const auto it = std::upper_bound(zedges_.begin(), zedges_.end(), z);
      const std::size_t b = static_cast<std::size_t>(it - zedges_.begin());
      return zdens_[std::min(b - 1, zdens_.size() - 1)];
    }
  }
  return 0.0;
}

double StationaryProfile::u_star(double x) const {
  if (!(x > 0.0)) throw ConfigError("u_star: requires x > 0");
  if (form_ == Form::gen_gamma) {
    return std::exp(std::log(alpha_) - log_gamma(beta_ / alpha_) +
                    (beta_ - 2.0) * std::log(x) - std::pow(x, alpha_));
  }
  return f_Zinf(std::pow(x, alpha_)) / (norm_used() * x * x);
}

double StationaryProfile::cell_mass(double lo, double hi) const {
  if (!(lo >= 0.0) || !(hi > lo)) throw ConfigError("cell_mass: requires 0 <= lo < hi");
  if (form_ == Form::histogram) {
    // (1/(alpha L)) int f_Z(z)/z dz over [lo^alpha, hi^alpha), bin-exact.
    const double zl = std::pow(lo, alpha_), zh = std::pow(hi, alpha_);
    double sum = 0.0;
    for (std::size_t b = 0; b < zdens_.size(); ++b) {
      const double a = std::max(zl, zedges_[b]);
      const double c = std::min(zh, zedges_[b + 1]);
      if (a < c && zdens_[b] > 0.0) sum += zdens_[b] * std::log(c / a);
    }
    return sum / (alpha_ * hist_norm_);
  }
  const double start = std::max(lo, 0.0);
  return integrate([this](double x) { return x > 0.0 ? mass_density(x) : 0.0; }, start, hi,
                   QuadratureSpec{1e-10, 200});
}

double StationaryProfile::mass_total() const {
  if (form_ == Form::histogram) {
    double e_inv = 0.0;
    for (std::size_t b = 0; b < zdens_.size(); ++b)
      e_inv += zdens_[b] * std::log(zedges_[b + 1] / zedges_[b]);
    return e_inv / (alpha_ * hist_norm_);
  }
  // e^{-x^alpha} is below double underflow past x = 745^{1/alpha}.
  const double x_hi = std::pow(745.0, 1.0 / alpha_);
  return cell_mass(0.0, x_hi);
}

double StationaryProfile::self_similar_prop_form(double t, double x) const {
  if (!(t >= 0.0)) throw ConfigError("self_similar: requires t >= 0");
  if (!(x > 0.0)) throw ConfigError("self_similar: requires x > 0");
  const double z = (1.0 + t) * std::pow(x, alpha_);
  return f_Zinf(z) / (norm_used() * x * x);
}

double StationaryProfile::self_similar_scaling_form(double t, double x) const {
  if (!(t >= 0.0)) throw ConfigError("self_similar: requires t >= 0");
  if (!(x > 0.0)) throw ConfigError("self_similar: requires x > 0");
  const double gamma = std::pow(1.0 + t, 1.0 / alpha_);
  return gamma * gamma * u_star(gamma * x);
}

SelfSimilarValue self_similar_density(const StationaryProfile& prof, double t, double x) {
  return {prof.self_similar_prop_form(t, x), prof.self_similar_scaling_form(t, x)};
}

}  // namespace fragsim
