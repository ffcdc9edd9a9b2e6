#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fragsim/rng.hpp"

namespace testsupport {

/// Deterministic stream that cycles through fixed exponential/uniform values.
struct StubStream {
  std::vector<double> exps{1.0};
  std::vector<double> unis{0.5};
  std::size_t ei = 0, ui = 0;
  double exponential() { return exps[ei++ % exps.size()]; }
  double uniform() { return unis[ui++ % unis.size()]; }
};

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double gap = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    gap = std::max(gap, std::abs((i + 1) / n - f));
    gap = std::max(gap, std::abs(i / n - f));
  }
  return gap;
}

/// Plain composite Simpson rule; deliberately independent of the library's
/// adaptive Gauss-Kronrod machinery so it can serve as an oracle for it.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels) {
  const double h = (b - a) / (2 * panels);
  double sum = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) sum += f(a + h * i) * ((i % 2) ? 4.0 : 2.0);
  return sum * h / 3.0;
}

struct MeanSe {
  double mean = 0.0, se = 0.0;
  long n = 0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  r.n = static_cast<long>(v.size());
  double m2 = 0.0;
  for (long i = 0; i < r.n; ++i) {
    const double d = v[static_cast<std::size_t>(i)] - r.mean;
    r.mean += d / static_cast<double>(i + 1);
    m2 += d * (v[static_cast<std::size_t>(i)] - r.mean);
  }
  if (r.n > 1) r.se = std::sqrt(m2 / (r.n - 1.0) / static_cast<double>(r.n));
  return r;
}

inline double normal_draw(fragsim::RngStream& rng) {
  const double u1 = rng.uniform(), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Marsaglia-Tsang gamma sampler (unit scale).
inline double gamma_draw(fragsim::RngStream& rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal_draw(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

inline double beta_draw(fragsim::RngStream& rng, double a, double b) {
  const double x = gamma_draw(rng, a);
  const double y = gamma_draw(rng, b);
  return x / (x + y);
}

}  // namespace testsupport
