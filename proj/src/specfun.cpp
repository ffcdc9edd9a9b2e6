#include "fragsim/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fragsim {

namespace {

// 15-point Kronrod abscissae/weights on [-1,1]; the embedded 7-point Gauss rule
// uses the odd-index abscissae. Standard QUADPACK constants.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double integral;
  double err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    res_k += kWgk[j] * fsum;
    if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
  }
  res_g *= h;
  res_k *= h;
  double err = std::abs(res_k - res_g);
  // QUADPACK-style sharpening of the raw difference.
  if (err > 0.0) err = std::pow(200.0 * err, 1.5);
  return {a, b, res_k, err};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& q) {
  q.validate();
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw ConfigError("integrate: requires a <= b");
  }
  std::vector<Panel> panels;
  panels.push_back(gk15(f, a, b));
  double total = panels[0].integral;
  double err = panels[0].err;
  const double abs_floor = 1e-300;
  int splits = 0;
  while (err > q.rel_tol * std::max(std::abs(total), abs_floor) && splits < q.max_subdivisions) {
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const Panel& p, const Panel& r) { return p.err < r.err; });
    const Panel p = *worst;
    panels.erase(worst);
    const double mid = 0.5 * (p.a + p.b);
    if (!(p.a < mid && mid < p.b)) {
      // Interval exhausted at machine precision; keep its contribution.
      panels.push_back({p.a, p.b, p.integral, 0.0});
    } else {
      panels.push_back(gk15(f, p.a, mid));
      panels.push_back(gk15(f, mid, p.b));
    }
    total = 0.0;
    err = 0.0;
    for (const Panel& pp : panels) {
      total += pp.integral;
      err += pp.err;
    }
    ++splits;
  }
  if (err > q.rel_tol * std::max(std::abs(total), abs_floor) &&
      err > 1e-12 * std::max(std::abs(total), abs_floor)) {
    throw QuadratureError("integrate: tolerance not reached within max_subdivisions", total, err);
  }
  return total;
}

double integrate_0inf(const std::function<double(double)>& f, const QuadratureSpec& q) {
  const double head = integrate(f, 0.0, 1.0, q);
  const double tail = integrate(
      [&f](double u) {
        if (u <= 0.0) return 0.0;
        const double s = 1.0 / u;
        return f(s) * s * s;
      },
      0.0, 1.0, q);
  return head + tail;
}

namespace {

// Lanczos coefficients, g = 607/128, 15 terms.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw ConfigError("log_gamma: requires x > 0");
  const double xm1 = x - 1.0;
  double sum = kLanczos[0];
  for (int i = 1; i < 15; ++i) sum += kLanczos[i] / (xm1 + i);
  const double t = xm1 + kLanczosG + 0.5;
  return kHalfLog2Pi + (xm1 + 0.5) * std::log(t) - t + std::log(sum);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw ConfigError("gamma_fn: requires x > 0");
  return std::exp(log_gamma(x));
}

double hyper_u(double a, double b, double x, const QuadratureSpec& q) {
  if (!(a > 0.0) || !(x > 0.0)) throw ConfigError("hyper_u: requires a > 0 and x > 0");
  if (a > 1e3 || std::abs(b) > 1e3 || x > 1e6)
    throw ConfigError("hyper_u: parameters capped at a,|b| <= 1e3, x <= 1e6");
  const double pw = b - a - 1.0;
  // Integral over s in (0,1].  For a < 1 the s -> 0 endpoint carries an
  // integrable power singularity; substitute s = v^{1/a}, which flattens it.
  double head;
  if (a < 1.0) {
    const double inv_a = 1.0 / a;
    head = integrate(
        [&](double v) {
          if (v <= 0.0) return 0.0;
          const double s = std::pow(v, inv_a);
          return inv_a * std::exp(-x * s) * std::pow(1.0 + s, pw);
        },
        0.0, 1.0, q);
  } else {
    head = integrate(
        [&](double s) {
          if (s <= 0.0) return (a == 1.0) ? std::pow(1.0, pw) : 0.0;
          return std::exp(-x * s) * std::pow(s, a - 1.0) * std::pow(1.0 + s, pw);
        },
        0.0, 1.0, q);
  }
  // Tail over s in [1,inf): substitute s = 1/u.
  const double tail = integrate(
      [&](double u) {
        if (u <= 0.0) return 0.0;
        return std::exp(-x / u) * std::pow(1.0 + u, pw) * std::pow(u, -b);
      },
      0.0, 1.0, q);
  return std::exp(-log_gamma(a)) * (head + tail);
}

double beta_gamma_product_pdf(double a1, double a, double a2, double x,
                              const QuadratureSpec& q) {
  if (!(a1 > 0.0) || !(a > 0.0) || !(a2 > 0.0))
    throw ConfigError("beta_gamma_product_pdf: parameters must be positive");
  if (!(x > 0.0)) throw ConfigError("beta_gamma_product_pdf: requires x > 0");
  const double log_coef = log_gamma(1.0 + a1 + a) - log_gamma(1.0 + a1) - log_gamma(1.0 + a2);
  const double u = hyper_u(a, 1.0 + a2 - a1, x, q);
  const double v = std::exp(log_coef - x + a2 * std::log(x)) * u;
  return std::max(v, 0.0);
}

double scale_mixture_pdf(const Density& f_xi, const Density& f_theta, double x,
                         const QuadratureSpec& q) {
  if (!(x > 0.0)) throw ConfigError("scale_mixture_pdf: requires x > 0");
  // f(x) = int_x^inf f_theta(x/r) (1/r) f_xi(r) dr; substituting theta = x/r
  // turns it into an integral over theta in (0,1) intersected with the supports.
  double lo = std::max(f_theta.lo, 0.0);
  double hi = std::min(f_theta.hi, 1.0);
  if (std::isfinite(f_xi.hi)) lo = std::max(lo, x / f_xi.hi);
  if (f_xi.lo > 0.0) hi = std::min(hi, x / f_xi.lo);
  if (!(lo < hi)) return 0.0;
  return integrate(
      [&](double th) {
        if (th <= 0.0) return 0.0;
        return f_theta.pdf(th) * f_xi.pdf(x / th) / th;
      },
      lo, hi, q);
}

}  // namespace fragsim
