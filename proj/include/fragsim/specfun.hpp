#pragma once

#include <functional>
#include <limits>

#include "fragsim/errors.hpp"

namespace fragsim {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  int max_subdivisions = 200;

  void validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-4)
      throw ConfigError("QuadratureSpec: rel_tol must lie in (0, 1e-4]");
    if (max_subdivisions < 10)
      throw ConfigError("QuadratureSpec: max_subdivisions must be >= 10");
  }
};

/// Adaptive Gauss-Kronrod (7,15) integration of f over the finite interval [a,b].
/// Bisects the worst subinterval until the error estimate drops below
/// rel_tol * |integral| (plus an absolute floor for integrals near zero).
/// Throws QuadratureError with the partial estimate on non-convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& q = {});

/// Integral of f over (0, +inf), split at 1 with the 1/s substitution on the tail.
double integrate_0inf(const std::function<double(double)>& f, const QuadratureSpec& q = {});

/// Gamma function for x > 0 (Lanczos approximation, relative error < 1e-13).
double gamma_fn(double x);

/// log Gamma(x) for x > 0; preferred for ratios of large Gamma values.
double log_gamma(double x);

/// Confluent hypergeometric function of the second kind,
///   U(a,b,x) = (1/Gamma(a)) \int_0^inf e^{-xs} s^{a-1} (1+s)^{b-a-1} ds,
/// for a, x > 0 and real b. Computed from the integral representation only;
/// parameters are capped at 1e3 (conditioning beyond that is not handled).
double hyper_u(double a, double b, double x, const QuadratureSpec& q = {});

/// Density of the product B * G where B ~ Beta(1+a1, a) and G ~ Gamma(1+a2):
///   f(x) = Gamma(1+a1+a)/(Gamma(1+a1) Gamma(1+a2)) e^{-x} x^{a2} U(a, 1+a2-a1, x).
double beta_gamma_product_pdf(double a1, double a, double a2, double x,
                              const QuadratureSpec& q = {});

/// A density given as an evaluator plus its support.
struct Density {
  std::function<double(double)> pdf;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// Density of xi * theta for independent xi on (0,inf) and theta on (0,1):
///   f(x) = \int_x^inf f_theta(x/r) (1/r) f_xi(r) dr.
/// Both inputs must integrate to 1 (caller-asserted).
double scale_mixture_pdf(const Density& f_xi, const Density& f_theta, double x,
                         const QuadratureSpec& q = {});

}  // namespace fragsim
