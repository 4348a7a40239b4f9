#pragma once

#include <cmath>

namespace splearn {

/// Student-t density, CDF, survival and quantile for real df > 0.
/// The CDF/survival pair is evaluated through the regularized incomplete
/// beta function so the tails keep full relative precision; never compute a
/// tail probability as 1 - cdf.
double student_t_pdf(double df, double x);
double student_t_cdf(double df, double x);
double student_t_sf(double df, double x);
double student_t_quantile(double df, double p);

/// Regularized incomplete beta I_x(a, b) by Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

/// Partial moments of the standard t over (lo, hi), infinite endpoints
/// allowed: M0 = mass, M1 = first moment (df > 1), M2 = second moment
/// (df > 2). These are closed forms, exact up to CDF accuracy, and remain
/// relatively accurate arbitrarily far into the tails.
double student_t_mass(double df, double lo, double hi);
double student_t_partial_m1(double df, double lo, double hi);
double student_t_partial_m2(double df, double lo, double hi);

/// Adaptive Gauss-7/Kronrod-15 quadrature on a bounded interval.
template <typename F>
double adaptive_gk(F&& f, double lo, double hi, double rel_tol = 1e-10,
                   double abs_tol = 1e-14, int max_depth = 48);

namespace detail {
double gk15(const double* xgk, const double* wgk, const double* wg,
            double (*eval)(void*, double), void* ctx, double lo, double hi,
            double* gauss_out);
extern const double kGk15Nodes[8];
extern const double kGk15Weights[8];
extern const double kGauss7Weights[4];

template <typename F>
struct GkAdapter {
  F* f;
  static double eval(void* ctx, double x) {
    return (*static_cast<GkAdapter*>(ctx)->f)(x);
  }
};

template <typename F>
double adaptive_gk_impl(F& f, double lo, double hi, double rel_tol,
                        double abs_tol, int depth) {
  GkAdapter<F> ad{&f};
  double gauss = 0.0;
  const double kron = gk15(kGk15Nodes, kGk15Weights, kGauss7Weights,
                           &GkAdapter<F>::eval, &ad, lo, hi, &gauss);
  const double err = std::abs(kron - gauss);
  if (depth <= 0 || err <= abs_tol || err <= rel_tol * std::abs(kron))
    return kron;
  const double mid = 0.5 * (lo + hi);
  return adaptive_gk_impl(f, lo, mid, rel_tol, abs_tol, depth - 1) +
         adaptive_gk_impl(f, mid, hi, rel_tol, abs_tol, depth - 1);
}

}  // namespace detail

template <typename F>
double adaptive_gk(F&& f, double lo, double hi, double rel_tol, double abs_tol,
                   int max_depth) {
  return detail::adaptive_gk_impl(f, lo, hi, rel_tol, abs_tol, max_depth);
}

}  // namespace splearn
