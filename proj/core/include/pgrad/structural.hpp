#pragma once

#include <stdexcept>

namespace pgrad {

// Parameters of the regularized coefficient family a_eps(t) = (t^2+eps)^((p-2)/2).
// eps = 0 is admitted and selects the plain power-law operator t^(p-2); the
// functions below switch to exact closed forms there.
struct StructuralParams {
  double p;
  double epsilon;

  StructuralParams(double p_, double epsilon_);
};

// Lower/upper growth indices of a coefficient function: inf/sup of t a'(t)/a(t).
struct GrowthBounds {
  double i_a;
  double s_a;

  GrowthBounds(double i, double s);
};

// Thrown when adaptive quadrature cannot meet the requested tolerance; carries
// the error estimate actually achieved.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

// a_eps(t) = (t^2 + eps)^((p-2)/2). Singular at t = 0 when eps = 0 and p < 2.
double a_eps(double t, const StructuralParams& params);

// b_eps(t) = a_eps(t) t, strictly increasing with b_eps(0) = 0.
double b_eps(double t, const StructuralParams& params);

// Analytic derivative a_eps(t) (1 + (p-2) t^2/(t^2+eps)).
double b_eps_prime(double t, const StructuralParams& params);

// B_eps(t) = integral of b_eps over [0,t] = ((t^2+eps)^(p/2) - eps^(p/2)) / p.
// Evaluated through expm1/log1p so the small-t cancellation against eps^(p/2)
// costs no relative accuracy.
double B_eps(double t, const StructuralParams& params);

// F_eps(t) = integral of b_eps(s)^2 over [0,t], adaptive quadrature to the
// given relative tolerance. Exact branches: eps = 0 -> t^(2p-1)/(2p-1),
// p = 2 -> t^3/3.
double F_eps(double t, const StructuralParams& params, double tol = 1e-10);

// Inverse of b_eps by bracketed bisection; exact s^(1/(p-1)) when eps = 0.
// The result satisfies |b_eps(t) - s| <= tol * max(1, s).
double b_eps_inv(double s, const StructuralParams& params, double tol = 1e-13);

// psi_eps(s) = s b_eps^{-1}(s).
double psi_eps(double s, const StructuralParams& params);

// Inverse of Bhat_eps(t) = B_eps(t)/t (strictly increasing), by bracketed
// bisection seeded with the eps = 0 closed form t = (p s)^(1/(p-1)).
double Bhat_inv(double s, const StructuralParams& params, double tol = 1e-13);

// Growth indices of a_eps: (min{p-2,0}, max{p-2,0}) for eps > 0, and the
// degenerate pair (p-2, p-2) for the unregularized operator eps = 0.
GrowthBounds growth_indices(const StructuralParams& params);

}  // namespace pgrad
