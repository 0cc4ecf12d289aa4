#include "pgrad/structural.hpp"

#include <cmath>
#include <string>

#include "pgrad/quadrature.hpp"

namespace pgrad {

namespace {

void require_nonneg_arg(double t, const char* name) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::domain_error(std::string(name) + " must be finite and >= 0");
}

}  // namespace

StructuralParams::StructuralParams(double p_, double epsilon_)
    : p(p_), epsilon(epsilon_) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("StructuralParams: p must be > 1");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("StructuralParams: epsilon must be >= 0");
}

GrowthBounds::GrowthBounds(double i, double s) : i_a(i), s_a(s) {
  if (!(i_a > -1.0))
    throw std::invalid_argument("GrowthBounds: i_a must be > -1");
  if (!(i_a <= s_a) || !std::isfinite(s_a))
    throw std::invalid_argument("GrowthBounds: need i_a <= s_a < inf");
}

double a_eps(double t, const StructuralParams& params) {
  require_nonneg_arg(t, "a_eps: t");
  const double p = params.p, eps = params.epsilon;
  if (eps == 0.0) {
    if (t == 0.0) {
      if (p < 2.0)
        throw std::domain_error("a_eps: singular at t = 0 for eps = 0, p < 2");
      return p == 2.0 ? 1.0 : 0.0;
    }
    return std::pow(t, p - 2.0);
  }
  return std::pow(t * t + eps, 0.5 * (p - 2.0));
}

double b_eps(double t, const StructuralParams& params) {
  require_nonneg_arg(t, "b_eps: t");
  const double p = params.p, eps = params.epsilon;
  if (eps == 0.0) return std::pow(t, p - 1.0);
  if (t == 0.0) return 0.0;
  return std::pow(t * t + eps, 0.5 * (p - 2.0)) * t;
}

double b_eps_prime(double t, const StructuralParams& params) {
  require_nonneg_arg(t, "b_eps_prime: t");
  const double p = params.p, eps = params.epsilon;
  if (eps == 0.0) {
    if (t == 0.0) {
      if (p < 2.0)
        throw std::domain_error(
            "b_eps_prime: singular at t = 0 for eps = 0, p < 2");
      return p == 2.0 ? 1.0 : 0.0;
    }
    return (p - 1.0) * std::pow(t, p - 2.0);
  }
  const double ratio = t * t / (t * t + eps);
  return a_eps(t, params) * (1.0 + (p - 2.0) * ratio);
}

double B_eps(double t, const StructuralParams& params) {
  require_nonneg_arg(t, "B_eps: t");
  const double p = params.p, eps = params.epsilon;
  if (t == 0.0) return 0.0;
  if (eps == 0.0) return std::pow(t, p) / p;
  // ((t^2+eps)^(p/2) - eps^(p/2))/p without cancellation for t^2 << eps.
  return std::pow(eps, 0.5 * p) * std::expm1(0.5 * p * std::log1p(t * t / eps)) / p;
}

double F_eps(double t, const StructuralParams& params, double tol) {
  require_nonneg_arg(t, "F_eps: t");
  if (!(tol > 0.0)) throw std::invalid_argument("F_eps: tol must be > 0");
  const double p = params.p, eps = params.epsilon;
  if (t == 0.0) return 0.0;
  if (eps == 0.0) return std::pow(t, 2.0 * p - 1.0) / (2.0 * p - 1.0);
  if (p == 2.0) return t * t * t / 3.0;
  auto integrand = [&](double s) {
    const double b = b_eps(s, params);
    return b * b;
  };
  QuadratureResult q = integrate_adaptive(integrand, 0.0, t, tol);
  if (!q.converged) {
    const double rel =
        q.error_estimate / (std::abs(q.value) > 0.0 ? std::abs(q.value) : 1.0);
    throw QuadratureError(
        "F_eps: quadrature did not reach tol, achieved relative error " +
            std::to_string(rel),
        rel);
  }
  return q.value;
}

namespace {

// Bracketed bisection for a strictly increasing g with g(0) = 0.
// Returns t with g(t) = target to machine-level relative width and
// |g(t) - target| <= tol * max(1, target).
template <class G>
double invert_increasing(G&& g, double target, double seed, double tol,
                         const char* name) {
  if (target == 0.0) return 0.0;
  double hi = seed > 0.0 && std::isfinite(seed) ? seed : 1.0;
  int guard = 0;
  while (g(hi) < target) {
    hi *= 2.0;
    if (++guard > 2000) throw std::runtime_error(std::string(name) + ": no upper bracket");
  }
  double lo = 0.0;
  if (g(hi * 0.5) <= target) {
    lo = hi * 0.5;  // tighten when the doubling overshot just once
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (g(mid) < target)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) <= 1e-15 * hi) {
      const double val = g(0.5 * (lo + hi));
      if (std::abs(val - target) <= tol * std::max(1.0, target)) break;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double b_eps_inv(double s, const StructuralParams& params, double tol) {
  require_nonneg_arg(s, "b_eps_inv: s");
  const double p = params.p, eps = params.epsilon;
  if (eps == 0.0) return std::pow(s, 1.0 / (p - 1.0));
  const double seed = std::pow(s, 1.0 / (p - 1.0));
  return invert_increasing([&](double t) { return b_eps(t, params); }, s, seed,
                           tol, "b_eps_inv");
}

double psi_eps(double s, const StructuralParams& params) {
  require_nonneg_arg(s, "psi_eps: s");
  if (s == 0.0) return 0.0;
  return s * b_eps_inv(s, params);
}

double Bhat_inv(double s, const StructuralParams& params, double tol) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::domain_error("Bhat_inv: s must be finite and > 0");
  const double p = params.p, eps = params.epsilon;
  const double seed = std::pow(p * s, 1.0 / (p - 1.0));
  if (eps == 0.0) return seed;
  auto bhat = [&](double t) { return t > 0.0 ? B_eps(t, params) / t : 0.0; };
  return invert_increasing(bhat, s, seed, tol, "Bhat_inv");
}

GrowthBounds growth_indices(const StructuralParams& params) {
  const double p = params.p;
  if (params.epsilon == 0.0) return GrowthBounds(p - 2.0, p - 2.0);
  return GrowthBounds(std::min(p - 2.0, 0.0), std::max(p - 2.0, 0.0));
}

}  // namespace pgrad
