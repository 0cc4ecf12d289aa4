#include "pgrad/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pgrad {

namespace {

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::domain_error("constants: p must be finite and > 1");
}

double theta_exponent(double theta, int N) {
  return theta * N / (theta - (N - 1));
}

}  // namespace

void GeometryConstants::validate(int N) const {
  if (!(c_omega > 0.0 && C_doubleprime > 0.0 && volume > 0.0 &&
        boundary_area > 0.0 && k_norm_theta1 > 0.0))
    throw std::invalid_argument("GeometryConstants: all fields must be > 0");
  if (!(theta > N - 1))
    throw std::invalid_argument("GeometryConstants: theta must exceed N-1");
}

BoundReport make_bound_report(double p, double grad_sup, double source_norm,
                              double factor, int grid_n, bool converged) {
  BoundReport r;
  r.p = p;
  r.grad_sup_pow = std::pow(grad_sup, p - 1.0);
  r.source_norm = source_norm;
  r.factor = factor;
  const double denom = factor * source_norm;
  if (denom > 0.0)
    r.ratio = r.grad_sup_pow / denom;
  else
    r.ratio = r.grad_sup_pow == 0.0
                  ? 0.0
                  : std::numeric_limits<double>::infinity();
  r.grid_n = grid_n;
  r.converged = converged;
  return r;
}

double C_p(double p) {
  require_p(p);
  return p < 2.0 ? std::pow(2.0, 1.0 / (p - 1.0)) : p;
}

double K_p(double p) {
  require_p(p);
  return p < 2.0 ? 3.0 : 2.0 * p - 1.0;
}

double xi_p(double p) {
  require_p(p);
  return 0.5 * std::min(p - 1.0, 1.0);
}

double m_cp(double c, double p) {
  require_p(p);
  if (!(c > 0.0)) throw std::domain_error("m_cp: c must be > 0");
  const double cp = std::pow(c, p - 1.0);
  return std::min(std::min(2.0 * c, 2.0 * cp), std::min(p * c, p * cp));
}

double M_cp(double c, double p) {
  require_p(p);
  if (!(c > 0.0)) throw std::domain_error("M_cp: c must be > 0");
  const double cp = std::pow(c, p - 1.0);
  return std::max(std::max(2.0 * c, 2.0 * cp), std::max(p * c, p * cp));
}

double S1(double p) {
  require_p(p);
  return p < 2.0 ? std::pow(2.0, p / (p - 1.0)) : p * p;
}

double Cbar(const GeometryConstants& geo, int N) {
  if (N < 3) throw std::invalid_argument("Cbar: N must be >= 3");
  geo.validate(N);
  const double nprime = N / (N - 1.0);
  const double base =
      std::pow(geo.c_omega, 1.0 / geo.theta) / (nprime * geo.k_norm_theta1);
  return std::pow(base, theta_exponent(geo.theta, N));
}

double Cbar_2d(const GeometryConstants& geo) {
  geo.validate(2);
  const double base =
      2.0 * geo.k_norm_theta1 * std::pow(geo.c_omega, -1.0 / geo.theta);
  return std::pow(base, -2.0 * geo.theta / (geo.theta - 1.0));
}

double C_N_Omega(const GeometryConstants& geo, int N) {
  if (N < 2) throw std::invalid_argument("C_N_Omega: N must be >= 2");
  geo.validate(N);
  const double nprime = N / (N - 1.0);
  const double trace_term = std::pow(geo.boundary_area / geo.c_omega, nprime);
  return std::min(std::min(trace_term, 0.5 * geo.volume), geo.C_doubleprime);
}

namespace {

double sbar_branch(double p, double exponent, double cbar) {
  const double base = p < 2.0 ? (p - 1.0) / 6.0 : 1.0 / (2.0 * (2.0 * p - 1.0));
  return cbar * std::pow(base, exponent);
}

}  // namespace

double sbar_p(double p, int N, const GeometryConstants& geo) {
  require_p(p);
  if (N < 3) throw std::invalid_argument("sbar_p: N must be >= 3 (sbar_p_2d for N = 2)");
  geo.validate(N);
  return sbar_branch(p, theta_exponent(geo.theta, N), Cbar(geo, N));
}

double sbar_p_2d(double p, const GeometryConstants& geo) {
  require_p(p);
  geo.validate(2);
  return sbar_branch(p, 2.0 * geo.theta / (geo.theta - 1.0), Cbar_2d(geo));
}

double s_p(double p, int N, const GeometryConstants& geo, bool convex) {
  require_p(p);
  if (convex) return 0.5 * geo.volume;
  const double sbar = N >= 3 ? sbar_p(p, N, geo) : sbar_p_2d(p, geo);
  return std::min(C_N_Omega(geo, N), sbar);
}

double S2(double p, double s_p_val, double C_doubleprime) {
  require_p(p);
  if (!(s_p_val > 0.0)) throw std::domain_error("S2: s_p must be > 0");
  return C_doubleprime * S1(p) / s_p_val;
}

double S3(double p, double S2_val, double C_env) {
  require_p(p);
  if (!(S2_val > 0.0 && C_env > 0.0))
    throw std::domain_error("S3: S2 and C must be > 0");
  const double ck = C_env * K_p(p);
  return std::sqrt(ck) * S2_val + 2.0 * (ck + 1.0) / std::min(p - 1.0, 1.0);
}

double theorem_factor(double p, int N, double theta, Regime regime,
                      SourceSpace space) {
  require_p(p);
  if (space == SourceSpace::lorentz_N1 && N < 3)
    throw std::invalid_argument("theorem_factor: L^{N,1} source requires N >= 3");
  if (space == SourceSpace::lebesgue_q && N != 2)
    throw std::invalid_argument("theorem_factor: L^q source requires N = 2");
  double expo = 0.0;
  if (regime == Regime::boundary_W2Ltheta1) {
    if (!(theta > N - 1))
      throw std::invalid_argument("theorem_factor: theta must exceed N-1");
    expo = theta_exponent(theta, N);
  }
  if (p < 2.0)
    return std::pow(2.0, p / (p - 1.0)) * std::pow(p - 1.0, -expo);
  return std::pow(p, 2.5 + expo);
}

namespace {

double lambda_core(double s_plus, double i_minus, int N, double theta,
                   bool convex) {
  double core = std::sqrt(3.0 + 2.0 * s_plus) *
                std::pow(2.0 + s_plus, (2.0 + i_minus) / (1.0 + i_minus));
  if (!convex) {
    if (!(theta > N - 1))
      throw std::invalid_argument("lambda_general: theta must exceed N-1");
    core *= std::pow((3.0 + 2.0 * s_plus) / (1.0 + i_minus),
                     theta_exponent(theta, N));
  }
  return core;
}

}  // namespace

double lambda_general(const GrowthBounds& g, int N, double theta, bool convex) {
  const double s_plus = std::max(g.s_a, 0.0);
  const double i_minus = std::min(g.i_a, 0.0);
  return lambda_core(s_plus, i_minus, N, theta, convex) +
         (4.0 + 2.0 * s_plus) / (1.0 + i_minus);
}

LambdaReadings lambda_general_readings(const GrowthBounds& g, int N,
                                       double theta, bool convex) {
  const double s_plus = std::max(g.s_a, 0.0);
  const double i_minus = std::min(g.i_a, 0.0);
  const double core = lambda_core(s_plus, i_minus, N, theta, convex);
  return LambdaReadings{core + (4.0 + 2.0 * s_plus) / (1.0 + i_minus),
                        core + (4.0 + 2.0 * g.s_a) / (1.0 + i_minus)};
}

}  // namespace pgrad
