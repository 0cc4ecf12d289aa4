#pragma once

#include "pgrad/structural.hpp"

namespace pgrad {

// Domain-dependent configuration. The geometric quantities are abstract
// inputs here (estimating them from an actual boundary is out of scope);
// the neutral default 1 leaves only the p-scaling visible.
struct GeometryConstants {
  double c_omega = 1.0;        // lower trace constant c_Omega
  double C_doubleprime = 1.0;  // the constant C'' of the energy lemma
  double volume = 1.0;         // |Omega|
  double boundary_area = 1.0;  // |dOmega|
  double k_norm_theta1 = 1.0;  // ||k||_{theta,1} of the curvature function
  double theta = 3.0;          // Lorentz exponent of the boundary regularity

  void validate(int N) const;
};

enum class Regime { boundary_W2Ltheta1, convex };
enum class SourceSpace { lorentz_N1, lebesgue_q };

// One sweep point of the gradient-bound harness.
struct BoundReport {
  double p = 0.0;
  double grad_sup_pow = 0.0;  // ||grad u_p||_inf^(p-1)
  double source_norm = 0.0;   // ||f||_{N,1} or ||f||_q
  double factor = 0.0;        // theorem p-factor
  double ratio = 0.0;         // grad_sup_pow / (factor * source_norm)
  int grid_n = 0;
  bool converged = false;
};

BoundReport make_bound_report(double p, double grad_sup, double source_norm,
                              double factor, int grid_n, bool converged);

// C_p = 2^(1/(p-1)) for 1 < p < 2, p for p >= 2; both branches give 2 at p = 2.
double C_p(double p);

// K_p = 3 for 1 < p < 2, 2p-1 for p >= 2.
double K_p(double p);

// xi_p = min{p-1, 1} / 2.
double xi_p(double p);

// m(c,p), M(c,p): min/max of {2c, 2c^(p-1), pc, pc^(p-1)}.
double m_cp(double c, double p);
double M_cp(double c, double p);

// S1 = max{2,p} C_p = 2^(p/(p-1)) for p < 2, p^2 for p >= 2.
double S1(double p);

// Cbar of the boundary-regularity regime, N >= 3:
// ((c_Omega^(1/theta)) / (N' ||k||_{theta,1}))^(theta N/(theta-(N-1))).
double Cbar(const GeometryConstants& geo, int N);
// N = 2 variant: (2 ||k||_{theta,1} c_Omega^(-1/theta))^(-2 theta/(theta-1)).
double Cbar_2d(const GeometryConstants& geo);

// C_{N,Omega} = min{ (|dOmega|/c_Omega)^{N'}, |Omega|/2, C'' }.
double C_N_Omega(const GeometryConstants& geo, int N);

// sbar_p = Cbar ((p-1)/6)^E for p < 2, Cbar (1/(2(2p-1)))^E for p >= 2,
// with E = theta N/(theta-(N-1)). Requires N >= 3; use sbar_p_2d for N = 2.
double sbar_p(double p, int N, const GeometryConstants& geo);
// Same with E = 2 theta/(theta-1) and the 2d Cbar.
double sbar_p_2d(double p, const GeometryConstants& geo);

// s_p = |Omega|/2 for convex domains, min{C_{N,Omega}, sbar_p} otherwise.
double s_p(double p, int N, const GeometryConstants& geo, bool convex);

// S2 = C'' S1 / s_p.
double S2(double p, double s_p_val, double C_doubleprime);

// S3 = sqrt(C K_p) S2 + 2 (C K_p + 1) / min{p-1, 1}. C is the abstract
// domain constant of the pointwise estimate chain (configuration).
double S3(double p, double S2_val, double C_env);

// The bracketed p-factor of the matching theorem branch, e.g.
// boundary/lorentz: 2^(p/(p-1)) (p-1)^(-theta N/(theta-(N-1))) for p < 2 and
// p^(5/2 + theta N/(theta-(N-1))) for p >= 2; convex drops the theta term.
// lorentz_N1 requires N >= 3, lebesgue_q requires N = 2.
double theorem_factor(double p, int N, double theta, Regime regime,
                      SourceSpace space);

// Lambda(i_a, s_a): the general-operator factor with s+ = max{s_a,0} and
// i- = min{i_a,0} substituted throughout,
//   sqrt(3+2s+) (2+s+)^((2+i-)/(1+i-)) [ ((3+2s+)/(1+i-))^(theta N/(theta-(N-1))) ]
//     + (4+2s+)/(1+i-),
// the bracketed power present only in the nonconvex regime.
double lambda_general(const GrowthBounds& g, int N, double theta, bool convex);

// The last additive term of the convex formula admits a second reading in
// which s_a enters unclamped; both are surfaced so the discrepancy for
// s_a < 0 is visible.
struct LambdaReadings {
  double primary;        // (4 + 2 max{s_a,0}) / (1 + min{i_a,0})
  double unclamped_tail; // (4 + 2 s_a) / (1 + min{i_a,0})
};
LambdaReadings lambda_general_readings(const GrowthBounds& g, int N,
                                       double theta, bool convex);

}  // namespace pgrad
