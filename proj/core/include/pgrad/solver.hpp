#pragma once

#include <span>
#include <vector>

#include "pgrad/grid.hpp"

namespace pgrad {

// How missing neighbors enter the per-cell gradient. Interior cells always
// use centered differences; at the mask boundary:
//   one_sided  - difference toward the available neighbor (BC-agnostic),
//   dirichlet  - the exposed face carries the value 0,
//   neumann    - the exposed face carries zero normal derivative.
enum class GradMode { one_sided, dirichlet, neumann };

struct SolveResult {
  std::vector<double> u;
  std::vector<double> grad_mag;  // per-cell |grad u|, BC-consistent mode
  double grad_sup = 0.0;
  double energy = 0.0;           // discrete objective at the final iterate
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  // Objective after every accepted step on the final continuation rung;
  // nonincreasing by construction of the line search.
  std::vector<double> energy_history;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_outer = 100;   // Kacanov iterations per continuation rung
  int max_cg = 20000;    // inner CG iteration cap
  bool continuation = true;
};

// Per-cell gradient components (dim entries used) and magnitude field.
std::vector<std::array<double, 3>> grad_components(std::span<const double> u,
                                                   const GridGeometry& geom,
                                                   GradMode mode);
std::vector<double> grad_field(std::span<const double> u,
                               const GridGeometry& geom,
                               GradMode mode = GradMode::one_sided);

// Discrete energy: sum over active cells of
// [B_eps(|grad u|) - f u] * cell_volume, with the BC-agnostic one_sided
// gradient. The solver's internal line-search objective uses the
// BC-consistent gradient instead (see energy_with_mode).
double energy(std::span<const double> u, const GridProblem& problem);
double energy_with_mode(std::span<const double> u, const GridProblem& problem,
                        GradMode mode);

// sum of B_eps(grad_mag) * cell_volume over active cells.
double gradient_integral_B(const SolveResult& result,
                           const GridProblem& problem);

// Minimizes the discrete energy by damped successive linearization: each
// step freezes the coefficient tensor at the face gradients of the current
// iterate (plain frozen a_eps at p = 2, the full derivative tensor away
// from it, since the scalar frozen-coefficient iteration cycles for p > 2),
// solves the SPD linear problem by diagonally preconditioned CG with inner
// tolerance slaved to 0.1x the outer residual, and backtracks on the
// energy. The residual is the scaled norm of the discrete energy gradient.
// Whenever |p-2| > 1 (and always for the degenerate target eps = 0, p > 2)
// epsilon is approached through the ladder {1, 1e-1, ..., eps}.
// Non-convergence is reported through the result (best iterate, residual,
// converged = false), not thrown.
SolveResult solve(const GridProblem& problem, const SolverOptions& options);
SolveResult solve(const GridProblem& problem, double tol, int max_iter);

}  // namespace pgrad
