#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pgrad/constants.hpp"
#include "pgrad/rearrange.hpp"
#include "pgrad/solver.hpp"

namespace pgrad {

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration of a p-sweep: the problem template (everything but p), the
// source-space/regime pair of the bound to test, and the grid levels to
// refine across. Parsed from a "key = value" per line file.
struct SweepConfig {
  std::vector<double> p_list;
  Shape shape = Shape::square;
  BoundaryKind bc = BoundaryKind::dirichlet;
  std::string source = "gaussian";  // builtin name or path to a grid csv
  SourceSpace space = SourceSpace::lebesgue_q;
  double q = 4.0;
  double theta = 3.0;
  Regime regime = Regime::convex;
  std::vector<int> grid_levels;
  double eps = 1e-6;
  double tol = 1e-8;
  int max_iter = 100;
  std::uint64_t seed = 42;
  GeometryConstants geo;

  int dim() const;
  void validate() const;

  static SweepConfig from_stream(std::istream& in);
  static SweepConfig from_file(const std::string& path);
};

// Builtin sources on a grid: "zero", "one", "sine" (the product eigenfunction
// load 2 pi^2 sin(pi x) sin(pi y), resp. 3 pi^2 in 3d), "gaussian" (single
// bump), "gaussian-pair" (two opposite bumps). For Neumann problems the
// samples are shifted to exact zero mean over the active cells.
std::vector<double> make_source(const GridGeometry& geom,
                                const std::string& name, BoundaryKind bc);

GridProblem make_problem(const SweepConfig& cfg, double p, int n);

// The source norm the theorem branch calls for, computed from the gridded
// source viewed as a SampledFunction (the discretization of f is the ground
// truth for the whole pipeline).
double source_norm(const GridProblem& problem, SourceSpace space, double q);

struct SweepPoint {
  BoundReport report;
  double lemma214_ratio = 0.0;
};

// Solve every (p, grid level) combination; failures are recorded as
// non-converged reports instead of aborting the sweep. Reports come back
// sorted by (p, grid_n).
std::vector<SweepPoint> run_sweep_detailed(const SweepConfig& cfg);
std::vector<BoundReport> run_sweep(const SweepConfig& cfg);

struct ShapeVerdict {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double stability = 0.0;  // worst relative ratio change between the levels
  bool pass = false;
};

// Boundedness/stability check of the normalized ratios between two grid
// levels; the paper's constant is abstract, so only the shape is checkable.
ShapeVerdict check_bound_shape(const std::vector<BoundReport>& reports,
                               std::pair<int, int> refinement_pair);

// Energy lemma ratio: integral of B_eps(|grad u|) over the domain divided by
// C'' C_p psi_eps(||f||). Returns 0 when both sides vanish.
double check_lemma_2_14(const SolveResult& result, const GridProblem& problem,
                        double f_norm, double C_doubleprime);

// Randomized verification of the quadratic-root implication
// X^2 <= c x^2 + c Y X + c Y^2  =>  X <= sqrt(c) x + (c+1) Y, exact
// (no tolerance). Returns the number of violations (0 on pass).
int check_lemma_square(int trials, std::uint64_t seed);

void emit_csv(const std::vector<BoundReport>& reports, std::ostream& out);
void emit_csv(const std::vector<BoundReport>& reports, const std::string& path);
std::vector<BoundReport> parse_csv(std::istream& in);

}  // namespace pgrad
