#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgrad {

// One cell of a finite measure space together with the (constant) value a
// measurable function takes on it.
struct Cell {
  double measure;
  double value;
};

// A function given as (measure, value) pairs over a finite measure space.
// Rearrangements and norms act on |value|; that is the convention under which
// every use site (|grad u|, f inside norms) reads.
class SampledFunction {
 public:
  explicit SampledFunction(std::vector<Cell> cells);

  const std::vector<Cell>& cells() const { return cells_; }
  double total_measure() const { return total_measure_; }

  // CSV with a mandatory header line followed by measure,value rows.
  static SampledFunction from_csv(std::istream& in);
  static SampledFunction from_csv_file(const std::string& path);

 private:
  std::vector<Cell> cells_;
  double total_measure_ = 0.0;
};

// Right-continuous nonincreasing step function on [0, total], zero beyond;
// the shape of a decreasing rearrangement. values[i] holds on
// [breakpoints[i], breakpoints[i+1]).
struct StepFunction {
  std::vector<double> breakpoints;  // starts at 0, strictly increasing
  std::vector<double> values;       // one per interval, nonincreasing

  double total_measure() const { return breakpoints.back(); }
  double operator()(double s) const;
  // Exact integral of the step function over [0, s].
  double integral(double s) const;
  // Exact integral of its square over [0, s].
  double integral_sq(double s) const;
};

// mu_v(t): total measure of cells with |value| > t.
double distribution_function(const SampledFunction& v, double t);

// v*: sort cells by |value| descending and lay them out on [0, total].
// Ties merge into a single interval, so tie order cannot matter.
StepFunction decreasing_rearrangement(const SampledFunction& v);

// v**(s) = (1/s) integral of v* over [0, s], s > 0.
double double_star(const StepFunction& vstar, double s);

// Lorentz L^{l,1} norm: integral of v**(tau) tau^(-1/l') over [0, total],
// l' = l/(l-1). On each rearrangement interval v** has the form
// alpha + beta/tau, which integrates against the weight in closed form; no
// sampling is involved anywhere.
double lorentz_norm(const SampledFunction& v, double l);

// Plain L^q norm (sum of measure * |value|^q)^(1/q), q >= 1.
double lq_norm(const SampledFunction& v, double q);

// Exact integral of the product of two step functions over
// [0, min(total measures)]. Used for Hardy-Littlewood style checks.
double product_integral(const StepFunction& f, const StepFunction& g);

}  // namespace pgrad
