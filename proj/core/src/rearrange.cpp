#include "pgrad/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace pgrad {

SampledFunction::SampledFunction(std::vector<Cell> cells)
    : cells_(std::move(cells)) {
  if (cells_.empty())
    throw std::invalid_argument("SampledFunction: needs at least one cell");
  for (const Cell& c : cells_) {
    if (!(c.measure > 0.0) || !std::isfinite(c.measure))
      throw std::invalid_argument("SampledFunction: cell measures must be > 0");
    if (!std::isfinite(c.value))
      throw std::invalid_argument("SampledFunction: cell values must be finite");
    total_measure_ += c.measure;
  }
}

SampledFunction SampledFunction::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("SampledFunction csv: empty input");
  {
    // Header line is mandatory; a numeric first line means it is missing.
    std::istringstream probe(line);
    double a = 0.0;
    char comma = 0;
    double b = 0.0;
    if (probe >> a >> comma >> b)
      throw std::runtime_error("SampledFunction csv: header line required");
  }
  std::vector<Cell> cells;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    double measure = 0.0, value = 0.0;
    char comma = 0;
    if (!(row >> measure >> comma >> value) || comma != ',')
      throw std::runtime_error("SampledFunction csv: bad row at line " +
                               std::to_string(lineno));
    cells.push_back({measure, value});
  }
  return SampledFunction(std::move(cells));
}

SampledFunction SampledFunction::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("SampledFunction csv: cannot open " + path);
  return from_csv(in);
}

double StepFunction::operator()(double s) const {
  if (!(s >= 0.0)) throw std::domain_error("StepFunction: s must be >= 0");
  if (s >= breakpoints.back()) return 0.0;
  // First interval whose right endpoint lies beyond s.
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
  const std::size_t idx = static_cast<std::size_t>(it - breakpoints.begin());
  return values[idx - 1];
}

double StepFunction::integral(double s) const {
  if (!(s >= 0.0)) throw std::domain_error("StepFunction: s must be >= 0");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const double hi = breakpoints[i + 1];
    if (s <= lo) break;
    acc += values[i] * (std::min(s, hi) - lo);
  }
  return acc;
}

double StepFunction::integral_sq(double s) const {
  if (!(s >= 0.0)) throw std::domain_error("StepFunction: s must be >= 0");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const double hi = breakpoints[i + 1];
    if (s <= lo) break;
    acc += values[i] * values[i] * (std::min(s, hi) - lo);
  }
  return acc;
}

double distribution_function(const SampledFunction& v, double t) {
  if (!(t >= 0.0)) throw std::domain_error("distribution_function: t >= 0");
  double m = 0.0;
  for (const Cell& c : v.cells())
    if (std::abs(c.value) > t) m += c.measure;
  return m;
}

StepFunction decreasing_rearrangement(const SampledFunction& v) {
  std::vector<Cell> sorted = v.cells();
  for (Cell& c : sorted) c.value = std::abs(c.value);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Cell& a, const Cell& b) { return a.value > b.value; });

  StepFunction out;
  out.breakpoints.push_back(0.0);
  double cum = 0.0;
  for (const Cell& c : sorted) {
    cum += c.measure;
    if (!out.values.empty() && out.values.back() == c.value) {
      out.breakpoints.back() = cum;  // merge the tie
    } else {
      out.values.push_back(c.value);
      out.breakpoints.push_back(cum);
    }
  }
  return out;
}

double double_star(const StepFunction& vstar, double s) {
  if (!(s > 0.0)) throw std::domain_error("double_star: s must be > 0");
  return vstar.integral(s) / s;
}

double lorentz_norm(const SampledFunction& v, double l) {
  if (!(l > 1.0)) throw std::domain_error("lorentz_norm: l must be > 1");
  const StepFunction vstar = decreasing_rearrangement(v);
  const double lprime = l / (l - 1.0);

  // On [b_i, b_{i+1}) the running mean is alpha + beta/tau with
  // alpha = value_i and beta = (integral up to b_i) - value_i b_i, so the
  // weighted antiderivative is alpha l tau^(1/l) - beta l' tau^(-1/l').
  double norm = 0.0;
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < vstar.breakpoints.size(); ++i) {
    const double lo = vstar.breakpoints[i];
    const double hi = vstar.breakpoints[i + 1];
    const double alpha = vstar.values[i];
    const double beta = cum - alpha * lo;
    auto antider = [&](double tau) {
      double val = alpha * l * std::pow(tau, 1.0 / l);
      if (beta != 0.0) val -= beta * lprime * std::pow(tau, -1.0 / lprime);
      return val;
    };
    const double at_lo = lo == 0.0 ? 0.0 : antider(lo);
    norm += antider(hi) - at_lo;
    cum += alpha * (hi - lo);
  }
  return norm;
}

double lq_norm(const SampledFunction& v, double q) {
  if (!(q >= 1.0)) throw std::domain_error("lq_norm: q must be >= 1");
  double acc = 0.0;
  for (const Cell& c : v.cells())
    acc += c.measure * std::pow(std::abs(c.value), q);
  return std::pow(acc, 1.0 / q);
}

double product_integral(const StepFunction& f, const StepFunction& g) {
  const double end = std::min(f.total_measure(), g.total_measure());
  double acc = 0.0;
  std::size_t fi = 0, gi = 0;
  double pos = 0.0;
  while (pos < end) {
    while (fi + 2 < f.breakpoints.size() && f.breakpoints[fi + 1] <= pos) ++fi;
    while (gi + 2 < g.breakpoints.size() && g.breakpoints[gi + 1] <= pos) ++gi;
    const double next =
        std::min({f.breakpoints[fi + 1], g.breakpoints[gi + 1], end});
    acc += f.values[fi] * g.values[gi] * (next - pos);
    pos = next;
  }
  return acc;
}

}  // namespace pgrad
