#include "pgrad/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#include "pgrad/rng.hpp"

namespace pgrad {

int SweepConfig::dim() const {
  return (shape == Shape::cube || shape == Shape::ball) ? 3 : 2;
}

void SweepConfig::validate() const {
  if (p_list.empty())
    throw std::invalid_argument("SweepConfig: p_list must not be empty");
  if (!std::is_sorted(p_list.begin(), p_list.end()))
    throw std::invalid_argument("SweepConfig: p_list must be ascending");
  for (double p : p_list)
    if (!(p > 1.01))
      throw std::invalid_argument("SweepConfig: every p must exceed 1.01");
  if (grid_levels.empty())
    throw std::invalid_argument("SweepConfig: grid_levels must not be empty");
  if (space == SourceSpace::lorentz_N1 && dim() < 3)
    throw std::invalid_argument(
        "SweepConfig: the L^{N,1} bound requires a 3d domain");
  if (space == SourceSpace::lebesgue_q && !(q > 2.0))
    throw std::invalid_argument("SweepConfig: the L^q bound requires q > 2");
  if (!(eps >= 0.0) || !(tol > 0.0))
    throw std::invalid_argument("SweepConfig: bad eps/tol");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

SweepConfig SweepConfig::from_stream(std::istream& in) {
  SweepConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("sweep config: expected key = value at line " +
                               std::to_string(lineno));
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "p_list") {
      cfg.p_list.clear();
      for (const auto& tok : split_list(value)) cfg.p_list.push_back(std::stod(tok));
    } else if (key == "grid_levels") {
      cfg.grid_levels.clear();
      for (const auto& tok : split_list(value)) cfg.grid_levels.push_back(std::stoi(tok));
    } else if (key == "shape") {
      cfg.shape = shape_from_string(value);
    } else if (key == "bc") {
      cfg.bc = bc_from_string(value);
    } else if (key == "source") {
      cfg.source = value;
    } else if (key == "space") {
      if (value == "lorentz_N1") cfg.space = SourceSpace::lorentz_N1;
      else if (value == "lebesgue_q") cfg.space = SourceSpace::lebesgue_q;
      else throw std::runtime_error("sweep config: unknown space " + value);
    } else if (key == "regime") {
      if (value == "convex") cfg.regime = Regime::convex;
      else if (value == "boundary") cfg.regime = Regime::boundary_W2Ltheta1;
      else throw std::runtime_error("sweep config: unknown regime " + value);
    } else if (key == "q") {
      cfg.q = std::stod(value);
    } else if (key == "theta") {
      cfg.theta = std::stod(value);
      cfg.geo.theta = cfg.theta;
    } else if (key == "eps") {
      cfg.eps = std::stod(value);
    } else if (key == "tol") {
      cfg.tol = std::stod(value);
    } else if (key == "max_iter") {
      cfg.max_iter = std::stoi(value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "c_omega") {
      cfg.geo.c_omega = std::stod(value);
    } else if (key == "C_doubleprime") {
      cfg.geo.C_doubleprime = std::stod(value);
    } else if (key == "volume") {
      cfg.geo.volume = std::stod(value);
    } else if (key == "boundary_area") {
      cfg.geo.boundary_area = std::stod(value);
    } else if (key == "k_norm") {
      cfg.geo.k_norm_theta1 = std::stod(value);
    } else {
      throw std::runtime_error("sweep config: unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig SweepConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("sweep config: cannot open " + path);
  return from_stream(in);
}

namespace {

double gaussian_bump(const std::array<double, 3>& x,
                     const std::array<double, 3>& c, double sigma, int dim) {
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
  return std::exp(-r2 / (2.0 * sigma * sigma));
}

}  // namespace

std::vector<double> make_source(const GridGeometry& geom,
                                const std::string& name, BoundaryKind bc) {
  std::vector<double> f(geom.raw_size(), 0.0);
  const double lo = geom.origin[0];
  const double hi = geom.origin[0] + geom.n[0] * geom.spacing;
  const double extent = hi - lo;
  const double mid = 0.5 * (lo + hi);

  for (int k = 0; k < geom.n[2]; ++k)
    for (int j = 0; j < geom.n[1]; ++j)
      for (int i = 0; i < geom.n[0]; ++i) {
        const std::size_t c = geom.index(i, j, k);
        if (!geom.mask[c]) continue;
        const auto x = geom.center(i, j, k);
        if (name == "zero") {
          f[c] = 0.0;
        } else if (name == "one") {
          f[c] = 1.0;
        } else if (name == "sine") {
          const double pi = 3.14159265358979323846;
          double val = geom.dim * pi * pi;
          for (int d = 0; d < geom.dim; ++d)
            val *= std::sin(pi * (x[d] - geom.origin[d]) / extent);
          f[c] = val / (extent * extent);
        } else if (name == "gaussian") {
          std::array<double, 3> ctr{mid, mid, mid};
          f[c] = gaussian_bump(x, ctr, 0.15 * extent, geom.dim);
        } else if (name == "gaussian-pair") {
          std::array<double, 3> c1{mid - 0.2 * extent, mid - 0.2 * extent,
                                   mid};
          std::array<double, 3> c2{mid + 0.2 * extent, mid + 0.2 * extent,
                                   mid};
          f[c] = gaussian_bump(x, c1, 0.1 * extent, geom.dim) -
                 gaussian_bump(x, c2, 0.1 * extent, geom.dim);
        } else {
          throw std::invalid_argument("make_source: unknown builtin " + name);
        }
      }

  if (bc == BoundaryKind::neumann) {
    // Exact zero mean over the active cells.
    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t c = 0; c < f.size(); ++c)
      if (geom.mask[c]) {
        sum += f[c];
        ++cnt;
      }
    const double mean = sum / static_cast<double>(cnt);
    for (std::size_t c = 0; c < f.size(); ++c)
      if (geom.mask[c]) f[c] -= mean;
  }
  return f;
}

GridProblem make_problem(const SweepConfig& cfg, double p, int n) {
  GridProblem prob;
  prob.geom = make_geometry(cfg.shape, n);
  prob.bc = cfg.bc;
  prob.f = make_source(prob.geom, cfg.source, cfg.bc);
  prob.params = StructuralParams(p, cfg.eps);
  return prob;
}

double source_norm(const GridProblem& problem, SourceSpace space, double q) {
  std::vector<Cell> cells;
  cells.reserve(problem.geom.active_cells());
  const double vol = problem.geom.cell_volume();
  for (std::size_t c = 0; c < problem.f.size(); ++c)
    if (problem.geom.mask[c]) cells.push_back({vol, problem.f[c]});
  SampledFunction sf(std::move(cells));
  if (space == SourceSpace::lorentz_N1)
    return lorentz_norm(sf, static_cast<double>(problem.geom.dim));
  return lq_norm(sf, q);
}

std::vector<SweepPoint> run_sweep_detailed(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepPoint> points;
  for (int n : cfg.grid_levels) {
    for (double p : cfg.p_list) {
      SweepPoint pt;
      try {
        const GridProblem prob = make_problem(cfg, p, n);
        const double norm = source_norm(prob, cfg.space, cfg.q);
        const double factor =
            theorem_factor(p, prob.geom.dim, cfg.theta, cfg.regime, cfg.space);
        const SolveResult res = solve(prob, cfg.tol, cfg.max_iter);
        pt.report = make_bound_report(p, res.grad_sup, norm, factor, n,
                                      res.converged);
        pt.lemma214_ratio =
            check_lemma_2_14(res, prob, norm, cfg.geo.C_doubleprime);
      } catch (const std::exception&) {
        pt.report = BoundReport{};
        pt.report.p = p;
        pt.report.grid_n = n;
        pt.report.converged = false;
      }
      points.push_back(pt);
    }
  }
  std::sort(points.begin(), points.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              if (a.report.p != b.report.p) return a.report.p < b.report.p;
              return a.report.grid_n < b.report.grid_n;
            });
  return points;
}

std::vector<BoundReport> run_sweep(const SweepConfig& cfg) {
  std::vector<BoundReport> reports;
  for (const SweepPoint& pt : run_sweep_detailed(cfg)) reports.push_back(pt.report);
  return reports;
}

ShapeVerdict check_bound_shape(const std::vector<BoundReport>& reports,
                               std::pair<int, int> refinement_pair) {
  std::map<double, double> coarse, fine;
  for (const BoundReport& r : reports) {
    if (!r.converged) continue;
    if (r.grid_n == refinement_pair.first) coarse[r.p] = r.ratio;
    if (r.grid_n == refinement_pair.second) fine[r.p] = r.ratio;
  }
  std::size_t paired = 0;
  ShapeVerdict v;
  v.min_ratio = std::numeric_limits<double>::infinity();
  bool all_finite = true;
  for (const auto& [p, rc] : coarse) {
    auto it = fine.find(p);
    if (it == fine.end()) continue;
    ++paired;
    const double rf = it->second;
    if (!std::isfinite(rc) || !std::isfinite(rf)) all_finite = false;
    v.max_ratio = std::max({v.max_ratio, rc, rf});
    v.min_ratio = std::min({v.min_ratio, rc, rf});
    const double denom = std::max(std::abs(rf), 1e-300);
    v.stability = std::max(v.stability, std::abs(rf - rc) / denom);
  }
  if (paired < 3)
    throw InsufficientData(
        "check_bound_shape: need >= 3 successful reports on both levels");
  v.pass = all_finite && std::isfinite(v.max_ratio) && v.stability < 0.05;
  return v;
}

double check_lemma_2_14(const SolveResult& result, const GridProblem& problem,
                        double f_norm, double C_doubleprime) {
  const double numerator = gradient_integral_B(result, problem);
  if (f_norm == 0.0) {
    if (numerator == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  const double denom = C_doubleprime * C_p(problem.params.p) *
                       psi_eps(f_norm, problem.params);
  return numerator / denom;
}

int check_lemma_square(int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_lemma_square: trials >= 1");
  const CounterRng rng(seed);
  int violations = 0;
  for (int i = 0; i < trials; ++i) {
    const auto t = static_cast<std::uint64_t>(i);
    const double c = rng.log_uniform(t, 0, 1e-2, 1e2);
    const double x = rng.log_uniform(t, 1, 1e-3, 1e3);
    const double y = rng.log_uniform(t, 2, 1e-3, 1e3);
    // Largest X satisfying the premise X^2 <= c x^2 + c Y X + c Y^2.
    const double root =
        0.5 * (c * y + std::sqrt(c * c * y * y + 4.0 * c * (x * x + y * y)));
    // Every 16th trial sits exactly on the premise boundary.
    const double theta = (i % 16 == 0) ? 1.0 : rng.uniform(t, 3);
    const double X = theta * root;
    if (!(X <= std::sqrt(c) * x + (c + 1.0) * y)) ++violations;
  }
  return violations;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void emit_csv(const std::vector<BoundReport>& reports, std::ostream& out) {
  out << "p,grad_sup_pow,source_norm,factor,ratio,grid_n,converged\n";
  for (const BoundReport& r : reports) {
    out << fmt_double(r.p) << ',' << fmt_double(r.grad_sup_pow) << ','
        << fmt_double(r.source_norm) << ',' << fmt_double(r.factor) << ','
        << fmt_double(r.ratio) << ',' << r.grid_n << ','
        << (r.converged ? 1 : 0) << '\n';
  }
}

void emit_csv(const std::vector<BoundReport>& reports,
              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  emit_csv(reports, out);
  if (!out) throw std::runtime_error("emit_csv: write failure on " + path);
}

std::vector<BoundReport> parse_csv(std::istream& in) {
  std::vector<BoundReport> out;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("parse_csv: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    BoundReport r;
    int conv = 0;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg,%d,%d", &r.p,
                    &r.grad_sup_pow, &r.source_norm, &r.factor, &r.ratio,
                    &r.grid_n, &conv) != 7)
      throw std::runtime_error("parse_csv: bad row: " + line);
    r.converged = conv != 0;
    out.push_back(r);
  }
  return out;
}

}  // namespace pgrad
