// Command line front end: constants tables, single solves, p-sweeps with the
// bound-shape checks, and the randomized lemma verification.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgrad/constants.hpp"
#include "pgrad/harness.hpp"
#include "pgrad/rearrange.hpp"
#include "pgrad/solver.hpp"

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_grid_csv(const std::string& path, const pgrad::GridGeometry& geom,
                    const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# shape: " << geom.n[0] << ',' << geom.n[1];
  if (geom.dim == 3) out << ',' << geom.n[2];
  out << "; h: " << fmt(geom.spacing) << '\n';
  for (int k = 0; k < geom.n[2]; ++k)
    for (int j = 0; j < geom.n[1]; ++j) {
      for (int i = 0; i < geom.n[0]; ++i) {
        const std::size_t c = geom.index(i, j, k);
        if (i) out << ',';
        out << (geom.mask[c] ? fmt(values[c]) : "nan");
      }
      out << '\n';
    }
}

std::vector<double> read_grid_csv(const std::string& path,
                                  const pgrad::GridGeometry& geom) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("# shape:", 0) != 0)
    throw std::runtime_error("grid csv: missing '# shape:' header in " + path);
  std::vector<double> values(geom.raw_size(), 0.0);
  std::string line;
  std::size_t row = 0;
  const std::size_t rows = static_cast<std::size_t>(geom.n[1]) * geom.n[2];
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= rows) throw std::runtime_error("grid csv: too many rows");
    std::istringstream ls(line);
    std::string tok;
    for (int i = 0; i < geom.n[0]; ++i) {
      if (!std::getline(ls, tok, ','))
        throw std::runtime_error("grid csv: short row");
      const double v = std::strtod(tok.c_str(), nullptr);
      values[row * geom.n[0] + i] = std::isnan(v) ? 0.0 : v;
    }
    ++row;
  }
  if (row != rows) throw std::runtime_error("grid csv: missing rows");
  return values;
}

int run_constants(double p_min, double p_max, int steps, double theta, int dim,
                  const std::string& regime_s, const std::string& space_s) {
  using namespace pgrad;
  const Regime regime = regime_s == "boundary" ? Regime::boundary_W2Ltheta1
                                               : Regime::convex;
  const SourceSpace space = space_s == "lorentz_N1" ? SourceSpace::lorentz_N1
                                                    : SourceSpace::lebesgue_q;
  GeometryConstants geo;
  geo.theta = theta;

  std::cout << "p,C_p,K_p,xi_p,S1,sbar_p,factor,Lambda\n";
  for (int s = 0; s < steps; ++s) {
    const double p =
        steps == 1 ? p_min : p_min + (p_max - p_min) * s / (steps - 1.0);
    const double sbar = dim >= 3 ? sbar_p(p, dim, geo) : sbar_p_2d(p, geo);
    const double factor = theorem_factor(p, dim, theta, regime, space);
    const double lambda = lambda_general(GrowthBounds(p - 2.0, p - 2.0), dim,
                                         theta, regime == Regime::convex);
    std::cout << fmt(p) << ',' << fmt(C_p(p)) << ',' << fmt(K_p(p)) << ','
              << fmt(xi_p(p)) << ',' << fmt(S1(p)) << ',' << fmt(sbar) << ','
              << fmt(factor) << ',' << fmt(lambda) << '\n';
  }
  return 0;
}

int run_solve(int dim, const std::string& shape_s, int n, double p, double eps,
              const std::string& bc_s, const std::string& source,
              double tol, int max_iter, const std::string& out_dir) {
  using namespace pgrad;
  const Shape shape = shape_from_string(shape_s);
  GridProblem prob;
  prob.geom = make_geometry(shape, n);
  if (prob.geom.dim != dim)
    throw std::runtime_error("--dim does not match the chosen shape");
  prob.bc = bc_from_string(bc_s);
  prob.params = StructuralParams(p, eps);
  const bool builtin = source == "zero" || source == "one" ||
                       source == "sine" || source == "gaussian" ||
                       source == "gaussian-pair";
  prob.f = builtin ? make_source(prob.geom, source, prob.bc)
                   : read_grid_csv(source, prob.geom);

  const SolveResult res = solve(prob, tol, max_iter);
  write_grid_csv(out_dir + "/u.csv", prob.geom, res.u);
  write_grid_csv(out_dir + "/gradmag.csv", prob.geom, res.grad_mag);
  std::cout << "grad_sup = " << fmt(res.grad_sup)
            << "\nenergy = " << fmt(res.energy)
            << "\niterations = " << res.iterations
            << "\nresidual = " << fmt(res.residual)
            << "\nconverged = " << (res.converged ? "yes" : "no") << "\n";
  return res.converged ? 0 : 1;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_path) {
  using namespace pgrad;
  const SweepConfig cfg = SweepConfig::from_file(config_path);
  const std::vector<SweepPoint> points = run_sweep_detailed(cfg);
  std::vector<BoundReport> reports;
  for (const auto& pt : points) reports.push_back(pt.report);

  if (out_path.empty())
    emit_csv(reports, std::cout);
  else
    emit_csv(reports, out_path);

  bool ok = true;
  if (cfg.grid_levels.size() >= 2) {
    const auto pair = std::make_pair(cfg.grid_levels[cfg.grid_levels.size() - 2],
                                     cfg.grid_levels.back());
    const ShapeVerdict v = check_bound_shape(reports, pair);
    std::cerr << "bound-shape: max_ratio = " << fmt(v.max_ratio)
              << ", min_ratio = " << fmt(v.min_ratio)
              << ", stability = " << fmt(v.stability) << " -> "
              << (v.pass ? "PASS" : "FAIL") << "\n";
    ok = ok && v.pass;

    if (cfg.space == pgrad::SourceSpace::lorentz_N1) {
      double worst = 0.0;
      bool stable = true;
      for (double p : cfg.p_list) {
        double rc = 0.0, rf = 0.0;
        for (const auto& pt : points) {
          if (pt.report.p == p && pt.report.grid_n == pair.first) rc = pt.lemma214_ratio;
          if (pt.report.p == p && pt.report.grid_n == pair.second) rf = pt.lemma214_ratio;
        }
        if (!(std::isfinite(rc) && std::isfinite(rf))) stable = false;
        else {
          worst = std::max(worst, std::abs(rf - rc) / std::max(rf, 1e-300));
        }
      }
      std::cerr << "lemma-2.14: worst relative change = " << fmt(worst)
                << " -> " << ((stable && worst < 0.05) ? "PASS" : "FAIL")
                << "\n";
      ok = ok && stable && worst < 0.05;
    }
  }
  for (const auto& r : reports) ok = ok && r.converged && std::isfinite(r.ratio);
  return ok ? 0 : 1;
}

int run_check_lemmas(int trials, std::uint64_t seed) {
  const int violations = pgrad::check_lemma_square(trials, seed);
  std::cout << "lemma-square: " << trials << " trials, " << violations
            << " violations -> " << (violations == 0 ? "PASS" : "FAIL")
            << "\n";
  return violations == 0 ? 0 : 1;
}

int run_norm(const std::string& input, double lorentz_l, double lq_q) {
  using namespace pgrad;
  const SampledFunction f = SampledFunction::from_csv_file(input);
  if (lorentz_l > 1.0)
    std::cout << "lorentz(" << lorentz_l << ",1) = " << fmt(lorentz_norm(f, lorentz_l))
              << "\n";
  if (lq_q >= 1.0)
    std::cout << "lq(" << lq_q << ") = " << fmt(lq_norm(f, lq_q)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Laplacian gradient estimate toolkit"};
  app.require_subcommand(1);

  auto* c_cmd = app.add_subcommand("constants", "Emit the constant/factor table as CSV");
  double p_min = 1.05, p_max = 10.0, theta = 3.0;
  int steps = 50, dim = 2;
  std::string regime = "convex", space = "lebesgue_q";
  c_cmd->add_option("--p-min", p_min, "Smallest p (> 1)");
  c_cmd->add_option("--p-max", p_max, "Largest p");
  c_cmd->add_option("--steps", steps, "Number of p samples");
  c_cmd->add_option("--theta", theta, "Boundary regularity exponent theta");
  c_cmd->add_option("--dim", dim, "Space dimension N");
  c_cmd->add_option("--regime", regime, "convex | boundary")
      ->check(CLI::IsMember({"convex", "boundary"}));
  c_cmd->add_option("--space", space, "lorentz_N1 | lebesgue_q")
      ->check(CLI::IsMember({"lorentz_N1", "lebesgue_q"}));

  auto* s_cmd = app.add_subcommand("solve", "Solve one regularized problem, write u.csv/gradmag.csv");
  int s_dim = 2, s_n = 64, s_max_iter = 100;
  double s_p = 2.0, s_eps = 1e-6, s_tol = 1e-8;
  std::string s_shape = "square", s_bc = "dirichlet", s_source = "gaussian",
              s_out = ".";
  s_cmd->add_option("--dim", s_dim, "2 or 3");
  s_cmd->add_option("--shape", s_shape, "square|cube|disk|ball|lshape");
  s_cmd->add_option("--n", s_n, "Cells per axis");
  s_cmd->add_option("--p", s_p, "Exponent p > 1");
  s_cmd->add_option("--eps", s_eps, "Regularization epsilon");
  s_cmd->add_option("--bc", s_bc, "dirichlet|neumann");
  s_cmd->add_option("--source", s_source, "Builtin name or grid csv path");
  s_cmd->add_option("--tol", s_tol, "Outer residual tolerance");
  s_cmd->add_option("--max-iter", s_max_iter, "Outer iteration cap per rung");
  s_cmd->add_option("--out-dir", s_out, "Directory for u.csv / gradmag.csv");

  auto* w_cmd = app.add_subcommand("sweep", "Run a configured p-sweep and the shape checks");
  std::string w_config, w_out;
  w_cmd->add_option("--config", w_config, "key = value config file")->required();
  w_cmd->add_option("--out", w_out, "Report csv path (stdout when omitted)");

  auto* l_cmd = app.add_subcommand("check-lemmas", "Randomized lemma verification");
  int l_trials = 10000;
  std::uint64_t l_seed = 1;
  l_cmd->add_option("--trials", l_trials, "Number of randomized trials");
  l_cmd->add_option("--seed", l_seed, "Seed of the counter-based generator");

  auto* n_cmd = app.add_subcommand("norm", "Norms of a measure,value csv function");
  std::string n_input;
  double n_lorentz = 0.0, n_lq = 0.0;
  n_cmd->add_option("--input", n_input, "csv with header and measure,value rows")
      ->required();
  n_cmd->add_option("--lorentz", n_lorentz, "Lorentz L^{l,1} exponent l > 1");
  n_cmd->add_option("--lq", n_lq, "Lebesgue exponent q >= 1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_cmd) return run_constants(p_min, p_max, steps, theta, dim, regime, space);
    if (*s_cmd)
      return run_solve(s_dim, s_shape, s_n, s_p, s_eps, s_bc, s_source, s_tol,
                       s_max_iter, s_out);
    if (*w_cmd) return run_sweep_cmd(w_config, w_out);
    if (*l_cmd) return run_check_lemmas(l_trials, l_seed);
    if (*n_cmd) return run_norm(n_input, n_lorentz, n_lq);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
