#include "pgrad/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <cstdio>
#include <cstdlib>

namespace pgrad {

namespace {

struct Neighbor {
  bool present;
  std::size_t idx;
};

inline Neighbor neighbor(const GridGeometry& g, int i, int j, int k, int axis,
                         int dir) {
  int ii = i, jj = j, kk = k;
  (axis == 0 ? ii : axis == 1 ? jj : kk) += dir;
  if (ii < 0 || jj < 0 || kk < 0 || ii >= g.n[0] || jj >= g.n[1] ||
      kk >= g.n[2])
    return {false, 0};
  const std::size_t idx = g.index(ii, jj, kk);
  if (!g.mask[idx]) return {false, 0};
  return {true, idx};
}

struct StencilPair {
  std::int64_t idx;
  double coef;
};

// The linear stencil of the cell-centered gradient component along `axis`:
// centered in the interior, one-sided (per mode) at the mask boundary.
// Dirichlet reads the wall value 0 at the exposed-face distance.
int cell_diff_stencil(const GridGeometry& g, int i, int j, int k, int axis,
                      GradMode mode, StencilPair out[2]) {
  const double h = g.spacing;
  const std::size_t c = g.index(i, j, k);
  const Neighbor m = neighbor(g, i, j, k, axis, -1);
  const Neighbor p = neighbor(g, i, j, k, axis, +1);
  if (m.present && p.present) {
    out[0] = {static_cast<std::int64_t>(p.idx), 0.5 / h};
    out[1] = {static_cast<std::int64_t>(m.idx), -0.5 / h};
    return 2;
  }
  if (p.present) {  // minus side exposed
    switch (mode) {
      case GradMode::one_sided:
        out[0] = {static_cast<std::int64_t>(p.idx), 1.0 / h};
        out[1] = {static_cast<std::int64_t>(c), -1.0 / h};
        return 2;
      case GradMode::dirichlet: {
        const double inv_d = 1.0 / g.exposed_distance(i, j, k, axis, -1);
        out[0] = {static_cast<std::int64_t>(p.idx), 0.5 / h};
        out[1] = {static_cast<std::int64_t>(c), -0.5 / h + 0.5 * inv_d};
        return 2;
      }
      case GradMode::neumann:
        out[0] = {static_cast<std::int64_t>(p.idx), 0.5 / h};
        out[1] = {static_cast<std::int64_t>(c), -0.5 / h};
        return 2;
    }
  }
  if (m.present) {  // plus side exposed
    switch (mode) {
      case GradMode::one_sided:
        out[0] = {static_cast<std::int64_t>(c), 1.0 / h};
        out[1] = {static_cast<std::int64_t>(m.idx), -1.0 / h};
        return 2;
      case GradMode::dirichlet: {
        const double inv_d = 1.0 / g.exposed_distance(i, j, k, axis, +1);
        out[0] = {static_cast<std::int64_t>(c), 0.5 / h - 0.5 * inv_d};
        out[1] = {static_cast<std::int64_t>(m.idx), -0.5 / h};
        return 2;
      }
      case GradMode::neumann:
        out[0] = {static_cast<std::int64_t>(c), 0.5 / h};
        out[1] = {static_cast<std::int64_t>(m.idx), -0.5 / h};
        return 2;
    }
  }
  return 0;
}

// Flattened per-cell stencils of all gradient components, built once per
// solve and shared by the operator apply, the energy, and the coefficients.
struct CellStencils {
  // [cell][axis][0..1]
  std::vector<std::int64_t> idx;
  std::vector<double> coef;
  int dim = 2;

  static CellStencils build(const GridGeometry& g, GradMode mode) {
    CellStencils s;
    s.dim = g.dim;
    const std::size_t sz = g.raw_size();
    s.idx.assign(sz * g.dim * 2, 0);
    s.coef.assign(sz * g.dim * 2, 0.0);
    StencilPair pairs[2];
    for (int k = 0; k < g.n[2]; ++k)
      for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
          const std::size_t c = g.index(i, j, k);
          if (!g.mask[c]) continue;
          for (int d = 0; d < g.dim; ++d) {
            const int cnt = cell_diff_stencil(g, i, j, k, d, mode, pairs);
            for (int t = 0; t < cnt; ++t) {
              s.idx[(c * g.dim + d) * 2 + t] = pairs[t].idx;
              s.coef[(c * g.dim + d) * 2 + t] = pairs[t].coef;
            }
          }
        }
    return s;
  }

  double component(std::span<const double> x, std::size_t cell, int d) const {
    const std::size_t base = (cell * dim + d) * 2;
    return coef[base] * x[idx[base]] + coef[base + 1] * x[idx[base + 1]];
  }

  void scatter(std::size_t cell, int d, double v,
               std::vector<double>& y) const {
    const std::size_t base = (cell * dim + d) * 2;
    y[idx[base]] += coef[base] * v;
    y[idx[base + 1]] += coef[base + 1] * v;
  }
};

GradMode bc_grad_mode(BoundaryKind bc) {
  return bc == BoundaryKind::dirichlet ? GradMode::dirichlet
                                       : GradMode::neumann;
}

// One face-quadrature discretization carries the whole solve: the energy
// E(u) = sum_f w_f B_eps(|G_f u|) - sum_c f u V, with face gradients
// combining the two-point normal difference with averaged cell-centered
// tangential components. The exact gradient is
//   grad E(u) = sum_f w_f a_eps(|g_f|) G_f^T g_f - f V,
// and the exact Hessian replaces the scalar a_eps with the SPD face tensor
//   a_eps(|g|) I + (b_eps'(|g|) - a_eps(|g|)) ghat ghat^T,
// which coincides with the frozen Kacanov coefficient at p = 2 and keeps
// damped steps from cycling for p far from 2.
struct ConsistentSystem {
  const GridGeometry* geom = nullptr;
  CellStencils stencils;
  GradMode mode = GradMode::dirichlet;

  struct Face {
    std::size_t a, b;
    std::uint8_t axis;
  };
  struct BFace {
    std::size_t c;
    std::uint8_t axis;
    double inv_d;
  };
  std::vector<Face> faces;
  std::vector<BFace> bfaces;
  double w_face = 0.0;   // interior face quadrature weight
  double w_bface = 0.0;  // exposed (Dirichlet) face weight

  // Per-iteration linearization data, one entry per (interior|exposed) face.
  std::vector<double> coef_a_f, coef_c_f, coef_a_b, coef_c_b;
  std::vector<std::array<double, 3>> ghat_f, ghat_b;
  std::vector<double> diag_inv;

  void build_topology(const GridGeometry& g, BoundaryKind bc) {
    geom = &g;
    mode = bc_grad_mode(bc);
    stencils = CellStencils::build(g, mode);
    const double vol = g.cell_volume();
    w_face = vol / g.dim;
    w_bface = 0.5 * vol / g.dim;
    for (int k = 0; k < g.n[2]; ++k)
      for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
          const std::size_t c = g.index(i, j, k);
          if (!g.mask[c]) continue;
          for (int d = 0; d < g.dim; ++d) {
            const Neighbor p = neighbor(g, i, j, k, d, +1);
            if (p.present)
              faces.push_back({c, p.idx, static_cast<std::uint8_t>(d)});
            if (bc == BoundaryKind::dirichlet) {
              for (int dir = -1; dir <= 1; dir += 2) {
                if (neighbor(g, i, j, k, d, dir).present) continue;
                bfaces.push_back(
                    {c, static_cast<std::uint8_t>(d),
                     1.0 / g.exposed_distance(i, j, k, d, dir)});
              }
            }
          }
        }
  }

  void cell_components(std::span<const double> x,
                       std::vector<double>& comps) const {
    const GridGeometry& g = *geom;
    const std::size_t sz = g.raw_size();
    comps.assign(sz * g.dim, 0.0);
    for (std::size_t c = 0; c < sz; ++c) {
      if (!g.mask[c]) continue;
      for (int d = 0; d < g.dim; ++d)
        comps[c * g.dim + d] = stencils.component(x, c, d);
    }
  }

  // Linearize at u: per-face a_eps, b_eps' - a_eps, and gradient direction.
  void update_coefficients(std::span<const double> u,
                           const StructuralParams& sp,
                           std::vector<double>& comps_scratch) {
    const GridGeometry& g = *geom;
    const double h = g.spacing;
    cell_components(u, comps_scratch);
    coef_a_f.resize(faces.size());
    coef_c_f.resize(faces.size());
    ghat_f.resize(faces.size());
    coef_a_b.resize(bfaces.size());
    coef_c_b.resize(bfaces.size());
    ghat_b.resize(bfaces.size());

    auto linearize = [&](const std::array<double, 3>& gvec, double& a_out,
                         double& c_out, std::array<double, 3>& ghat_out) {
      double g2 = 0.0;
      for (int e = 0; e < g.dim; ++e) g2 += gvec[e] * gvec[e];
      const double mag = std::sqrt(g2);
      a_out = a_eps(mag, sp);
      if (mag > 0.0) {
        c_out = b_eps_prime(mag, sp) - a_out;
        for (int e = 0; e < g.dim; ++e) ghat_out[e] = gvec[e] / mag;
      } else {
        c_out = 0.0;
        ghat_out = {0.0, 0.0, 0.0};
      }
    };

    std::array<double, 3> gvec{};
    for (std::size_t t = 0; t < faces.size(); ++t) {
      const Face& f = faces[t];
      gvec = {0.0, 0.0, 0.0};
      gvec[f.axis] = (u[f.b] - u[f.a]) / h;
      for (int e = 0; e < g.dim; ++e) {
        if (e == f.axis) continue;
        gvec[e] = 0.5 * (comps_scratch[f.a * g.dim + e] +
                         comps_scratch[f.b * g.dim + e]);
      }
      linearize(gvec, coef_a_f[t], coef_c_f[t], ghat_f[t]);
    }
    for (std::size_t t = 0; t < bfaces.size(); ++t) {
      const BFace& f = bfaces[t];
      gvec = {0.0, 0.0, 0.0};
      gvec[f.axis] = u[f.c] * f.inv_d;
      for (int e = 0; e < g.dim; ++e) {
        if (e == f.axis) continue;
        gvec[e] = comps_scratch[f.c * g.dim + e];
      }
      linearize(gvec, coef_a_b[t], coef_c_b[t], ghat_b[t]);
    }

    // Jacobi diagonal from the face-normal parts (the dominant terms).
    const double h2 = h * h;
    std::vector<double> diag(g.raw_size(), 0.0);
    for (std::size_t t = 0; t < faces.size(); ++t) {
      const Face& f = faces[t];
      const double m_nn =
          coef_a_f[t] + coef_c_f[t] * ghat_f[t][f.axis] * ghat_f[t][f.axis];
      const double v = w_face * m_nn / h2;
      diag[f.a] += v;
      diag[f.b] += v;
    }
    for (std::size_t t = 0; t < bfaces.size(); ++t) {
      const BFace& f = bfaces[t];
      const double m_nn =
          coef_a_b[t] + coef_c_b[t] * ghat_b[t][f.axis] * ghat_b[t][f.axis];
      diag[f.c] += w_bface * m_nn * f.inv_d * f.inv_d;
    }
    diag_inv.assign(g.raw_size(), 0.0);
    for (std::size_t c = 0; c < g.raw_size(); ++c)
      if (g.mask[c]) diag_inv[c] = diag[c] > 0.0 ? 1.0 / diag[c] : 1.0;
  }

  // y = sum_f w_f M_f G_f^T G_f x, with M = a I (gradient/residual form,
  // hessian = false) or the full tensor (hessian = true).
  void apply(std::span<const double> x, std::vector<double>& y,
             std::vector<double>& comps_scratch,
             std::vector<double>& acc_scratch, bool hessian) const {
    const GridGeometry& g = *geom;
    const double h = g.spacing;
    cell_components(x, comps_scratch);
    y.assign(g.raw_size(), 0.0);
    acc_scratch.assign(g.raw_size() * g.dim, 0.0);

    std::array<double, 3> gx{}, m{};
    for (std::size_t t = 0; t < faces.size(); ++t) {
      const Face& f = faces[t];
      gx = {0.0, 0.0, 0.0};
      gx[f.axis] = (x[f.b] - x[f.a]) / h;
      for (int e = 0; e < g.dim; ++e) {
        if (e == f.axis) continue;
        gx[e] = 0.5 * (comps_scratch[f.a * g.dim + e] +
                       comps_scratch[f.b * g.dim + e]);
      }
      double proj = 0.0;
      if (hessian && coef_c_f[t] != 0.0)
        for (int e = 0; e < g.dim; ++e) proj += ghat_f[t][e] * gx[e];
      for (int e = 0; e < g.dim; ++e) {
        m[e] = w_face * (coef_a_f[t] * gx[e] +
                         (hessian ? coef_c_f[t] * proj * ghat_f[t][e] : 0.0));
      }
      const double flux = m[f.axis] / h;
      y[f.b] += flux;
      y[f.a] -= flux;
      for (int e = 0; e < g.dim; ++e) {
        if (e == f.axis) continue;
        acc_scratch[f.a * g.dim + e] += 0.5 * m[e];
        acc_scratch[f.b * g.dim + e] += 0.5 * m[e];
      }
    }
    for (std::size_t t = 0; t < bfaces.size(); ++t) {
      const BFace& f = bfaces[t];
      gx = {0.0, 0.0, 0.0};
      gx[f.axis] = x[f.c] * f.inv_d;
      for (int e = 0; e < g.dim; ++e) {
        if (e == f.axis) continue;
        gx[e] = comps_scratch[f.c * g.dim + e];
      }
      double proj = 0.0;
      if (hessian && coef_c_b[t] != 0.0)
        for (int e = 0; e < g.dim; ++e) proj += ghat_b[t][e] * gx[e];
      for (int e = 0; e < g.dim; ++e) {
        m[e] = w_bface * (coef_a_b[t] * gx[e] +
                          (hessian ? coef_c_b[t] * proj * ghat_b[t][e] : 0.0));
      }
      y[f.c] += m[f.axis] * f.inv_d;
      for (int e = 0; e < g.dim; ++e) {
        if (e == f.axis) continue;
        acc_scratch[f.c * g.dim + e] += m[e];
      }
    }
    // Adjoint of the cell-centered differences.
    for (std::size_t c = 0; c < g.raw_size(); ++c) {
      if (!g.mask[c]) continue;
      for (int e = 0; e < g.dim; ++e) {
        const double v = acc_scratch[c * g.dim + e];
        if (v != 0.0) stencils.scatter(c, e, v, y);
      }
    }
  }

  // Face-quadrature part of the objective.
  double gradient_energy(std::span<const double> u, const StructuralParams& sp,
                         std::vector<double>& comps_scratch) const {
    const GridGeometry& g = *geom;
    const double h = g.spacing;
    cell_components(u, comps_scratch);
    double acc = 0.0;
    for (const Face& f : faces) {
      const double gn = (u[f.b] - u[f.a]) / h;
      double g2 = gn * gn;
      for (int e = 0; e < g.dim; ++e) {
        if (e == f.axis) continue;
        const double ge = 0.5 * (comps_scratch[f.a * g.dim + e] +
                                 comps_scratch[f.b * g.dim + e]);
        g2 += ge * ge;
      }
      acc += w_face * B_eps(std::sqrt(g2), sp);
    }
    for (const BFace& f : bfaces) {
      const double gn = u[f.c] * f.inv_d;
      double g2 = gn * gn;
      for (int e = 0; e < g.dim; ++e) {
        if (e == f.axis) continue;
        const double ge = comps_scratch[f.c * g.dim + e];
        g2 += ge * ge;
      }
      acc += w_bface * B_eps(std::sqrt(g2), sp);
    }
    return acc;
  }
};

void project_mean(std::vector<double>& x, const GridGeometry& geom) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < x.size(); ++c)
    if (geom.mask[c]) {
      sum += x[c];
      ++count;
    }
  const double mean = sum / static_cast<double>(count);
  for (std::size_t c = 0; c < x.size(); ++c)
    if (geom.mask[c]) x[c] -= mean;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Jacobi-preconditioned CG for the Newton system on the masked cells;
// x is warm start and output.
int conjugate_gradient(const ConsistentSystem& sys, const GridGeometry& geom,
                       std::span<const double> b, std::vector<double>& x,
                       double rel_tol, int max_iter, bool neumann,
                       std::vector<double>& comps_scratch,
                       std::vector<double>& acc_scratch) {
  const std::size_t sz = geom.raw_size();
  std::vector<double> r(sz), z(sz), d(sz), q(sz);

  sys.apply(x, q, comps_scratch, acc_scratch, true);
  for (std::size_t c = 0; c < sz; ++c) r[c] = geom.mask[c] ? b[c] - q[c] : 0.0;

  const double target =
      rel_tol * std::max(norm2(b), std::max(norm2(r), 1e-300));
  if (norm2(r) <= target) return 0;

  auto precondition = [&](const std::vector<double>& rr,
                          std::vector<double>& zz) {
    for (std::size_t c = 0; c < sz; ++c) zz[c] = rr[c] * sys.diag_inv[c];
    if (neumann) project_mean(zz, geom);
  };

  precondition(r, z);
  d = z;
  double rz = dot(r, z);
  int it = 0;
  for (; it < max_iter; ++it) {
    sys.apply(d, q, comps_scratch, acc_scratch, true);
    const double dq = dot(d, q);
    if (!(dq > 0.0)) break;
    const double alpha = rz / dq;
    for (std::size_t c = 0; c < sz; ++c) {
      x[c] += alpha * d[c];
      r[c] -= alpha * q[c];
    }
    if (norm2(r) <= target) {
      ++it;
      break;
    }
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t c = 0; c < sz; ++c) d[c] = z[c] + beta * d[c];
  }
  return it;
}

std::vector<double> continuation_ladder(double p, double target,
                                        bool enabled) {
  std::vector<double> rungs;
  const bool degenerate_target = target == 0.0 && p != 2.0;
  if (enabled && target < 1.0 &&
      (std::abs(p - 2.0) > 1.0 || degenerate_target)) {
    for (double e = 1.0; e > target * 1.0000001 && rungs.size() < 12;
         e *= 0.1)
      rungs.push_back(e);
  }
  rungs.push_back(target);
  return rungs;
}

}  // namespace

std::vector<std::array<double, 3>> grad_components(std::span<const double> u,
                                                   const GridGeometry& geom,
                                                   GradMode mode) {
  std::vector<std::array<double, 3>> comps(geom.raw_size(), {0.0, 0.0, 0.0});
  StencilPair pairs[2];
  for (int k = 0; k < geom.n[2]; ++k)
    for (int j = 0; j < geom.n[1]; ++j)
      for (int i = 0; i < geom.n[0]; ++i) {
        const std::size_t c = geom.index(i, j, k);
        if (!geom.mask[c]) continue;
        for (int d = 0; d < geom.dim; ++d) {
          const int cnt = cell_diff_stencil(geom, i, j, k, d, mode, pairs);
          double v = 0.0;
          for (int t = 0; t < cnt; ++t) v += pairs[t].coef * u[pairs[t].idx];
          comps[c][d] = v;
        }
      }
  return comps;
}

std::vector<double> grad_field(std::span<const double> u,
                               const GridGeometry& geom, GradMode mode) {
  const auto comps = grad_components(u, geom, mode);
  std::vector<double> mag(geom.raw_size(), 0.0);
  for (std::size_t c = 0; c < mag.size(); ++c) {
    if (!geom.mask[c]) continue;
    double s2 = 0.0;
    for (int d = 0; d < geom.dim; ++d) s2 += comps[c][d] * comps[c][d];
    mag[c] = std::sqrt(s2);
  }
  return mag;
}

namespace {

double cell_energy_impl(std::span<const double> u, const GridGeometry& geom,
                        std::span<const double> f, const StructuralParams& sp,
                        GradMode mode) {
  const auto mag = grad_field(u, geom, mode);
  double acc = 0.0;
  for (std::size_t c = 0; c < mag.size(); ++c) {
    if (!geom.mask[c]) continue;
    acc += B_eps(mag[c], sp) - f[c] * u[c];
  }
  return acc * geom.cell_volume();
}

}  // namespace

double energy(std::span<const double> u, const GridProblem& problem) {
  return cell_energy_impl(u, problem.geom, problem.f, problem.params,
                          GradMode::one_sided);
}

double energy_with_mode(std::span<const double> u, const GridProblem& problem,
                        GradMode mode) {
  return cell_energy_impl(u, problem.geom, problem.f, problem.params, mode);
}

double gradient_integral_B(const SolveResult& result,
                           const GridProblem& problem) {
  double acc = 0.0;
  for (std::size_t c = 0; c < result.grad_mag.size(); ++c) {
    if (!problem.geom.mask[c]) continue;
    acc += B_eps(result.grad_mag[c], problem.params);
  }
  return acc * problem.geom.cell_volume();
}

SolveResult solve(const GridProblem& problem, const SolverOptions& options) {
  problem.validate();
  const GridGeometry& geom = problem.geom;
  const double p = problem.params.p;
  const double target_eps = problem.params.epsilon;
  if (target_eps == 0.0 && p < 2.0)
    throw SingularCoefficient(
        "solve: eps = 0 with p < 2 is singular at vanishing gradients; "
        "use eps > 0");
  if (!(options.tol > 0.0))
    throw std::invalid_argument("solve: tol must be > 0");

  const bool neumann = problem.bc == BoundaryKind::neumann;
  const std::size_t sz = geom.raw_size();
  const double vol = geom.cell_volume();

  // Right-hand side of grad E = 0 is f * cell_volume.
  std::vector<double> rhs(sz, 0.0);
  for (std::size_t c = 0; c < sz; ++c)
    if (geom.mask[c]) rhs[c] = problem.f[c];
  if (neumann) project_mean(rhs, geom);
  std::vector<double> rhs_v(sz, 0.0);
  for (std::size_t c = 0; c < sz; ++c) rhs_v[c] = rhs[c] * vol;
  const double rhs_norm = norm2(rhs_v);

  ConsistentSystem sys;
  sys.build_topology(geom, problem.bc);

  SolveResult result;
  std::vector<double> u(sz, 0.0);
  std::vector<double> comps, acc, work(sz, 0.0), trial(sz, 0.0);

  auto objective = [&](std::span<const double> w,
                       const StructuralParams& sp) {
    double e = sys.gradient_energy(w, sp, comps);
    for (std::size_t c = 0; c < sz; ++c)
      if (geom.mask[c]) e -= rhs_v[c] * w[c];
    return e;
  };

  const std::vector<double> rungs =
      continuation_ladder(p, target_eps, options.continuation);

  double residual = std::numeric_limits<double>::infinity();
  int total_steps = 0;

  for (std::size_t ri = 0; ri < rungs.size(); ++ri) {
    const StructuralParams sp(p, rungs[ri]);
    const bool final_rung = ri + 1 == rungs.size();
    double e_current = objective(u, sp);
    if (final_rung) result.energy_history.push_back(e_current);

    for (int outer = 0; outer < options.max_outer; ++outer) {
      sys.update_coefficients(u, sp, comps);
      sys.apply(u, work, comps, acc, false);
      for (std::size_t c = 0; c < sz; ++c)
        work[c] = geom.mask[c] ? rhs_v[c] - work[c] : 0.0;
      const double res = norm2(work) / std::max(rhs_norm, 1e-300);
      if (final_rung) residual = res;
      if (res <= options.tol) break;

      // Damped Newton step: H(u) step = -grad E(u), inner tolerance slaved
      // to the outer residual.
      const double inner_rel = std::clamp(0.1 * res, 0.02 * options.tol, 0.1);
      std::vector<double> step(sz, 0.0);
      conjugate_gradient(sys, geom, work, step, inner_rel, options.max_cg,
                         neumann, comps, acc);
      if (neumann) project_mean(step, geom);

      // grad E(u) . step < 0 by construction; Armijo backtracking.
      double slope = 0.0;
      for (std::size_t c = 0; c < sz; ++c) slope -= work[c] * step[c];
      bool accepted = false;
      double alpha = 1.0;
      for (int ls = 0; ls < 40; ++ls) {
        for (std::size_t c = 0; c < sz; ++c)
          trial[c] = u[c] + alpha * step[c];
        const double e_try = objective(trial, sp);
        if (e_try <= e_current + 1e-4 * alpha * slope ||
            (ls > 0 && e_try <= e_current)) {
          accepted = true;
          e_current = e_try;
          break;
        }
        alpha *= 0.5;
      }
      if (std::getenv("PGRAD_TRACE"))
        std::fprintf(stderr, "rung %zu outer %d res %.3e alpha %.3e E %.12e\n",
                     ri, outer, res, alpha, e_current);
      if (!accepted) break;
      u.swap(trial);
      ++total_steps;
      if (final_rung) result.energy_history.push_back(e_current);
    }
  }

  {
    const StructuralParams sp(p, target_eps);
    sys.update_coefficients(u, sp, comps);
    sys.apply(u, work, comps, acc, false);
    for (std::size_t c = 0; c < sz; ++c)
      work[c] = geom.mask[c] ? rhs_v[c] - work[c] : 0.0;
    residual = norm2(work) / std::max(rhs_norm, 1e-300);
    result.energy = objective(u, sp);
  }

  result.u = std::move(u);
  result.grad_mag = grad_field(result.u, geom, bc_grad_mode(problem.bc));
  result.grad_sup = 0.0;
  for (std::size_t c = 0; c < sz; ++c)
    if (geom.mask[c])
      result.grad_sup = std::max(result.grad_sup, result.grad_mag[c]);
  result.iterations = total_steps;
  result.residual = residual;
  result.converged = residual <= options.tol;
  return result;
}

SolveResult solve(const GridProblem& problem, double tol, int max_iter) {
  SolverOptions opt;
  opt.tol = tol;
  opt.max_outer = max_iter;
  return solve(problem, opt);
}

}  // namespace pgrad
