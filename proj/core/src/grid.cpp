#include "pgrad/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pgrad {

double GridGeometry::cell_volume() const {
  double v = spacing * spacing;
  if (dim == 3) v *= spacing;
  return v;
}

std::size_t GridGeometry::active_cells() const {
  std::size_t c = 0;
  for (std::uint8_t m : mask) c += m;
  return c;
}

double GridGeometry::exposed_distance(int i, int j, int k, int axis,
                                      int dir) const {
  if (shape != Shape::disk && shape != Shape::ball) return 0.5 * spacing;
  const auto c = center(i, j, k);
  double rho2 = 0.0;
  for (int d = 0; d < dim; ++d)
    if (d != axis) rho2 += c[d] * c[d];
  const double chord = std::sqrt(std::max(1.0 - rho2, 0.0));
  return std::max(chord - dir * c[axis], 0.5 * spacing);
}

namespace {

bool inside_radial(const GridGeometry& g, int i, int j, int k) {
  // Cell fully inside the unit circle/sphere: all corners inside.
  const auto c = g.center(i, j, k);
  const double h2 = 0.5 * g.spacing;
  double worst = 0.0;
  for (int sx = -1; sx <= 1; sx += 2)
    for (int sy = -1; sy <= 1; sy += 2) {
      if (g.dim == 2) {
        const double x = c[0] + sx * h2, y = c[1] + sy * h2;
        worst = std::max(worst, x * x + y * y);
      } else {
        for (int sz = -1; sz <= 1; sz += 2) {
          const double x = c[0] + sx * h2, y = c[1] + sy * h2,
                       z = c[2] + sz * h2;
          worst = std::max(worst, x * x + y * y + z * z);
        }
      }
    }
  return worst <= 1.0;
}

}  // namespace

GridGeometry make_geometry(Shape shape, int n) {
  if (n < 4)
    throw std::invalid_argument("make_geometry: need >= 4 cells per axis");
  GridGeometry g;
  g.shape = shape;
  switch (shape) {
    case Shape::square:
    case Shape::lshape:
      g.dim = 2;
      g.n = {n, n, 1};
      g.spacing = 1.0 / n;
      g.origin = {0.0, 0.0, 0.0};
      break;
    case Shape::cube:
      g.dim = 3;
      g.n = {n, n, n};
      g.spacing = 1.0 / n;
      g.origin = {0.0, 0.0, 0.0};
      break;
    case Shape::disk:
      g.dim = 2;
      g.n = {n, n, 1};
      g.spacing = 2.0 / n;
      g.origin = {-1.0, -1.0, 0.0};
      break;
    case Shape::ball:
      g.dim = 3;
      g.n = {n, n, n};
      g.spacing = 2.0 / n;
      g.origin = {-1.0, -1.0, -1.0};
      break;
  }
  g.mask.assign(g.raw_size(), 1);
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        bool active = true;
        if (shape == Shape::disk || shape == Shape::ball)
          active = inside_radial(g, i, j, k);
        else if (shape == Shape::lshape) {
          const auto c = g.center(i, j, k);
          active = !(c[0] > 0.5 && c[1] > 0.5);
        }
        g.mask[g.index(i, j, k)] = active ? 1 : 0;
      }
  return g;
}

Shape shape_from_string(const std::string& name) {
  if (name == "square") return Shape::square;
  if (name == "cube") return Shape::cube;
  if (name == "disk") return Shape::disk;
  if (name == "ball") return Shape::ball;
  if (name == "lshape") return Shape::lshape;
  throw std::invalid_argument("unknown shape: " + name);
}

BoundaryKind bc_from_string(const std::string& name) {
  if (name == "dirichlet") return BoundaryKind::dirichlet;
  if (name == "neumann") return BoundaryKind::neumann;
  throw std::invalid_argument("unknown boundary kind: " + name);
}

void GridProblem::validate() const {
  if (geom.dim != 2 && geom.dim != 3)
    throw std::invalid_argument("GridProblem: dim must be 2 or 3");
  if (f.size() != geom.raw_size())
    throw std::invalid_argument("GridProblem: source grid size mismatch");
  if (geom.active_cells() == 0)
    throw std::invalid_argument("GridProblem: empty mask");
  if (bc == BoundaryKind::neumann) {
    double sum = 0.0, abs_sum = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) {
      if (!geom.mask[c]) continue;
      sum += f[c];
      abs_sum += std::abs(f[c]);
    }
    const double vol = geom.cell_volume();
    if (std::abs(sum) * vol > 1e-10 * std::max(abs_sum * vol, 1e-300))
      throw IncompatibleSource(
          "GridProblem: Neumann data requires a zero-mean source");
  }
}

}  // namespace pgrad
