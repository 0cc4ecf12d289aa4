#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgrad/structural.hpp"

namespace pgrad {

enum class Shape { square, cube, disk, ball, lshape };
enum class BoundaryKind { dirichlet, neumann };

// Uniform cell-centered grid with a mask selecting the active cells.
// square/lshape live on [0,1]^2, cube on [0,1]^3, disk/ball on [-1,1]^dim
// with the unit circle/sphere realized by keeping cells that lie fully
// inside (cut-cell-free masking; a first-order geometric error source).
struct GridGeometry {
  int dim = 2;
  Shape shape = Shape::square;
  std::array<int, 3> n{0, 0, 1};
  double spacing = 0.0;
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::vector<std::uint8_t> mask;

  std::size_t raw_size() const {
    return static_cast<std::size_t>(n[0]) * n[1] * n[2];
  }
  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
  }
  std::array<double, 3> center(int i, int j, int k = 0) const {
    return {origin[0] + (i + 0.5) * spacing, origin[1] + (j + 0.5) * spacing,
            dim == 3 ? origin[2] + (k + 0.5) * spacing : 0.0};
  }
  double cell_volume() const;
  std::size_t active_cells() const;

  // Distance from the center of an active cell to the domain boundary along
  // axis/dir at an exposed face. Grid-aligned shapes put the wall on the
  // face itself (h/2); disk/ball return the exact axis distance to the unit
  // circle/sphere, which keeps the Dirichlet condition on the curve instead
  // of on the inscribed staircase (always >= h/2 for fully-inside masking).
  double exposed_distance(int i, int j, int k, int axis, int dir) const;
};

GridGeometry make_geometry(Shape shape, int n);

Shape shape_from_string(const std::string& name);
BoundaryKind bc_from_string(const std::string& name);

// A discrete boundary value problem: -div(a_eps(|grad u|) grad u) = f on the
// masked cells, with homogeneous Dirichlet or Neumann data on the mask
// boundary.
struct GridProblem {
  GridGeometry geom;
  BoundaryKind bc = BoundaryKind::dirichlet;
  std::vector<double> f;  // one value per raw cell; inactive cells ignored
  StructuralParams params{2.0, 0.0};

  void validate() const;
};

class IncompatibleSource : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class SingularCoefficient : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pgrad
