#pragma once

#include <cstddef>
#include <vector>

#include "fcur/errors.hpp"
#include "fcur/fcurrent.hpp"
#include "fcur/shape.hpp"

namespace fcur {

namespace detail {

// Builds one atom per cell from an explicit vertex array (the shape supplies
// cells, signals and dimensions). Curves: midpoint, edge vector, mean of the
// endpoint signals. Surfaces: centroid, half cross product, mean of the three
// vertex signals. Atom order follows cell order. With drop_degenerate the
// atoms with |xi| below 1e-12 times the bounding-box diagonal are removed.
inline FCurrent atoms_from_positions(const FunctionalShape& s,
                                     const std::vector<Vec>& pos,
                                     bool drop_degenerate,
                                     std::size_t* dropped) {
  FCurrent c;
  c.ambient_dim = s.ambient_dim;
  c.manifold_dim = s.manifold_dim;
  c.signal_dim = s.signal_dim;
  c.atoms.reserve(s.cells.size());

  const double threshold =
      drop_degenerate ? 1e-12 * bounding_box_diagonal(pos) : -1.0;
  std::size_t ndropped = 0;

  const int k = s.signal_dim;
  for (const auto& cell : s.cells) {
    Dirac a;
    if (s.manifold_dim == 1) {
      const Vec &p0 = pos[cell[0]], &p1 = pos[cell[1]];
      a.x = 0.5 * (p0 + p1);
      a.xi = p1 - p0;
      a.m.resize(k);
      for (int i = 0; i < k; ++i)
        a.m[i] = 0.5 * (s.signal[cell[0]][i] + s.signal[cell[1]][i]);
    } else {
      const Vec &p0 = pos[cell[0]], &p1 = pos[cell[1]], &p2 = pos[cell[2]];
      a.x = (1.0 / 3.0) * (p0 + p1 + p2);
      a.xi = 0.5 * cross(p1 - p0, p2 - p0);
      a.m.resize(k);
      for (int i = 0; i < k; ++i)
        a.m[i] = (s.signal[cell[0]][i] + s.signal[cell[1]][i] + s.signal[cell[2]][i]) / 3.0;
    }
    if (drop_degenerate && norm(a.xi) < threshold) {
      ++ndropped;
      continue;
    }
    c.atoms.push_back(std::move(a));
  }
  if (dropped) *dropped = ndropped;
  return c;
}

}  // namespace detail

inline FCurrent discretize_curve(const FunctionalShape& s, std::size_t* dropped = nullptr) {
  require_valid(s);
  if (s.manifold_dim != 1) throw DimensionError("discretize_curve: shape is not a curve");
  return detail::atoms_from_positions(s, s.vertices, true, dropped);
}

inline FCurrent discretize_surface(const FunctionalShape& s, std::size_t* dropped = nullptr) {
  require_valid(s);
  if (s.manifold_dim != 2) throw DimensionError("discretize_surface: shape is not a surface");
  return detail::atoms_from_positions(s, s.vertices, true, dropped);
}

inline FCurrent discretize(const FunctionalShape& s, std::size_t* dropped = nullptr) {
  return s.manifold_dim == 1 ? discretize_curve(s, dropped) : discretize_surface(s, dropped);
}

// Splits every edge of a polyline into `factor` collinear sub-edges with
// linearly interpolated signal. Supports the sampling-convergence tests.
inline FunctionalShape refine_curve(const FunctionalShape& s, int factor) {
  require_valid(s);
  if (s.manifold_dim != 1) throw DimensionError("refine_curve: shape is not a curve");
  if (factor < 2) throw Error("refine_curve: factor must be >= 2");

  FunctionalShape out;
  out.ambient_dim = s.ambient_dim;
  out.manifold_dim = 1;
  out.signal_dim = s.signal_dim;
  out.vertices = s.vertices;
  out.signal = s.signal;
  out.cells.reserve(s.cells.size() * static_cast<std::size_t>(factor));

  for (const auto& cell : s.cells) {
    const int i0 = cell[0], i1 = cell[1];
    int prev = i0;
    for (int q = 1; q < factor; ++q) {
      const double t = static_cast<double>(q) / factor;
      Vec p = s.vertices[i0] + t * (s.vertices[i1] - s.vertices[i0]);
      Signal m(s.signal_dim);
      for (int i = 0; i < s.signal_dim; ++i)
        m[i] = (1.0 - t) * s.signal[i0][i] + t * s.signal[i1][i];
      const int idx = static_cast<int>(out.vertices.size());
      out.vertices.push_back(p);
      out.signal.push_back(std::move(m));
      out.cells.push_back({prev, idx});
      prev = idx;
    }
    out.cells.push_back({prev, i1});
  }
  return out;
}

}  // namespace fcur
