#pragma once

#include <cmath>
#include <vector>

#include "fcur/discretize.hpp"
#include "fcur/errors.hpp"
#include "fcur/fcurrent.hpp"
#include "fcur/kernel.hpp"
#include "fcur/metric.hpp"
#include "fcur/shape.hpp"

namespace fcur {

// The two representations rejected in favor of fcurrents, kept around so
// their failure modes stay demonstrable.

// Colored current: atoms (x_i, f_i * xi_i) with scalar f. The signal is
// folded into the volume element, which is exactly its weakness: the
// representation of (f, xi) and (r f, xi / r) coincide.
struct ColoredAtom {
  Vec x;
  Vec w;  // f * xi
};

struct ColoredCurrent {
  int ambient_dim = 2;
  std::vector<ColoredAtom> atoms;
};

inline ColoredCurrent colored_current(const FunctionalShape& s) {
  if (s.signal_dim != 1)
    throw DimensionError("colored_current: requires a scalar signal (k = 1)");
  const FCurrent c = discretize(s);
  ColoredCurrent out;
  out.ambient_dim = c.ambient_dim;
  out.atoms.reserve(c.atoms.size());
  for (const Dirac& a : c.atoms) out.atoms.push_back({a.x, a.m[0] * a.xi});
  return out;
}

inline ColoredCurrent scale_weights(ColoredCurrent c, double r) {
  for (ColoredAtom& a : c.atoms) a.w = r * a.w;
  return c;
}

// Geometric-kernel-only metric on colored currents.
inline double colored_inner_product(const RadialKernel& geom, const ColoredCurrent& a,
                                    const ColoredCurrent& b) {
  if (a.ambient_dim != b.ambient_dim)
    throw DimensionError("colored currents have mismatched dimensions");
  double s = 0.0;
  for (const ColoredAtom& x : a.atoms)
    for (const ColoredAtom& y : b.atoms)
      s += geom.eval_sq(norm2(x.x - y.x)) * dot(x.w, y.w);
  return s;
}

inline double colored_distance(const RadialKernel& geom, const ColoredCurrent& a,
                               const ColoredCurrent& b) {
  const double aa = colored_inner_product(geom, a, a);
  const double bb = colored_inner_product(geom, b, b);
  const double ab = colored_inner_product(geom, a, b);
  const double d2 = aa - 2.0 * ab + bb;
  return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}

// Product-space current: a planar curve with scalar signal lifted to its
// graph (x, y, f) in R^3 and treated as a plain 1-current there. Signal
// variation becomes geometry, so connectivity of the support matters.
inline FunctionalShape product_space_lift(const FunctionalShape& s) {
  if (s.ambient_dim != 2 || s.manifold_dim != 1 || s.signal_dim != 1)
    throw DimensionError("product_space_lift: requires a planar curve with scalar signal");
  require_valid(s);
  FunctionalShape out;
  out.ambient_dim = 3;
  out.manifold_dim = 1;
  out.signal_dim = 1;
  out.cells = s.cells;
  out.vertices.reserve(s.vertices.size());
  out.signal.assign(s.vertices.size(), Signal{0.0});
  for (std::size_t i = 0; i < s.vertices.size(); ++i)
    out.vertices.push_back({s.vertices[i].x, s.vertices[i].y, s.signal[i][0]});
  return out;
}

inline FCurrent product_space_current(const FunctionalShape& s) {
  return discretize_curve(product_space_lift(s));
}

inline double product_space_distance(const RadialKernel& geom, const FunctionalShape& a,
                                     const FunctionalShape& b) {
  KernelConfig cfg;
  cfg.geom = geom;
  cfg.sig = RadialKernel{RadialKind::constant, 1.0};
  return fcurrent_distance(cfg, product_space_current(a), product_space_current(b));
}

}  // namespace fcur
