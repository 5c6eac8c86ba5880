#pragma once

#include <vector>

#include "fcur/errors.hpp"
#include "fcur/vec.hpp"

namespace fcur {

// One atom delta_{(x,m)}^{xi}: a position, a signal value and an oriented
// volume element (tangent vector for curves, area-weighted normal for
// surfaces via the wedge-to-cross-product identification in R^3).
struct Dirac {
  Vec x;
  Signal m;
  Vec xi;
};

// A finite sum of Dirac atoms; the discrete representation of a functional
// current, with a computable RKHS norm (see metric.hpp).
struct FCurrent {
  int ambient_dim = 2;
  int manifold_dim = 1;
  int signal_dim = 1;
  std::vector<Dirac> atoms;
};

// Sum of |xi_i|: the discrete bound on the mass norm.
inline double discrete_mass(const FCurrent& c) {
  double s = 0.0;
  for (const Dirac& a : c.atoms) s += norm(a.xi);
  return s;
}

// Rescales every volume element by r, positions and signals untouched.
inline FCurrent scale_atoms(FCurrent c, double r) {
  if (r == 0.0) throw Error("scale_atoms: factor must be nonzero");
  for (Dirac& a : c.atoms) a.xi = r * a.xi;
  return c;
}

inline void require_compatible(const FCurrent& a, const FCurrent& b) {
  if (a.ambient_dim != b.ambient_dim || a.manifold_dim != b.manifold_dim ||
      a.signal_dim != b.signal_dim)
    throw DimensionError("fcurrents have mismatched dimensions");
}

}  // namespace fcur
