#pragma once

#include <cmath>
#include <vector>

#include "fcur/errors.hpp"
#include "fcur/fcurrent.hpp"
#include "fcur/kernel.hpp"
#include "fcur/linalg.hpp"
#include "fcur/parallel.hpp"

namespace fcur {

// <delta_a, delta_b>_{W'} = k_f(|m_a - m_b|) * k_g(|x_a - x_b|) * <xi_a, xi_b>.
inline double dirac_inner_product(const KernelConfig& cfg, const Dirac& a, const Dirac& b) {
  if (a.m.size() != b.m.size()) throw DimensionError("dirac_inner_product: signal dims differ");
  return cfg.sig.eval_sq(sig_dist2(a.m, b.m)) * cfg.geom.eval_sq(norm2(a.x - b.x)) *
         dot(a.xi, b.xi);
}

inline double eval_geom_kernel(const KernelConfig& cfg, const Vec& x1, const Vec& x2) {
  return cfg.geom.eval_sq(norm2(x1 - x2));
}

// Full double sum over atom pairs. Evaluated in fixed-size chunks so the
// result does not depend on the worker count.
inline double fcurrent_inner_product(const KernelConfig& cfg, const FCurrent& a,
                                     const FCurrent& b) {
  require_compatible(a, b);
  const std::size_t na = a.atoms.size(), nb = b.atoms.size();
  if (na == 0 || nb == 0) return 0.0;
  return chunked_sum(na * nb, [&](std::size_t idx) {
    const Dirac& x = a.atoms[idx / nb];
    const Dirac& y = b.atoms[idx % nb];
    return cfg.sig.eval_sq(sig_dist2(x.m, y.m)) * cfg.geom.eval_sq(norm2(x.x - y.x)) *
           dot(x.xi, y.xi);
  });
}

inline double fcurrent_norm(const KernelConfig& cfg, const FCurrent& a) {
  const double n2 = fcurrent_inner_product(cfg, a, a);
  return n2 > 0.0 ? std::sqrt(n2) : 0.0;
}

// RKHS distance sqrt(<A,A> - 2<A,B> + <B,B>), clamped at zero when the
// squared form goes negative by no more than 1e-12 (|A|^2 + |B|^2).
//
// For two signal assignments on a fixed discretized support the distance is
// bounded by  c/w_f * sum_i |xi_i| |m_i^1 - m_i^2|  with c = sqrt(2) for both
// the gaussian and the cauchy signal kernel (1 - k(r) <= (r/w)^2 in either
// case) and c = 0 for the constant kernel.
inline double fcurrent_distance(const KernelConfig& cfg, const FCurrent& a, const FCurrent& b) {
  const double aa = fcurrent_inner_product(cfg, a, a);
  const double bb = fcurrent_inner_product(cfg, b, b);
  const double ab = fcurrent_inner_product(cfg, a, b);
  const double d2 = aa - 2.0 * ab + bb;
  if (d2 < 0.0) {
    if (d2 < -1e-12 * (aa + bb))
      throw NumericError("fcurrent_distance: squared distance negative beyond tolerance");
    return 0.0;
  }
  return std::sqrt(d2);
}

struct Support {
  Vec x;
  Signal m;
};

// Scalar Gram matrix G_ij = k_f(|m_i - m_j|) k_g(|x_i - x_j|); symmetric with
// unit diagonal, positive semidefinite.
inline Matrix gram_matrix(const KernelConfig& cfg, const std::vector<Support>& supports) {
  if (supports.empty()) throw Error("gram_matrix: empty support list");
  const std::size_t n = supports.size();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (supports[i].m.size() != supports[j].m.size())
        throw DimensionError("gram_matrix: signal dims differ");
      const double v = cfg.sig.eval_sq(sig_dist2(supports[i].m, supports[j].m)) *
                       cfg.geom.eval_sq(norm2(supports[i].x - supports[j].x));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

}  // namespace fcur
