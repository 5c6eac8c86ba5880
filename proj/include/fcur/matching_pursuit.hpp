#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fcur/errors.hpp"
#include "fcur/fcurrent.hpp"
#include "fcur/kernel.hpp"
#include "fcur/linalg.hpp"
#include "fcur/metric.hpp"
#include "fcur/parallel.hpp"
#include "fcur/shape.hpp"

namespace fcur {

enum class MPVariant { greedy, orthogonal };
enum class MPDictionary { source_supports, grid };

struct MPConfig {
  double epsilon = 0.05;  // stop when |R_n| / |C| <= epsilon
  int max_atoms = 10000;
  MPVariant variant = MPVariant::orthogonal;
  MPDictionary dictionary = MPDictionary::source_supports;
  double grid_spacing = 0.0;  // required for the grid dictionary
  double ridge = -1.0;        // < 0: 1e-10 * trace(G)/n

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("mp: epsilon must be in (0,1)");
    if (max_atoms < 1) throw Error("mp: max_atoms must be >= 1");
    if (dictionary == MPDictionary::grid && !(grid_spacing > 0.0))
      throw Error("mp: grid dictionary needs a positive spacing");
  }
};

struct MPStep {
  int step = 0;
  int support = 0;  // candidate index in the dictionary
  double gamma_norm = 0.0;
  double residual_ratio = 0.0;
};

struct MPResult {
  int ambient_dim = 2;
  int manifold_dim = 1;
  int signal_dim = 1;
  std::vector<Dirac> atoms;            // selected supports with solved coefficients in xi
  std::vector<double> residual_norms;  // |R_0| = |C|, then one entry per step
  bool converged = false;
};

// Correlation of the residual C - sum_j delta^{alpha_j} with candidates at
// (x, m): gamma(x,m) = sum_i k K xi_i - sum_j k K alpha_j. The best unit
// volume element at (x,m) is gamma/|gamma|.
inline Vec correlation_field(const KernelConfig& cfg, const FCurrent& c,
                             const std::vector<Dirac>& selected, const Vec& x, const Signal& m) {
  Vec g;
  for (const Dirac& a : c.atoms)
    g += cfg.sig.eval_sq(sig_dist2(m, a.m)) * cfg.geom.eval_sq(norm2(x - a.x)) * a.xi;
  for (const Dirac& s : selected)
    g -= cfg.sig.eval_sq(sig_dist2(m, s.m)) * cfg.geom.eval_sq(norm2(x - s.x)) * s.xi;
  return g;
}

inline FCurrent reconstruct(const MPResult& r) {
  FCurrent c;
  c.ambient_dim = r.ambient_dim;
  c.manifold_dim = r.manifold_dim;
  c.signal_dim = r.signal_dim;
  c.atoms = r.atoms;
  return c;
}

namespace detail {

inline std::vector<Support> build_dictionary(const MPConfig& cfg, const FCurrent& c) {
  std::vector<Support> dict;
  if (cfg.dictionary == MPDictionary::source_supports) {
    dict.reserve(c.atoms.size());
    for (const Dirac& a : c.atoms) dict.push_back({a.x, a.m});
    return dict;
  }
  // Regular position grid over the atom bounding box, one cell of margin;
  // each grid node borrows the signal of the nearest source atom.
  Vec lo = c.atoms.front().x, hi = lo;
  for (const Dirac& a : c.atoms)
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], a.x[i]);
      hi[i] = std::max(hi[i], a.x[i]);
    }
  const double s = cfg.grid_spacing;
  const int dim = c.ambient_dim;
  std::vector<int> counts(3, 1);
  for (int i = 0; i < dim; ++i) {
    lo[i] -= s;
    hi[i] += s;
    counts[i] = static_cast<int>(std::floor((hi[i] - lo[i]) / s)) + 1;
  }
  for (int iz = 0; iz < counts[2]; ++iz)
    for (int iy = 0; iy < counts[1]; ++iy)
      for (int ix = 0; ix < counts[0]; ++ix) {
        Vec p{lo.x + ix * s, lo.y + iy * s, dim == 3 ? lo.z + iz * s : 0.0};
        double best = -1.0;
        const Signal* m = nullptr;
        for (const Dirac& a : c.atoms) {
          const double d2 = norm2(p - a.x);
          if (best < 0.0 || d2 < best) {
            best = d2;
            m = &a.m;
          }
        }
        dict.push_back({p, *m});
      }
  return dict;
}

}  // namespace detail

// Greedy / orthogonal matching pursuit under the W' norm. Greedy adds the
// best-correlated atom with its scalar projection; the orthogonal variant
// keeps the selected supports and re-solves all coefficient vectors through
// the Gram system so the residual stays orthogonal to the selection.
inline MPResult mp_compress(const MPConfig& cfg, const KernelConfig& kernels, const FCurrent& c,
                            std::vector<MPStep>* log = nullptr) {
  cfg.validate();
  kernels.validate();
  if (c.atoms.empty()) throw Error("mp_compress: input fcurrent is empty");

  const std::vector<Support> dict = detail::build_dictionary(cfg, c);
  const std::size_t ncand = dict.size();

  // Correlations of the original current at every candidate, reused at each
  // step: gamma(cand) = base[cand] - sum over selected atoms.
  std::vector<Vec> base(ncand);
  parallel_for(ncand, [&](std::size_t i) {
    Vec g;
    for (const Dirac& a : c.atoms)
      g += kernels.sig.eval_sq(sig_dist2(dict[i].m, a.m)) *
           kernels.geom.eval_sq(norm2(dict[i].x - a.x)) * a.xi;
    base[i] = g;
  });

  const double c_norm2 = fcurrent_inner_product(kernels, c, c);
  const double c_norm = std::sqrt(std::max(c_norm2, 0.0));

  MPResult res;
  res.ambient_dim = c.ambient_dim;
  res.manifold_dim = c.manifold_dim;
  res.signal_dim = c.signal_dim;
  res.residual_norms.push_back(c_norm);
  if (c_norm == 0.0) {
    res.converged = true;
    return res;
  }

  std::vector<int> selected;                 // candidate indices, in selection order
  std::vector<char> is_selected(ncand, 0);   // orthogonal mode: skip spanned supports
  std::vector<Vec> base_sel;                 // base correlations at the selected supports

  const int q = c.ambient_dim;  // volume elements live in R^n in all supported cases

  auto residual_norm2 = [&]() {
    // |R|^2 = |C|^2 - 2 sum_i alpha_i . base_i + sum_ij G_ij alpha_i . alpha_j
    double r2 = c_norm2;
    for (std::size_t i = 0; i < res.atoms.size(); ++i) {
      r2 -= 2.0 * dot(res.atoms[i].xi, base_sel[i]);
      for (std::size_t j = 0; j < res.atoms.size(); ++j) {
        const double g = kernels.sig.eval_sq(sig_dist2(res.atoms[i].m, res.atoms[j].m)) *
                         kernels.geom.eval_sq(norm2(res.atoms[i].x - res.atoms[j].x));
        r2 += g * dot(res.atoms[i].xi, res.atoms[j].xi);
      }
    }
    return std::max(r2, 0.0);
  };

  std::vector<Vec> gamma(ncand);
  for (int step = 1; static_cast<int>(res.atoms.size()) < cfg.max_atoms; ++step) {
    // Score all candidates against the current residual; the argmax scan is
    // serial so ties resolve to the lowest candidate index at any thread count.
    parallel_for(ncand, [&](std::size_t i) {
      Vec g = base[i];
      for (const Dirac& s : res.atoms)
        g -= kernels.sig.eval_sq(sig_dist2(dict[i].m, s.m)) *
             kernels.geom.eval_sq(norm2(dict[i].x - s.x)) * s.xi;
      gamma[i] = g;
    });
    int best = -1;
    double best_n2 = 0.0;
    for (std::size_t i = 0; i < ncand; ++i) {
      if (cfg.variant == MPVariant::orthogonal && is_selected[i]) continue;
      const double n2 = norm2(gamma[i]);
      if (best < 0 || n2 > best_n2) {
        best = static_cast<int>(i);
        best_n2 = n2;
      }
    }
    if (best < 0 || best_n2 == 0.0) break;
    const Vec best_gamma = gamma[best];

    selected.push_back(best);
    is_selected[best] = 1;
    base_sel.push_back(base[best]);

    if (cfg.variant == MPVariant::greedy) {
      // Unit direction gamma/|gamma| scaled by the projection <R, delta^u> = |gamma|.
      res.atoms.push_back({dict[best].x, dict[best].m, best_gamma});
    } else {
      res.atoms.push_back({dict[best].x, dict[best].m, Vec{}});
      const std::size_t n = res.atoms.size();
      std::vector<Support> sel_supports;
      sel_supports.reserve(n);
      for (const Dirac& a : res.atoms) sel_supports.push_back({a.x, a.m});
      Matrix gram = gram_matrix(kernels, sel_supports);
      double trace = 0.0;
      for (std::size_t i = 0; i < n; ++i) trace += gram(i, i);
      const double ridge = cfg.ridge >= 0.0 ? cfg.ridge : 1e-10 * trace / static_cast<double>(n);

      std::vector<std::vector<double>> rhs(q, std::vector<double>(n));
      for (int k = 0; k < q; ++k)
        for (std::size_t i = 0; i < n; ++i) rhs[k][i] = base_sel[i][k];
      double cond = 0.0;
      if (!cholesky_solve(gram, ridge, rhs, &cond))
        throw NumericError("mp_compress: singular Gram system (condition estimate " +
                           std::to_string(cond) + ")");
      for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < q; ++k) res.atoms[i].xi[k] = rhs[k][i];
    }

    const double rnorm = std::sqrt(residual_norm2());
    res.residual_norms.push_back(rnorm);
    if (log)
      log->push_back({step, best, std::sqrt(best_n2), rnorm / c_norm});
    if (rnorm / c_norm <= cfg.epsilon) {
      res.converged = true;
      break;
    }
    if (cfg.variant == MPVariant::orthogonal && selected.size() == ncand) break;
  }
  return res;
}

}  // namespace fcur
