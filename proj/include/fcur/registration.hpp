#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fcur/discretize.hpp"
#include "fcur/errors.hpp"
#include "fcur/flow.hpp"
#include "fcur/kernel.hpp"
#include "fcur/metric.hpp"
#include "fcur/shape.hpp"

namespace fcur {

// LDDMM over a time-discretized kernel velocity field: control points are the
// source vertices, one free momentum vector per control point and timestep.
// Minimizes  sum_j h a^T K_V(q_j) a  +  lambda * d_W'(C(phi(S)), C(T))^2
// where the deformed current is obtained by flowing the vertices and
// re-discretizing (geometric action: signal values ride unchanged).
struct RegistrationConfig {
  KernelConfig kernels;
  double sigma_v = 1.0;
  int timesteps = 10;
  double lambda = 1.0;
  int max_iters = 200;
  double grad_tol = 1e-6;
  double step_init = 1.0;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  Integrator integrator = Integrator::euler;

  void validate() const {
    kernels.validate();
    if (!(sigma_v > 0.0)) throw Error("registration: sigma_v must be positive");
    if (timesteps < 1) throw Error("registration: timesteps must be >= 1");
    if (!(lambda > 0.0)) throw Error("registration: lambda must be positive");
    if (max_iters < 0) throw Error("registration: max_iters must be >= 0");
    if (!(backtrack > 0.0 && backtrack < 1.0))
      throw Error("registration: backtracking factor must be in (0,1)");
    if (!(step_init > 0.0) || !(sufficient_decrease > 0.0))
      throw Error("registration: line-search parameters must be positive");
  }
};

using Momenta = std::vector<std::vector<Vec>>;  // [T][P]

struct EnergyBreakdown {
  double kinetic = 0.0;
  double attachment = 0.0;
  double total = 0.0;
};

struct RegistrationResult {
  DeformationPath path;
  FunctionalShape deformed_source;
  std::vector<EnergyBreakdown> energy_trace;  // one entry per accepted iterate
  double final_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct RegContext {
  const RegistrationConfig* cfg = nullptr;
  const FunctionalShape* source = nullptr;
  FCurrent target;
  double tt = 0.0;  // <C_T, C_T>
};

inline RegContext make_context(const RegistrationConfig& cfg, const FunctionalShape& source,
                               const FunctionalShape& target) {
  cfg.validate();
  require_valid(source);
  require_valid(target);
  if (source.ambient_dim != target.ambient_dim || source.manifold_dim != target.manifold_dim ||
      source.signal_dim != target.signal_dim)
    throw DimensionError("registration: source and target dimensions differ");
  RegContext ctx;
  ctx.cfg = &cfg;
  ctx.source = &source;
  // Degenerate atoms are kept (they carry zero volume element) so the energy
  // stays smooth in the vertex positions.
  ctx.target = atoms_from_positions(target, target.vertices, false, nullptr);
  ctx.tt = fcurrent_inner_product(cfg.kernels, ctx.target, ctx.target);
  return ctx;
}

inline void check_momenta_shape(const RegContext& ctx, const Momenta& momenta) {
  const std::size_t t = static_cast<std::size_t>(ctx.cfg->timesteps);
  const std::size_t p = ctx.source->vertices.size();
  if (momenta.size() != t) throw DimensionError("registration: momenta timestep count mismatch");
  for (const auto& row : momenta)
    if (row.size() != p) throw DimensionError("registration: momenta point count mismatch");
}

struct FlowForward {
  std::vector<std::vector<Vec>> q;  // [T+1][P] control-point trajectories
  // rk4 stage positions per step (x2, x3, x4); x1 is q[j] itself
  std::vector<std::vector<Vec>> x2, x3, x4;
};

inline FlowForward forward_flow(const RegContext& ctx, const Momenta& momenta) {
  const RegistrationConfig& cfg = *ctx.cfg;
  const std::size_t p = ctx.source->vertices.size();
  const double h = 1.0 / cfg.timesteps;
  const bool rk4 = cfg.integrator == Integrator::rk4;

  FlowForward f;
  f.q.resize(cfg.timesteps + 1);
  f.q[0] = ctx.source->vertices;
  if (rk4) {
    f.x2.assign(cfg.timesteps, std::vector<Vec>(p));
    f.x3.assign(cfg.timesteps, std::vector<Vec>(p));
    f.x4.assign(cfg.timesteps, std::vector<Vec>(p));
  }
  for (int j = 0; j < cfg.timesteps; ++j) {
    f.q[j + 1].resize(p);
    for (std::size_t i = 0; i < p; ++i)
      f.q[j + 1][i] = step_frozen(f.q[j], momenta[j], cfg.sigma_v, h, cfg.integrator, f.q[j][i],
                                  rk4 ? &f.x2[j][i] : nullptr, rk4 ? &f.x3[j][i] : nullptr,
                                  rk4 ? &f.x4[j][i] : nullptr);
    check_finite(f.q[j + 1], j, "control point");
  }
  return f;
}

inline double kinetic_term(const std::vector<Vec>& q, const std::vector<Vec>& a, double sigma) {
  const double inv_w2 = 1.0 / (sigma * sigma);
  double s = 0.0;
  for (std::size_t p = 0; p < q.size(); ++p)
    for (std::size_t r = 0; r < q.size(); ++r)
      s += std::exp(-norm2(q[p] - q[r]) * inv_w2) * dot(a[p], a[r]);
  return s;
}

// Pullback of W through out_p = sum_s k(|X_p - Q_s|) A_s with Gaussian k.
// Accumulates into gX (eval points), gQ (kernel sources) and gA (momenta).
inline void field_vjp(const std::vector<Vec>& xpts, const std::vector<Vec>& q,
                      const std::vector<Vec>& a, const std::vector<Vec>& w, double sigma,
                      std::vector<Vec>& gx, std::vector<Vec>& gq, std::vector<Vec>& ga) {
  const double inv_w2 = 1.0 / (sigma * sigma);
  for (std::size_t p = 0; p < xpts.size(); ++p) {
    for (std::size_t s = 0; s < q.size(); ++s) {
      const Vec u = xpts[p] - q[s];
      const double k = std::exp(-norm2(u) * inv_w2);
      const Vec g = (-2.0 * inv_w2 * k * dot(w[p], a[s])) * u;
      gx[p] += g;
      gq[s] -= g;
      ga[s] += k * w[p];
    }
  }
}

// Reverse sweep of one integration step: given mu = dE/dq^{j+1}, accumulates
// dE/dq^j into gq_out and dE/da^j into ga_out.
inline void adjoint_step(const RegContext& ctx, const FlowForward& f, const Momenta& momenta,
                         int j, const std::vector<Vec>& mu, std::vector<Vec>& gq_out,
                         std::vector<Vec>& ga_out) {
  const RegistrationConfig& cfg = *ctx.cfg;
  const double h = 1.0 / cfg.timesteps;
  const double sigma = cfg.sigma_v;
  const std::size_t p = mu.size();
  const std::vector<Vec>& q = f.q[j];
  const std::vector<Vec>& a = momenta[j];

  gq_out = mu;  // identity part of q' = q + ...
  ga_out.assign(p, Vec{});

  if (cfg.integrator == Integrator::euler) {
    std::vector<Vec> gx(p), gq(p), ga(p);
    field_vjp(q, q, a, mu, sigma, gx, gq, ga);
    for (std::size_t i = 0; i < p; ++i) {
      gq_out[i] += h * (gx[i] + gq[i]);
      ga_out[i] += h * ga[i];
    }
    return;
  }

  // rk4 with the field frozen at (q, a) inside the step:
  //   k1 = V(q), k2 = V(q + h/2 k1), k3 = V(q + h/2 k2), k4 = V(q + h k3),
  //   q' = q + h/6 (k1 + 2 k2 + 2 k3 + k4)
  std::vector<Vec> wk1(p), wk2(p), wk3(p), wk4(p);
  for (std::size_t i = 0; i < p; ++i) {
    wk1[i] = (h / 6.0) * mu[i];
    wk2[i] = (h / 3.0) * mu[i];
    wk3[i] = (h / 3.0) * mu[i];
    wk4[i] = (h / 6.0) * mu[i];
  }
  auto stage = [&](const std::vector<Vec>& xstage, std::vector<Vec>& wk,
                   std::vector<Vec>& gx_stage) {
    std::vector<Vec> gq(p), ga(p);
    gx_stage.assign(p, Vec{});
    field_vjp(xstage, q, a, wk, sigma, gx_stage, gq, ga);
    for (std::size_t i = 0; i < p; ++i) {
      gq_out[i] += gq[i];
      ga_out[i] += ga[i];
    }
  };
  std::vector<Vec> gx(p);
  stage(f.x4[j], wk4, gx);  // x4 = q + h k3
  for (std::size_t i = 0; i < p; ++i) {
    gq_out[i] += gx[i];
    wk3[i] += h * gx[i];
  }
  stage(f.x3[j], wk3, gx);  // x3 = q + h/2 k2
  for (std::size_t i = 0; i < p; ++i) {
    gq_out[i] += gx[i];
    wk2[i] += (h / 2.0) * gx[i];
  }
  stage(f.x2[j], wk2, gx);  // x2 = q + h/2 k1
  for (std::size_t i = 0; i < p; ++i) {
    gq_out[i] += gx[i];
    wk1[i] += (h / 2.0) * gx[i];
  }
  stage(q, wk1, gx);  // x1 = q
  for (std::size_t i = 0; i < p; ++i) gq_out[i] += gx[i];
}

// Gradient of lambda * d^2(C(Y), C_T) with respect to the final vertex
// positions Y, chained through midpoints / edge vectors (curves) or
// centroids / half cross products (surfaces).
inline std::vector<Vec> attachment_vertex_gradient(const RegContext& ctx,
                                                   const std::vector<Vec>& y,
                                                   const FCurrent& deformed) {
  const KernelConfig& k = ctx.cfg->kernels;
  const FunctionalShape& s = *ctx.source;
  const double lambda = ctx.cfg->lambda;
  const std::size_t ne = deformed.atoms.size();

  std::vector<Vec> gc(ne), gxi(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Dirac& ae = deformed.atoms[e];
    // d/dc_e and d/dxi_e of <S,S>
    for (std::size_t f2 = 0; f2 < ne; ++f2) {
      const Dirac& af = deformed.atoms[f2];
      const double kf = k.sig.eval_sq(sig_dist2(ae.m, af.m));
      const double s2 = norm2(ae.x - af.x);
      gc[e] += (4.0 * kf * k.geom.d_eval_sq(s2) * dot(ae.xi, af.xi)) * (ae.x - af.x);
      gxi[e] += (2.0 * kf * k.geom.eval_sq(s2)) * af.xi;
    }
    // d/dc_e and d/dxi_e of -2 <S,T>
    for (const Dirac& at : ctx.target.atoms) {
      const double kf = k.sig.eval_sq(sig_dist2(ae.m, at.m));
      const double s2 = norm2(ae.x - at.x);
      gc[e] -= (4.0 * kf * k.geom.d_eval_sq(s2) * dot(ae.xi, at.xi)) * (ae.x - at.x);
      gxi[e] -= (2.0 * kf * k.geom.eval_sq(s2)) * at.xi;
    }
    gc[e] = lambda * gc[e];
    gxi[e] = lambda * gxi[e];
  }

  std::vector<Vec> gy(y.size());
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& cell = s.cells[e];
    if (s.manifold_dim == 1) {
      gy[cell[0]] += 0.5 * gc[e] - gxi[e];
      gy[cell[1]] += 0.5 * gc[e] + gxi[e];
    } else {
      const Vec u = y[cell[1]] - y[cell[0]];
      const Vec v = y[cell[2]] - y[cell[0]];
      const Vec w = gxi[e];
      const Vec dj = 0.5 * cross(v, w);  // d(xi . w)/dy_1
      const Vec dk = 0.5 * cross(w, u);  // d(xi . w)/dy_2
      gy[cell[0]] += (1.0 / 3.0) * gc[e] - dj - dk;
      gy[cell[1]] += (1.0 / 3.0) * gc[e] + dj;
      gy[cell[2]] += (1.0 / 3.0) * gc[e] + dk;
    }
  }
  return gy;
}

inline EnergyBreakdown energy_impl(const RegContext& ctx, const Momenta& momenta,
                                   FlowForward* fwd_out = nullptr, FCurrent* cur_out = nullptr) {
  const RegistrationConfig& cfg = *ctx.cfg;
  check_momenta_shape(ctx, momenta);
  FlowForward f = forward_flow(ctx, momenta);

  const double h = 1.0 / cfg.timesteps;
  EnergyBreakdown e;
  for (int j = 0; j < cfg.timesteps; ++j)
    e.kinetic += h * kinetic_term(f.q[j], momenta[j], cfg.sigma_v);

  FCurrent deformed = atoms_from_positions(*ctx.source, f.q.back(), false, nullptr);
  const double ss = fcurrent_inner_product(cfg.kernels, deformed, deformed);
  const double st = fcurrent_inner_product(cfg.kernels, deformed, ctx.target);
  e.attachment = cfg.lambda * (ss - 2.0 * st + ctx.tt);
  e.total = e.kinetic + e.attachment;

  if (fwd_out) *fwd_out = std::move(f);
  if (cur_out) *cur_out = std::move(deformed);
  return e;
}

inline Momenta gradient_impl(const RegContext& ctx, const Momenta& momenta, bool with_kinetic,
                             bool with_attachment, EnergyBreakdown* energy_out = nullptr) {
  const RegistrationConfig& cfg = *ctx.cfg;
  check_momenta_shape(ctx, momenta);

  FlowForward f;
  FCurrent deformed;
  EnergyBreakdown e = energy_impl(ctx, momenta, &f, &deformed);
  if (energy_out) *energy_out = e;

  const std::size_t p = ctx.source->vertices.size();
  const double h = 1.0 / cfg.timesteps;
  const double inv_w2 = 1.0 / (cfg.sigma_v * cfg.sigma_v);

  std::vector<Vec> mu(p);
  if (with_attachment) mu = attachment_vertex_gradient(ctx, f.q.back(), deformed);

  Momenta grad(cfg.timesteps, std::vector<Vec>(p));
  for (int j = cfg.timesteps - 1; j >= 0; --j) {
    std::vector<Vec> gq, ga;
    adjoint_step(ctx, f, momenta, j, mu, gq, ga);
    grad[j] = ga;

    if (with_kinetic) {
      const std::vector<Vec>& q = f.q[j];
      const std::vector<Vec>& a = momenta[j];
      for (std::size_t s = 0; s < p; ++s) {
        Vec gas{}, gqs{};
        for (std::size_t r = 0; r < p; ++r) {
          const Vec u = q[s] - q[r];
          const double k = std::exp(-norm2(u) * inv_w2);
          gas += (2.0 * k) * a[r];
          gqs += (-4.0 * inv_w2 * k * dot(a[s], a[r])) * u;
        }
        grad[j][s] += h * gas;
        gq[s] += h * gqs;
      }
    }
    mu = std::move(gq);
  }
  return grad;
}

}  // namespace detail

inline EnergyBreakdown reg_energy(const RegistrationConfig& cfg, const FunctionalShape& source,
                                  const FunctionalShape& target, const Momenta& momenta) {
  auto ctx = detail::make_context(cfg, source, target);
  return detail::energy_impl(ctx, momenta);
}

// Exact gradient of the discrete energy with respect to the momenta, by
// reverse accumulation through the flow steps, the re-discretization and the
// kernel sums.
inline Momenta reg_gradient(const RegistrationConfig& cfg, const FunctionalShape& source,
                            const FunctionalShape& target, const Momenta& momenta,
                            EnergyBreakdown* energy_out = nullptr) {
  auto ctx = detail::make_context(cfg, source, target);
  return detail::gradient_impl(ctx, momenta, true, true, energy_out);
}

// Kinetic and attachment gradient components, separately (their sum is the
// full gradient; the attachment part scales linearly with lambda).
inline void reg_gradient_parts(const RegistrationConfig& cfg, const FunctionalShape& source,
                               const FunctionalShape& target, const Momenta& momenta,
                               Momenta& kinetic_part, Momenta& attachment_part) {
  auto ctx = detail::make_context(cfg, source, target);
  kinetic_part = detail::gradient_impl(ctx, momenta, true, false);
  attachment_part = detail::gradient_impl(ctx, momenta, false, true);
}

inline Momenta zero_momenta(const RegistrationConfig& cfg, const FunctionalShape& source) {
  return Momenta(cfg.timesteps, std::vector<Vec>(source.vertices.size()));
}

namespace detail {

inline double momenta_norm2(const Momenta& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (const Vec& v : row) s += norm2(v);
  return s;
}

}  // namespace detail

// Gradient descent with backtracking line search from zero momenta. Stops on
// the gradient tolerance, the iteration cap, or line-search collapse; the
// energy trace decreases strictly at every accepted step.
inline RegistrationResult register_shapes(const RegistrationConfig& cfg,
                                          const FunctionalShape& source,
                                          const FunctionalShape& target) {
  auto ctx = detail::make_context(cfg, source, target);
  Momenta momenta = zero_momenta(cfg, source);

  RegistrationResult res;
  EnergyBreakdown e;
  Momenta grad = detail::gradient_impl(ctx, momenta, true, true, &e);
  if (!std::isfinite(e.total)) throw NumericError("registration: non-finite initial energy");
  res.energy_trace.push_back(e);

  double step = cfg.step_init;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const double g2 = detail::momenta_norm2(grad);
    const double gnorm = std::sqrt(g2);
    if (gnorm <= cfg.grad_tol) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    Momenta cand;
    EnergyBreakdown ec;
    double s = step;
    for (int bt = 0; bt < 60; ++bt) {
      cand = momenta;
      for (std::size_t j = 0; j < cand.size(); ++j)
        for (std::size_t i = 0; i < cand[j].size(); ++i) cand[j][i] -= s * grad[j][i];
      bool ok = true;
      try {
        ec = detail::energy_impl(ctx, cand);
      } catch (const NumericError&) {
        ok = false;  // diverging trial step: shrink and retry
      }
      if (ok && std::isfinite(ec.total) &&
          ec.total <= e.total - cfg.sufficient_decrease * s * g2) {
        accepted = true;
        break;
      }
      s *= cfg.backtrack;
    }
    if (!accepted) break;  // step collapse

    momenta = std::move(cand);
    grad = detail::gradient_impl(ctx, momenta, true, true, &e);
    res.energy_trace.push_back(e);
    res.iterations = iter + 1;
    step = 2.0 * s;
    if (std::sqrt(detail::momenta_norm2(grad)) <= cfg.grad_tol) {
      res.converged = true;
      break;
    }
  }

  res.final_gradient_norm = std::sqrt(detail::momenta_norm2(grad));

  detail::FlowForward f = detail::forward_flow(ctx, momenta);
  res.path.timesteps = cfg.timesteps;
  res.path.sigma_v = cfg.sigma_v;
  res.path.integrator = cfg.integrator;
  res.path.control_points = f.q;
  res.path.momenta = momenta;
  res.deformed_source = source;
  res.deformed_source.vertices = f.q.back();
  return res;
}

// Flows any shape in the source's ambient space through the stored path
// (deformation grids, held-out shapes). Applying it to the source itself
// reproduces deformed_source.
inline FunctionalShape apply_result(const RegistrationResult& res, const FunctionalShape& s) {
  return transport_shape(s, res.path);
}

}  // namespace fcur
