#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fcur/discretize.hpp"
#include "fcur/errors.hpp"
#include "fcur/fcurrent.hpp"
#include "fcur/shape.hpp"
#include "fcur/vec.hpp"

namespace fcur {

enum class Integrator { euler, rk4 };

inline std::string to_string(Integrator i) { return i == Integrator::euler ? "euler" : "rk4"; }

inline Integrator integrator_from_string(const std::string& s) {
  if (s == "euler") return Integrator::euler;
  if (s == "rk4") return Integrator::rk4;
  throw Error("unknown integrator: " + s);
}

// Time-discretized kernel velocity field: P control-point trajectories over
// T steps with one momentum vector per control point and step. The field at
// step j is v_j(x) = sum_p k_V(|x - q_p(t_j)|) a_p(t_j) with a Gaussian k_V
// of width sigma_v, held frozen inside the step.
struct DeformationPath {
  int timesteps = 1;
  double sigma_v = 1.0;
  Integrator integrator = Integrator::rk4;
  std::vector<std::vector<Vec>> control_points;  // [T+1][P]
  std::vector<std::vector<Vec>> momenta;         // [T][P]

  double step() const { return 1.0 / timesteps; }

  void validate() const {
    if (timesteps < 1) throw Error("deformation path: timesteps must be >= 1");
    if (!(sigma_v > 0.0)) throw Error("deformation path: sigma_v must be positive");
    if (control_points.size() != static_cast<std::size_t>(timesteps) + 1 ||
        momenta.size() != static_cast<std::size_t>(timesteps))
      throw DimensionError("deformation path: array shapes inconsistent with timesteps");
    const std::size_t p = control_points.empty() ? 0 : control_points[0].size();
    for (const auto& row : control_points)
      if (row.size() != p) throw DimensionError("deformation path: ragged control points");
    for (const auto& row : momenta)
      if (row.size() != p) throw DimensionError("deformation path: ragged momenta");
  }
};

// Closed-form time-varying field for tests, with optionally declared
// chi^0 / chi^1 bounds.
struct AnalyticVelocityField {
  std::function<Vec(double t, const Vec& x)> v;
  double chi0 = 0.0;
  double chi1 = 0.0;
};

namespace detail {

inline Vec kernel_velocity(const std::vector<Vec>& sources, const std::vector<Vec>& momenta,
                           double sigma, const Vec& x) {
  const double inv_w2 = 1.0 / (sigma * sigma);
  Vec v;
  for (std::size_t p = 0; p < sources.size(); ++p)
    v += std::exp(-norm2(x - sources[p]) * inv_w2) * momenta[p];
  return v;
}

// One step of the frozen-field integrators used both by registration and by
// the transport of arbitrary points; stage positions are reported for the
// reverse-mode pass.
inline Vec step_frozen(const std::vector<Vec>& sources, const std::vector<Vec>& momenta,
                       double sigma, double h, Integrator integ, const Vec& x,
                       Vec* stage2 = nullptr, Vec* stage3 = nullptr, Vec* stage4 = nullptr) {
  if (integ == Integrator::euler) return x + h * kernel_velocity(sources, momenta, sigma, x);
  const Vec k1 = kernel_velocity(sources, momenta, sigma, x);
  const Vec x2 = x + (0.5 * h) * k1;
  const Vec k2 = kernel_velocity(sources, momenta, sigma, x2);
  const Vec x3 = x + (0.5 * h) * k2;
  const Vec k3 = kernel_velocity(sources, momenta, sigma, x3);
  const Vec x4 = x + h * k3;
  const Vec k4 = kernel_velocity(sources, momenta, sigma, x4);
  if (stage2) *stage2 = x2;
  if (stage3) *stage3 = x3;
  if (stage4) *stage4 = x4;
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void check_finite(const std::vector<Vec>& pts, int step, const char* what) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!is_finite(pts[i]))
      throw NumericError(std::string("flow diverged: ") + what + " " + std::to_string(i) +
                         " not finite at step " + std::to_string(step));
}

}  // namespace detail

// Velocity of the stored field at timestep j.
inline Vec velocity_at(const DeformationPath& path, int j, const Vec& x) {
  if (j < 0 || j >= path.timesteps) throw Error("velocity_at: timestep index out of range");
  return detail::kernel_velocity(path.control_points[j], path.momenta[j], path.sigma_v, x);
}

// Integrates the stored field; returns positions at every timestep,
// trajectories[j][i] with j in [0, T].
inline std::vector<std::vector<Vec>> flow_points(const DeformationPath& path,
                                                 const std::vector<Vec>& points) {
  path.validate();
  const double h = path.step();
  std::vector<std::vector<Vec>> traj(path.timesteps + 1);
  traj[0] = points;
  for (int j = 0; j < path.timesteps; ++j) {
    traj[j + 1].resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      traj[j + 1][i] = detail::step_frozen(path.control_points[j], path.momenta[j], path.sigma_v,
                                           h, path.integrator, traj[j][i]);
    detail::check_finite(traj[j + 1], j, "point");
  }
  return traj;
}

// Integrates an analytic time-varying field over [0,1] with T steps.
inline std::vector<std::vector<Vec>> flow_points(const AnalyticVelocityField& field,
                                                 const std::vector<Vec>& points, int timesteps,
                                                 Integrator integ) {
  if (timesteps < 1) throw Error("flow_points: timesteps must be >= 1");
  const double h = 1.0 / timesteps;
  std::vector<std::vector<Vec>> traj(timesteps + 1);
  traj[0] = points;
  for (int j = 0; j < timesteps; ++j) {
    const double t = j * h;
    traj[j + 1].resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vec& x = traj[j][i];
      if (integ == Integrator::euler) {
        traj[j + 1][i] = x + h * field.v(t, x);
      } else {
        const Vec k1 = field.v(t, x);
        const Vec k2 = field.v(t + 0.5 * h, x + (0.5 * h) * k1);
        const Vec k3 = field.v(t + 0.5 * h, x + (0.5 * h) * k2);
        const Vec k4 = field.v(t + h, x + h * k3);
        traj[j + 1][i] = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    detail::check_finite(traj[j + 1], j, "point");
  }
  return traj;
}

// Geometric action on a shape: vertices are flowed to t = 1, cells and signal
// values ride unchanged.
inline FunctionalShape transport_shape(const FunctionalShape& s, const DeformationPath& path) {
  require_valid(s);
  FunctionalShape out = s;
  out.vertices = flow_points(path, s.vertices).back();
  return out;
}

inline FunctionalShape transport_shape(const FunctionalShape& s,
                                       const AnalyticVelocityField& field, int timesteps,
                                       Integrator integ) {
  require_valid(s);
  FunctionalShape out = s;
  out.vertices = flow_points(field, s.vertices, timesteps, integ).back();
  return out;
}

struct Mat3 {
  double a[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
};

inline Vec mul(const Mat3& m, const Vec& v) {
  return {m.a[0][0] * v.x + m.a[0][1] * v.y + m.a[0][2] * v.z,
          m.a[1][0] * v.x + m.a[1][1] * v.y + m.a[1][2] * v.z,
          m.a[2][0] * v.x + m.a[2][1] * v.y + m.a[2][2] * v.z};
}

inline double det(const Mat3& m) {
  return m.a[0][0] * (m.a[1][1] * m.a[2][2] - m.a[1][2] * m.a[2][1]) -
         m.a[0][1] * (m.a[1][0] * m.a[2][2] - m.a[1][2] * m.a[2][0]) +
         m.a[0][2] * (m.a[1][0] * m.a[2][1] - m.a[1][1] * m.a[2][0]);
}

// Cofactor matrix: cof(J) (u x v) = (J u) x (J v); transforms area-weighted
// normals under the wedge-to-cross identification.
inline Mat3 cofactor(const Mat3& m) {
  Mat3 c;
  c.a[0][0] = m.a[1][1] * m.a[2][2] - m.a[1][2] * m.a[2][1];
  c.a[0][1] = m.a[1][2] * m.a[2][0] - m.a[1][0] * m.a[2][2];
  c.a[0][2] = m.a[1][0] * m.a[2][1] - m.a[1][1] * m.a[2][0];
  c.a[1][0] = m.a[0][2] * m.a[2][1] - m.a[0][1] * m.a[2][2];
  c.a[1][1] = m.a[0][0] * m.a[2][2] - m.a[0][2] * m.a[2][0];
  c.a[1][2] = m.a[0][1] * m.a[2][0] - m.a[0][0] * m.a[2][1];
  c.a[2][0] = m.a[0][1] * m.a[1][2] - m.a[0][2] * m.a[1][1];
  c.a[2][1] = m.a[0][2] * m.a[1][0] - m.a[0][0] * m.a[1][2];
  c.a[2][2] = m.a[0][0] * m.a[1][1] - m.a[0][1] * m.a[1][0];
  return c;
}

// Point map with an optional analytic Jacobian; when jacobian is absent,
// pushforward_atoms falls back to central finite differences.
struct PointMap {
  int dim = 3;
  std::function<Vec(const Vec&)> value;
  std::function<Mat3(const Vec&)> jacobian;  // may be empty
};

// Central finite-difference Jacobian; unused rows/columns of 2D maps stay at
// the identity so 3x3 determinants remain meaningful.
inline Mat3 fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, int dim,
                        double step) {
  Mat3 j;
  for (int c = 0; c < dim; ++c) {
    Vec xp = x, xm = x;
    xp[c] += step;
    xm[c] -= step;
    const Vec col = (1.0 / (2.0 * step)) * (f(xp) - f(xm));
    for (int r = 0; r < dim; ++r) j.a[r][c] = col[r];
    for (int r = dim; r < 3; ++r) j.a[r][c] = 0.0;
  }
  for (int c = dim; c < 3; ++c) {
    for (int r = 0; r < 3; ++r) j.a[r][c] = (r == c) ? 1.0 : 0.0;
  }
  return j;
}

// Endpoint map of a stored deformation path, for pushing atoms forward.
inline PointMap flow_endpoint_map(const DeformationPath& path, int dim) {
  PointMap m;
  m.dim = dim;
  m.value = [path](const Vec& x) { return flow_points(path, {x}).back().front(); };
  return m;
}

// Transport of Dirac atoms under (phi, psi): positions through phi, signals
// through psi (identity when absent), volume elements through d_x phi — the
// plain Jacobian for curves and the cofactor rule for surface normals.
inline FCurrent pushforward_atoms(const FCurrent& c, const PointMap& map,
                                  const std::function<Signal(const Signal&)>& psi = {}) {
  FCurrent out;
  out.ambient_dim = c.ambient_dim;
  out.manifold_dim = c.manifold_dim;
  out.signal_dim = c.signal_dim;
  out.atoms.reserve(c.atoms.size());

  double fd_step = 1e-5;
  if (!map.jacobian) {
    std::vector<Vec> pos;
    pos.reserve(c.atoms.size());
    for (const Dirac& a : c.atoms) pos.push_back(a.x);
    const double diam = bounding_box_diagonal(pos);
    if (diam > 0.0) fd_step = 1e-5 * diam;
  }

  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    const Dirac& a = c.atoms[i];
    Mat3 j = map.jacobian ? map.jacobian(a.x) : fd_jacobian(map.value, a.x, map.dim, fd_step);
    if (std::abs(det(j)) < 1e-12)
      throw NumericError("pushforward_atoms: singular Jacobian at atom " + std::to_string(i));
    Dirac b;
    b.x = map.value(a.x);
    b.m = psi ? psi(a.m) : a.m;
    b.xi = (c.manifold_dim == 1) ? mul(j, a.xi) : mul(cofactor(j), a.xi);
    if (!is_finite(b.x) || !is_finite(b.xi) || !is_finite(b.m))
      throw NumericError("pushforward_atoms: non-finite image at atom " + std::to_string(i));
    out.atoms.push_back(std::move(b));
  }
  return out;
}

}  // namespace fcur
