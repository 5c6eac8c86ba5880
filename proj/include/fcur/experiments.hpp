#pragma once

#include <cmath>
#include <vector>

#include "fcur/discretize.hpp"
#include "fcur/errors.hpp"
#include "fcur/kernel.hpp"
#include "fcur/metric.hpp"
#include "fcur/synth.hpp"

namespace fcur {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw Error("linear_fit: need two same-length samples");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

// Exact arc-length integral of |f - f o rot_dtheta^{-1}| on the unit circle
// for the half-duty crenel signal: every jump sweeps an arc of the rotation
// angle, reduced modulo the crenel period.
inline double crenel_l1_distance(int crenels, double amplitude, double dtheta) {
  if (crenels <= 0) return 0.0;
  const double period = 2.0 * kPi / crenels;
  double t = std::fmod(std::abs(dtheta), period);
  const double sweep = t <= 0.5 * period ? 2.0 * t : 2.0 * (period - t);
  return crenels * amplitude * sweep;
}

struct CrenelRow {
  double dtheta = 0.0;
  double wprime = 0.0;  // RKHS distance between the shape and its rotation
  double l1 = 0.0;      // exact signal L^1 mismatch on the circle
};

// The crenellated-circle experiment: the functional shape is rotated by
// dtheta (the circle is invariant, so this realizes f -> f o rot^{-1}); the
// W' distance grows like O(dtheta) while the L^1 distance scales with the
// number of crenels.
inline std::vector<CrenelRow> crenel_experiment(int segments, int crenels, double amplitude,
                                                const KernelConfig& kernels,
                                                const std::vector<double>& dthetas) {
  kernels.validate();
  const FunctionalShape base = synth_circle(segments, crenels, amplitude);
  const FCurrent c0 = discretize_curve(base);

  std::vector<CrenelRow> rows;
  rows.reserve(dthetas.size());
  for (double dt : dthetas) {
    FunctionalShape rotated = base;
    const double cs = std::cos(dt), sn = std::sin(dt);
    for (Vec& v : rotated.vertices) v = {cs * v.x - sn * v.y, sn * v.x + cs * v.y, 0.0};
    const FCurrent c1 = discretize_curve(rotated);
    rows.push_back({dt, fcurrent_distance(kernels, c0, c1),
                    crenel_l1_distance(crenels, amplitude, dt)});
  }
  return rows;
}

}  // namespace fcur
