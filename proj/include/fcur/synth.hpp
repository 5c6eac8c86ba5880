#pragma once

#include <cmath>
#include <vector>

#include "fcur/errors.hpp"
#include "fcur/shape.hpp"

namespace fcur {

inline constexpr double kPi = 3.14159265358979323846;

// Half-duty square wave with `crenels` teeth of height `amplitude` around the
// circle; crenels = 0 gives a constant zero signal.
inline double crenel_signal(double theta, int crenels, double amplitude) {
  if (crenels <= 0) return 0.0;
  const double u = theta * crenels / (2.0 * kPi);
  const double frac = u - std::floor(u);
  return frac < 0.5 ? amplitude : 0.0;
}

// Unit circle sampled with `segments` edges, carrying a crenellated signal.
inline FunctionalShape synth_circle(int segments, int crenels = 0, double amplitude = 1.0) {
  if (segments < 3) throw Error("synth_circle: need at least 3 segments");
  FunctionalShape s;
  s.ambient_dim = 2;
  s.manifold_dim = 1;
  s.signal_dim = 1;
  for (int i = 0; i < segments; ++i) {
    const double theta = 2.0 * kPi * i / segments;
    s.vertices.push_back({std::cos(theta), std::sin(theta), 0.0});
    s.signal.push_back({crenel_signal(theta, crenels, amplitude)});
    s.cells.push_back({i, (i + 1) % segments});
  }
  return s;
}

// Ellipse contour with a smooth "stain" bump centered at stain_angle.
inline FunctionalShape synth_ellipse_stain(int segments, double rx, double ry,
                                           double stain_angle, double stain_width,
                                           double amplitude) {
  if (segments < 3) throw Error("synth_ellipse_stain: need at least 3 segments");
  if (!(rx > 0.0 && ry > 0.0 && stain_width > 0.0))
    throw Error("synth_ellipse_stain: radii and stain width must be positive");
  FunctionalShape s;
  s.ambient_dim = 2;
  s.manifold_dim = 1;
  s.signal_dim = 1;
  for (int i = 0; i < segments; ++i) {
    const double theta = 2.0 * kPi * i / segments;
    s.vertices.push_back({rx * std::cos(theta), ry * std::sin(theta), 0.0});
    double d = std::fmod(std::abs(theta - stain_angle), 2.0 * kPi);
    if (d > kPi) d = 2.0 * kPi - d;
    s.signal.push_back({amplitude * std::exp(-(d * d) / (stain_width * stain_width))});
    s.cells.push_back({i, (i + 1) % segments});
  }
  return s;
}

// Bundle of open planar curves, one signal value per fiber; the fibers are
// deliberately disconnected components of a single shape.
inline FunctionalShape synth_fiber_bundle(int fibers, int points_per_fiber = 20) {
  if (fibers < 1) throw Error("synth_fiber_bundle: need at least 1 fiber");
  if (points_per_fiber < 2) throw Error("synth_fiber_bundle: need at least 2 points per fiber");
  FunctionalShape s;
  s.ambient_dim = 2;
  s.manifold_dim = 1;
  s.signal_dim = 1;
  for (int f = 0; f < fibers; ++f) {
    const double u = fibers > 1 ? static_cast<double>(f) / (fibers - 1) : 0.5;
    const double x0 = -1.0 + 2.0 * u;
    const double bend = 0.25 * std::sin(2.0 * kPi * u);
    const int base = static_cast<int>(s.vertices.size());
    for (int i = 0; i < points_per_fiber; ++i) {
      const double t = static_cast<double>(i) / (points_per_fiber - 1);
      s.vertices.push_back({x0 + bend * std::sin(kPi * t), t, 0.0});
      s.signal.push_back({u});
      if (i > 0) s.cells.push_back({base + i - 1, base + i});
    }
  }
  return s;
}

// UV sphere with two signal caps around the poles (piecewise-constant signal,
// amplitude inside the caps, zero elsewhere).
inline FunctionalShape synth_sphere_caps(int rings, int sectors, double cap_angle = 0.6,
                                         double amplitude = 1.0) {
  if (rings < 3 || sectors < 3) throw Error("synth_sphere_caps: need rings >= 3, sectors >= 3");
  FunctionalShape s;
  s.ambient_dim = 3;
  s.manifold_dim = 2;
  s.signal_dim = 1;

  auto cap_value = [&](double polar) {
    return (polar < cap_angle || polar > kPi - cap_angle) ? amplitude : 0.0;
  };

  // poles + (rings - 1) interior rings of `sectors` points
  s.vertices.push_back({0.0, 0.0, 1.0});
  s.signal.push_back({cap_value(0.0)});
  for (int r = 1; r < rings; ++r) {
    const double polar = kPi * r / rings;
    for (int c = 0; c < sectors; ++c) {
      const double az = 2.0 * kPi * c / sectors;
      s.vertices.push_back({std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az),
                            std::cos(polar)});
      s.signal.push_back({cap_value(polar)});
    }
  }
  s.vertices.push_back({0.0, 0.0, -1.0});
  s.signal.push_back({cap_value(kPi)});
  const int south = static_cast<int>(s.vertices.size()) - 1;

  auto ring_vertex = [&](int r, int c) { return 1 + (r - 1) * sectors + (c % sectors); };

  for (int c = 0; c < sectors; ++c)
    s.cells.push_back({0, ring_vertex(1, c), ring_vertex(1, c + 1)});
  for (int r = 1; r + 1 < rings; ++r)
    for (int c = 0; c < sectors; ++c) {
      const int a = ring_vertex(r, c), b = ring_vertex(r, c + 1);
      const int d = ring_vertex(r + 1, c), e = ring_vertex(r + 1, c + 1);
      s.cells.push_back({a, d, e});
      s.cells.push_back({a, e, b});
    }
  for (int c = 0; c < sectors; ++c)
    s.cells.push_back({ring_vertex(rings - 1, c), south, ring_vertex(rings - 1, c + 1)});
  return s;
}

// Planar polyline grid covering [lo, hi]^2; handy for visualizing
// deformations by transporting it through a registration result.
inline FunctionalShape synth_grid(double lo, double hi, int lines, int samples_per_line) {
  if (lines < 2 || samples_per_line < 2) throw Error("synth_grid: need at least 2 lines/samples");
  FunctionalShape s;
  s.ambient_dim = 2;
  s.manifold_dim = 1;
  s.signal_dim = 1;
  auto add_line = [&](bool horizontal, double c) {
    const int base = static_cast<int>(s.vertices.size());
    for (int i = 0; i < samples_per_line; ++i) {
      const double t = lo + (hi - lo) * i / (samples_per_line - 1);
      s.vertices.push_back(horizontal ? Vec{t, c, 0.0} : Vec{c, t, 0.0});
      s.signal.push_back({0.0});
      if (i > 0) s.cells.push_back({base + i - 1, base + i});
    }
  };
  for (int l = 0; l < lines; ++l) {
    const double c = lo + (hi - lo) * l / (lines - 1);
    add_line(true, c);
    add_line(false, c);
  }
  return s;
}

}  // namespace fcur
