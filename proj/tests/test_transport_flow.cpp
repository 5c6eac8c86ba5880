#include <cmath>

#include "doctest.h"
#include "fcur/discretize.hpp"
#include "fcur/flow.hpp"
#include "fcur/kernel.hpp"
#include "fcur/metric.hpp"
#include "fcur/synth.hpp"
#include "oracles.hpp"

using namespace fcur;

namespace {

DeformationPath single_step_path(std::vector<Vec> controls, std::vector<Vec> momenta,
                                 double sigma, Integrator integ = Integrator::rk4) {
  DeformationPath p;
  p.timesteps = 1;
  p.sigma_v = sigma;
  p.integrator = integ;
  p.control_points = {controls, controls};
  p.momenta = {momenta};
  return p;
}

}  // namespace

TEST_CASE("velocity_at evaluates the kernel field") {
  const DeformationPath zero =
      single_step_path({{0, 0, 0}, {1, 0, 0}}, {{0, 0, 0}, {0, 0, 0}}, 0.5);
  CHECK(velocity_at(zero, 0, {0.3, 0.3, 0}) == Vec{0, 0, 0});

  const Vec a{0.4, -0.2, 0};
  const DeformationPath one = single_step_path({{0.7, 0.1, 0}}, {a}, 0.5);
  CHECK(velocity_at(one, 0, {0.7, 0.1, 0}) == a);

  // two symmetric control points with opposite momenta cancel at the midpoint
  const DeformationPath sym = single_step_path({{-1, 0, 0}, {1, 0, 0}},
                                               {{0, 0.8, 0}, {0, -0.8, 0}}, 0.9);
  CHECK(norm(velocity_at(sym, 0, {0, 0, 0})) < 1e-15);

  CHECK_THROWS_AS(velocity_at(sym, 1, {0, 0, 0}), Error);
}

TEST_CASE("constant-in-space field is integrated exactly by both integrators") {
  const Vec u{0.25, -0.5, 0};
  AnalyticVelocityField field;
  field.v = [u](double, const Vec&) { return u; };
  const std::vector<Vec> pts = {{0, 0, 0}, {1, 2, 0}, {-0.5, 0.25, 0}};
  for (Integrator integ : {Integrator::euler, Integrator::rk4}) {
    const auto traj = flow_points(field, pts, 7, integ);
    for (std::size_t i = 0; i < pts.size(); ++i)
      CHECK(norm(traj.back()[i] - (pts[i] + u)) < 1e-15);
  }
}

TEST_CASE("rotation field: rk4 endpoint matches the matrix exponential") {
  // v(x) = A x with A the quarter-turn generator; phi_1 = exp(A) = rot(pi/2)
  const double omega = kPi / 2.0;
  AnalyticVelocityField field;
  field.v = [omega](double, const Vec& x) { return Vec{-omega * x.y, omega * x.x, 0}; };
  const std::vector<Vec> pts = {{1, 0, 0}, {0.3, -0.7, 0}, {-2, 0.5, 0}};
  const auto traj = flow_points(field, pts, 20, Integrator::rk4);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec want = oracle::rotate2d(pts[i], omega);
    CHECK(norm(traj.back()[i] - want) <= 1e-6 * norm(pts[i]));
  }
}

TEST_CASE("zero field gives the identity flow") {
  AnalyticVelocityField field;
  field.v = [](double, const Vec&) { return Vec{}; };
  const std::vector<Vec> pts = {{0.1, 0.2, 0}, {3, -4, 0}};
  const auto traj = flow_points(field, pts, 5, Integrator::rk4);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(traj.back()[i] == pts[i]);
}

TEST_CASE("transport_shape applies the geometric action") {
  oracle::Rng rng(61);
  const FunctionalShape s = oracle::random_polyline(rng, 8);

  SUBCASE("zero path is the identity") {
    const DeformationPath zero = single_step_path(s.vertices,
                                                  std::vector<Vec>(s.vertices.size()), 1.0);
    const FunctionalShape moved = transport_shape(s, zero);
    for (std::size_t i = 0; i < s.vertices.size(); ++i)
      CHECK(moved.vertices[i] == s.vertices[i]);
    CHECK(moved.signal == s.signal);
  }

  SUBCASE("pure translation moves vertices and keeps signals") {
    const Vec u{0.4, 0.1, 0};
    AnalyticVelocityField field;
    field.v = [u](double, const Vec&) { return u; };
    const FunctionalShape moved = transport_shape(s, field, 4, Integrator::rk4);
    for (std::size_t i = 0; i < s.vertices.size(); ++i)
      CHECK(norm(moved.vertices[i] - (s.vertices[i] + u)) < 1e-14);
    CHECK(moved.signal == s.signal);
  }
}

TEST_CASE("pushforward_atoms matches the transport formula") {
  oracle::Rng rng(67);

  SUBCASE("identity map leaves atoms unchanged") {
    const FCurrent c = discretize_curve(oracle::random_polyline(rng, 6));
    PointMap id;
    id.dim = 2;
    id.value = [](const Vec& x) { return x; };
    const FCurrent moved = pushforward_atoms(c, id);
    for (std::size_t i = 0; i < c.atoms.size(); ++i) {
      CHECK(norm(moved.atoms[i].x - c.atoms[i].x) < 1e-12);
      CHECK(norm(moved.atoms[i].xi - c.atoms[i].xi) < 1e-10);
      CHECK(moved.atoms[i].m == c.atoms[i].m);
    }
  }

  SUBCASE("uniform scaling in 2D scales tangents linearly") {
    const double s = 1.7;
    const FCurrent c = discretize_curve(oracle::random_polyline(rng, 6));
    PointMap scale;
    scale.dim = 2;
    scale.value = [s](const Vec& x) { return s * x; };
    const FCurrent moved = pushforward_atoms(c, scale);
    for (std::size_t i = 0; i < c.atoms.size(); ++i)
      CHECK(norm(moved.atoms[i].xi - s * c.atoms[i].xi) < 1e-9);
  }

  SUBCASE("uniform scaling in 3D scales normals by s^2 (cofactor rule)") {
    const double s = 1.3;
    const FCurrent c = discretize_surface(synth_sphere_caps(6, 8));
    PointMap scale;
    scale.dim = 3;
    scale.value = [s](const Vec& x) { return s * x; };
    const FCurrent moved = pushforward_atoms(c, scale);
    for (std::size_t i = 0; i < c.atoms.size(); ++i)
      CHECK(norm(moved.atoms[i].xi - (s * s) * c.atoms[i].xi) < 1e-8);
  }

  SUBCASE("contrast change applies to the signal only") {
    const FCurrent c = discretize_curve(oracle::random_polyline(rng, 4));
    PointMap id;
    id.dim = 2;
    id.value = [](const Vec& x) { return x; };
    const FCurrent moved = pushforward_atoms(c, id, [](const Signal& m) {
      Signal out = m;
      for (double& v : out) v = 2.0 * v + 1.0;
      return out;
    });
    for (std::size_t i = 0; i < c.atoms.size(); ++i)
      CHECK(moved.atoms[i].m[0] == doctest::Approx(2.0 * c.atoms[i].m[0] + 1.0));
  }

  SUBCASE("singular maps are rejected") {
    const FCurrent c = discretize_curve(oracle::random_polyline(rng, 3));
    PointMap collapse;
    collapse.dim = 2;
    collapse.value = [](const Vec& x) { return Vec{x.x, 0, 0}; };
    CHECK_THROWS_AS(pushforward_atoms(c, collapse), NumericError);
  }
}

TEST_CASE("pushforward commutes with discretization for affine maps") {
  oracle::Rng rng(71);
  const FunctionalShape s = oracle::random_polyline(rng, 9);
  // affine map A x + b
  const double a11 = 1.2, a12 = -0.3, a21 = 0.5, a22 = 0.9;
  const Vec b{0.7, -0.1, 0};
  auto affine = [&](const Vec& x) {
    return Vec{a11 * x.x + a12 * x.y + b.x, a21 * x.x + a22 * x.y + b.y, 0};
  };
  PointMap map;
  map.dim = 2;
  map.value = affine;
  map.jacobian = [&](const Vec&) {
    Mat3 j;
    j.a[0][0] = a11;
    j.a[0][1] = a12;
    j.a[1][0] = a21;
    j.a[1][1] = a22;
    return j;
  };

  FunctionalShape moved = s;
  for (auto& v : moved.vertices) v = affine(v);

  const FCurrent via_atoms = pushforward_atoms(discretize_curve(s), map);
  const FCurrent via_shape = discretize_curve(moved);
  REQUIRE(via_atoms.atoms.size() == via_shape.atoms.size());
  for (std::size_t i = 0; i < via_atoms.atoms.size(); ++i) {
    CHECK(norm(via_atoms.atoms[i].x - via_shape.atoms[i].x) < 1e-12);
    CHECK(norm(via_atoms.atoms[i].xi - via_shape.atoms[i].xi) < 1e-12);
  }
}

TEST_CASE("pushforward compatibility is second order for smooth flows") {
  // nonlinear but smooth map; the two discrete routes agree to O(h^2)
  auto warp = [](const Vec& x) {
    return Vec{x.x + 0.1 * std::sin(x.y), x.y + 0.1 * std::cos(x.x), 0};
  };
  PointMap map;
  map.dim = 2;
  map.value = warp;

  KernelConfig cfg{{RadialKind::gaussian, 0.4}, {RadialKind::constant, 1.0}};
  auto route_gap = [&](int refine) {
    FunctionalShape s = synth_circle(16);
    if (refine > 1) s = refine_curve(s, refine);
    FunctionalShape moved = s;
    for (auto& v : moved.vertices) v = warp(v);
    const FCurrent a = pushforward_atoms(discretize_curve(s), map);
    const FCurrent b = discretize_curve(moved);
    return fcurrent_distance(cfg, a, b);
  };
  const double g1 = route_gap(1);
  const double g2 = route_gap(2);
  const double g4 = route_gap(4);
  CHECK(g2 < g1);
  CHECK(g4 < g2);
  CHECK(g4 <= g1 / 8.0);  // comfortably better than first order
}

TEST_CASE("flow displacement is bounded by the integral of sup |v|") {
  // |phi(x) - x| <= integral of sup |v| + integrator tolerance
  AnalyticVelocityField field;
  field.v = [](double t, const Vec& x) {
    const double a = 0.3 * (1.0 - t);
    return Vec{a * std::sin(x.y), a * std::cos(x.x), 0};
  };
  // sup_x |v(t, .)| = 0.3 (1 - t) sqrt(2) is an upper envelope; integral over [0,1]
  const double budget = 0.3 * std::sqrt(2.0) / 2.0;

  oracle::Rng rng(73);
  std::vector<Vec> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2), 0});
  const auto traj = flow_points(field, pts, 30, Integrator::rk4);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(norm(traj.back()[i] - pts[i]) <= budget + 1e-8);
}

TEST_CASE("volume elements change by O(field amplitude) under pushforward") {
  // |pushforward xi - xi| <= beta |v|_chi1 |xi|, beta frozen from the reference run
  const double beta = 3.0;
  oracle::Rng rng(79);
  const FCurrent c = discretize_curve(oracle::random_polyline(rng, 8));
  for (double amp : {1e-1, 1e-2, 1e-3}) {
    AnalyticVelocityField field;
    field.v = [amp](double, const Vec& x) {
      return Vec{amp * std::sin(x.y), amp * std::cos(x.x), 0};
    };
    // |v|_chi1 = sup |v| + sum_i sup |dv/dx_i| <= amp (sqrt(2) + 2)
    const double chi1 = amp * (std::sqrt(2.0) + 2.0);
    PointMap map;
    map.dim = 2;
    map.value = [&](const Vec& x) {
      return flow_points(field, {x}, 10, Integrator::rk4).back().front();
    };
    const FCurrent moved = pushforward_atoms(c, map);
    for (std::size_t i = 0; i < c.atoms.size(); ++i)
      CHECK(norm(moved.atoms[i].xi - c.atoms[i].xi) <= beta * chi1 * norm(c.atoms[i].xi));
  }
}

TEST_CASE("fcurrent distance to the pushforward vanishes linearly in the field") {
  KernelConfig cfg{{RadialKind::gaussian, 0.5}, {RadialKind::gaussian, 0.5}};
  const FCurrent c = discretize_curve(synth_circle(48, 4, 1.0));
  const double mass = discrete_mass(c);

  double prev_ratio = -1.0;
  std::vector<double> ratios;
  for (double amp : {1e-1, 1e-2, 1e-3}) {
    AnalyticVelocityField field;
    field.v = [amp](double, const Vec& x) {
      return Vec{amp * std::sin(2 * x.y), -amp * std::cos(2 * x.x), 0};
    };
    PointMap map;
    map.dim = 2;
    map.value = [&](const Vec& x) {
      return flow_points(field, {x}, 10, Integrator::rk4).back().front();
    };
    const FCurrent moved = pushforward_atoms(c, map);
    ratios.push_back(fcurrent_distance(cfg, c, moved) / (mass * amp));
  }
  // slope finiteness: d / amplitude stays bounded and stabilizes
  for (double r : ratios) CHECK(r < 10.0);
  CHECK(std::abs(ratios[1] - ratios[2]) <= 0.2 * ratios[1]);
  (void)prev_ratio;
}

TEST_CASE("diverging fields abort with diagnostics") {
  AnalyticVelocityField field;
  field.v = [](double, const Vec& x) { return 1e30 * x + Vec{1e30, 0, 0}; };
  CHECK_THROWS_AS(flow_points(field, {{1, 1, 0}}, 10, Integrator::rk4), NumericError);
}
