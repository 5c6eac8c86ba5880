#include <cmath>

#include "doctest.h"
#include "fcur/discretize.hpp"
#include "fcur/kernel.hpp"
#include "fcur/metric.hpp"
#include "fcur/synth.hpp"
#include "oracles.hpp"

using namespace fcur;

namespace {

FunctionalShape three_point_line() {
  FunctionalShape s;
  s.ambient_dim = 2;
  s.manifold_dim = 1;
  s.signal_dim = 1;
  s.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  s.signal = {{0.0}, {1.0}, {2.0}};
  s.cells = {{0, 1}, {1, 2}};
  return s;
}

FunctionalShape unit_square_mesh() {
  FunctionalShape s;
  s.ambient_dim = 3;
  s.manifold_dim = 2;
  s.signal_dim = 1;
  s.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  s.signal = {{0.0}, {0.0}, {0.0}, {0.0}};
  s.cells = {{0, 1, 2}, {0, 2, 3}};
  return s;
}

}  // namespace

TEST_CASE("discretize_curve follows the midpoint rule") {
  const FCurrent c = discretize_curve(three_point_line());
  REQUIRE(c.atoms.size() == 2);
  CHECK(c.atoms[0].x == Vec{0.5, 0, 0});
  CHECK(c.atoms[0].xi == Vec{1, 0, 0});
  CHECK(c.atoms[0].m[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.atoms[1].x == Vec{1.5, 0, 0});
  CHECK(c.atoms[1].xi == Vec{1, 0, 0});
  CHECK(c.atoms[1].m[0] == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("zero-length edges are dropped with a warning count") {
  FunctionalShape s;
  s.ambient_dim = 2;
  s.manifold_dim = 1;
  s.signal_dim = 1;
  s.vertices = {{0, 0, 0}, {0, 0, 0}, {1, 0, 0}};
  s.signal = {{0.0}, {0.0}, {0.0}};
  s.cells = {{0, 1}};
  std::size_t dropped = 0;
  const FCurrent c = discretize_curve(s, &dropped);
  CHECK(c.atoms.empty());
  CHECK(dropped == 1);
}

TEST_CASE("reversing cell orientation negates every xi and nothing else") {
  oracle::Rng rng(3);
  FunctionalShape s = oracle::random_polyline(rng, 12);
  FunctionalShape r = s;
  for (auto& cell : r.cells) std::swap(cell[0], cell[1]);
  const FCurrent cs = discretize_curve(s);
  const FCurrent cr = discretize_curve(r);
  REQUIRE(cs.atoms.size() == cr.atoms.size());
  for (std::size_t i = 0; i < cs.atoms.size(); ++i) {
    CHECK(cr.atoms[i].xi == -cs.atoms[i].xi);
    CHECK(cr.atoms[i].x == cs.atoms[i].x);
    CHECK(cr.atoms[i].m == cs.atoms[i].m);
  }
}

TEST_CASE("discretize_surface follows the centroid / half-cross rule") {
  FunctionalShape s;
  s.ambient_dim = 3;
  s.manifold_dim = 2;
  s.signal_dim = 1;
  s.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  s.signal = {{0.0}, {0.0}, {3.0}};
  s.cells = {{0, 1, 2}};
  const FCurrent c = discretize_surface(s);
  REQUIRE(c.atoms.size() == 1);
  CHECK(c.atoms[0].x.x == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(c.atoms[0].x.y == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(c.atoms[0].x.z == 0.0);
  CHECK(c.atoms[0].xi == Vec{0, 0, 0.5});
  CHECK(c.atoms[0].m[0] == doctest::Approx(1.0).epsilon(1e-15));

  // swapping two vertex indices flips the normal
  FunctionalShape f = s;
  std::swap(f.cells[0][1], f.cells[0][2]);
  CHECK(discretize_surface(f).atoms[0].xi == Vec{0, 0, -0.5});
}

TEST_CASE("mass equals total length / area") {
  CHECK(discrete_mass(discretize_curve(three_point_line())) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(discrete_mass(discretize_surface(unit_square_mesh())) ==
        doctest::Approx(1.0).epsilon(1e-12));

  oracle::Rng rng(11);
  const FunctionalShape poly = oracle::random_polyline(rng, 30);
  double length = 0.0;
  for (const auto& cell : poly.cells)
    length += norm(poly.vertices[cell[1]] - poly.vertices[cell[0]]);
  CHECK(discrete_mass(discretize_curve(poly)) == doctest::Approx(length).epsilon(1e-12));
}

TEST_CASE("rigid motions rotate atoms and leave signals fixed") {
  oracle::Rng rng(5);
  const double angle = 0.7;
  const Vec shift{0.3, -1.2, 0};

  SUBCASE("curves in 2D") {
    const FunctionalShape s = oracle::random_polyline(rng, 10);
    FunctionalShape moved = s;
    for (auto& v : moved.vertices) v = oracle::rotate2d(v, angle) + shift;
    const FCurrent a = discretize_curve(s);
    const FCurrent b = discretize_curve(moved);
    REQUIRE(a.atoms.size() == b.atoms.size());
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
      CHECK(norm(b.atoms[i].x - (oracle::rotate2d(a.atoms[i].x, angle) + shift)) < 1e-12);
      CHECK(norm(b.atoms[i].xi - oracle::rotate2d(a.atoms[i].xi, angle)) < 1e-12);
      CHECK(b.atoms[i].m == a.atoms[i].m);
    }
  }

  SUBCASE("surface normals rotate with the mesh") {
    FunctionalShape s = unit_square_mesh();
    const Vec axis{1, 2, 0.5};
    FunctionalShape moved = s;
    for (auto& v : moved.vertices) v = oracle::rotate_axis(v, axis, angle) + shift;
    const FCurrent a = discretize_surface(s);
    const FCurrent b = discretize_surface(moved);
    for (std::size_t i = 0; i < a.atoms.size(); ++i)
      CHECK(norm(b.atoms[i].xi - oracle::rotate_axis(a.atoms[i].xi, axis, angle)) < 1e-12);
  }
}

TEST_CASE("refine_curve splits edges and preserves mass") {
  const FunctionalShape s = three_point_line();
  const FunctionalShape r = refine_curve(s, 2);
  CHECK(r.cells.size() == 4);
  CHECK(r.vertices.size() == 5);
  // telescoping edge lengths
  CHECK(discrete_mass(discretize_curve(r)) ==
        doctest::Approx(discrete_mass(discretize_curve(s))).epsilon(1e-12));

  // interpolated signal at the inserted midpoint of the first edge
  CHECK(r.signal[3][0] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(refine_curve(s, 1), Error);
}

TEST_CASE("refinement converges in the W' metric") {
  const FunctionalShape coarse = synth_circle(32);
  KernelConfig cfg;
  cfg.geom = {RadialKind::gaussian, 0.15};
  cfg.sig = {RadialKind::constant, 1.0};

  const FCurrent reference = discretize_curve(refine_curve(coarse, 64));
  const double d2 = fcurrent_distance(cfg, discretize_curve(refine_curve(coarse, 2)), reference);
  const double d4 = fcurrent_distance(cfg, discretize_curve(refine_curve(coarse, 4)), reference);
  const double d8 = fcurrent_distance(cfg, discretize_curve(refine_curve(coarse, 8)), reference);
  CHECK(d2 > d4);
  CHECK(d4 > d8);
  CHECK(d8 <= 0.25 * d2);
}
