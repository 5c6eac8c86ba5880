#include <algorithm>

#include "doctest.h"
#include "fcur/discretize.hpp"
#include "fcur/fcurrent.hpp"
#include "fcur/shape.hpp"
#include "oracles.hpp"

using namespace fcur;

namespace {

FunctionalShape single_triangle() {
  FunctionalShape s;
  s.ambient_dim = 3;
  s.manifold_dim = 2;
  s.signal_dim = 1;
  s.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  s.signal = {{0.0}, {0.0}, {3.0}};
  s.cells = {{0, 1, 2}};
  return s;
}

bool mentions(const std::vector<std::string>& violations, const std::string& needle) {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("validate_shape accepts a well-formed triangle") {
  CHECK(validate_shape(single_triangle()).empty());
}

TEST_CASE("validate_shape flags degenerate cells") {
  FunctionalShape s = single_triangle();
  s.cells = {{0, 0, 1}};
  const auto v = validate_shape(s);
  REQUIRE(v.size() == 1);
  CHECK(mentions(v, "degenerate cell 0"));
}

TEST_CASE("validate_shape flags signal length mismatch") {
  FunctionalShape s = single_triangle();
  s.signal.pop_back();
  CHECK(mentions(validate_shape(s), "signal length mismatch"));
}

TEST_CASE("validate_shape flags out-of-range indices and bad dims") {
  FunctionalShape s = single_triangle();
  s.cells.push_back({0, 1, 7});
  CHECK(mentions(validate_shape(s), "cell 1 index out of range"));

  FunctionalShape bad;
  bad.ambient_dim = 2;
  bad.manifold_dim = 2;
  CHECK(mentions(validate_shape(bad), "unsupported dimensions"));
}

TEST_CASE("discrete_mass basics") {
  FCurrent c;
  CHECK(discrete_mass(c) == 0.0);

  c.atoms.push_back({{0, 0, 0}, {0.0}, {3, 4, 0}});
  CHECK(discrete_mass(c) == doctest::Approx(5.0).epsilon(1e-15));

  FCurrent two;
  two.atoms.push_back({{0, 0, 0}, {0.0}, {1, 0, 0}});
  two.atoms.push_back({{1, 0, 0}, {0.0}, {0, 1, 0}});
  CHECK(discrete_mass(two) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("scale_atoms rescales volume elements only") {
  FCurrent c;
  c.atoms.push_back({{0.5, -0.25, 0}, {1.5}, {1, 0, 0}});

  const FCurrent id = scale_atoms(c, 1.0);
  CHECK(id.atoms[0].xi == c.atoms[0].xi);
  CHECK(id.atoms[0].x == c.atoms[0].x);

  const FCurrent doubled = scale_atoms(c, 2.0);
  CHECK(doubled.atoms[0].xi == Vec{2, 0, 0});
  CHECK(doubled.atoms[0].x == c.atoms[0].x);
  CHECK(doubled.atoms[0].m == c.atoms[0].m);

  CHECK_THROWS_AS(scale_atoms(c, 0.0), Error);
}

TEST_CASE("discrete_mass is absolutely homogeneous under scale_atoms") {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    FCurrent c;
    c.ambient_dim = 3;
    const int n = rng.uniform_int(1, 8);
    for (int i = 0; i < n; ++i) c.atoms.push_back(oracle::random_atom(rng, 3, 2));
    const double r = rng.uniform(-3.0, 3.0);
    if (r == 0.0) continue;
    // direct recomputation oracle
    double expected = 0.0;
    for (const auto& a : c.atoms)
      expected += std::abs(r) * std::sqrt(a.xi.x * a.xi.x + a.xi.y * a.xi.y + a.xi.z * a.xi.z);
    CHECK(discrete_mass(scale_atoms(c, r)) == doctest::Approx(expected).epsilon(1e-12));
  }
}
