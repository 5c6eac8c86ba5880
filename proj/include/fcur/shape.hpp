#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "fcur/errors.hpp"
#include "fcur/vec.hpp"

namespace fcur {

// A signal-carrying polyline (manifold_dim 1) or triangle mesh (manifold_dim 2)
// with one signal vector per vertex. Supported (ambient, manifold) dimension
// pairs: (2,1), (3,1), (3,2).
struct FunctionalShape {
  int ambient_dim = 2;
  int manifold_dim = 1;
  int signal_dim = 1;
  std::vector<Vec> vertices;
  std::vector<std::vector<int>> cells;  // index pairs (d=1) or triples (d=2), oriented
  std::vector<Signal> signal;           // one entry of length signal_dim per vertex
};

inline bool dims_supported(int n, int d) {
  return (n == 2 && d == 1) || (n == 3 && d == 1) || (n == 3 && d == 2);
}

// Total function: returns one message per violated invariant, empty if valid.
inline std::vector<std::string> validate_shape(const FunctionalShape& s) {
  std::vector<std::string> out;
  if (!dims_supported(s.ambient_dim, s.manifold_dim))
    out.push_back("unsupported dimensions (n=" + std::to_string(s.ambient_dim) +
                  ", d=" + std::to_string(s.manifold_dim) + ")");
  if (s.signal_dim < 1) out.push_back("signal_dim must be >= 1");
  if (s.signal.size() != s.vertices.size()) out.push_back("signal length mismatch");

  for (std::size_t i = 0; i < s.vertices.size(); ++i)
    if (!is_finite(s.vertices[i])) out.push_back("vertex " + std::to_string(i) + " not finite");
  for (std::size_t i = 0; i < s.signal.size(); ++i) {
    if (s.signal[i].size() != static_cast<std::size_t>(s.signal_dim))
      out.push_back("signal " + std::to_string(i) + " dimension mismatch");
    else if (!is_finite(s.signal[i]))
      out.push_back("signal " + std::to_string(i) + " not finite");
  }

  const std::size_t arity = static_cast<std::size_t>(s.manifold_dim) + 1;
  const int nverts = static_cast<int>(s.vertices.size());
  for (std::size_t c = 0; c < s.cells.size(); ++c) {
    const auto& cell = s.cells[c];
    if (cell.size() != arity) {
      out.push_back("cell " + std::to_string(c) + " arity mismatch");
      continue;
    }
    bool in_range = true;
    for (int v : cell)
      if (v < 0 || v >= nverts) in_range = false;
    if (!in_range) {
      out.push_back("cell " + std::to_string(c) + " index out of range");
      continue;
    }
    bool distinct = true;
    for (std::size_t i = 0; i + 1 < arity && distinct; ++i)
      for (std::size_t j = i + 1; j < arity; ++j)
        if (cell[i] == cell[j]) distinct = false;
    if (!distinct) out.push_back("degenerate cell " + std::to_string(c));
  }
  return out;
}

inline void require_valid(const FunctionalShape& s) {
  auto violations = validate_shape(s);
  if (!violations.empty()) throw ShapeError(std::move(violations));
}

inline double bounding_box_diagonal(const std::vector<Vec>& pts) {
  if (pts.empty()) return 0.0;
  Vec lo = pts.front(), hi = pts.front();
  for (const Vec& p : pts) {
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  return norm(hi - lo);
}

inline double bounding_box_diagonal(const FunctionalShape& s) {
  return bounding_box_diagonal(s.vertices);
}

}  // namespace fcur
