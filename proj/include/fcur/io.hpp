#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fcur/errors.hpp"
#include "fcur/fcurrent.hpp"
#include "fcur/flow.hpp"
#include "fcur/registration.hpp"
#include "fcur/shape.hpp"

namespace fcur {

using json = nlohmann::json;

namespace detail {

inline json vec_to_json(const Vec& v, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const json& a, int dim, const char* what) {
  if (!a.is_array() || a.size() != static_cast<std::size_t>(dim))
    throw IoError(std::string(what) + ": expected an array of length " + std::to_string(dim));
  Vec v;
  for (int i = 0; i < dim; ++i) v[i] = a[i].get<double>();
  return v;
}

inline json points_to_json(const std::vector<Vec>& pts, int dim) {
  json a = json::array();
  for (const Vec& p : pts) a.push_back(vec_to_json(p, dim));
  return a;
}

inline std::vector<Vec> points_from_json(const json& a, int dim, const char* what) {
  std::vector<Vec> out;
  out.reserve(a.size());
  for (const auto& p : a) out.push_back(vec_from_json(p, dim, what));
  return out;
}

}  // namespace detail

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

inline json shape_to_json(const FunctionalShape& s) {
  json j;
  j["version"] = 1;
  j["ambient_dim"] = s.ambient_dim;
  j["manifold_dim"] = s.manifold_dim;
  j["signal_dim"] = s.signal_dim;
  j["vertices"] = detail::points_to_json(s.vertices, s.ambient_dim);
  j["cells"] = s.cells;
  j["signal"] = s.signal;
  return j;
}

inline FunctionalShape shape_from_json(const json& j) {
  FunctionalShape s;
  try {
    if (j.at("version").get<int>() != 1) throw IoError("fshape: unsupported version");
    s.ambient_dim = j.at("ambient_dim").get<int>();
    s.manifold_dim = j.at("manifold_dim").get<int>();
    s.signal_dim = j.at("signal_dim").get<int>();
    if (!dims_supported(s.ambient_dim, s.manifold_dim))
      throw IoError("fshape: unsupported dimensions");
    s.vertices = detail::points_from_json(j.at("vertices"), s.ambient_dim, "fshape vertex");
    s.cells = j.at("cells").get<std::vector<std::vector<int>>>();
    s.signal = j.at("signal").get<std::vector<Signal>>();
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(std::string("fshape: ") + e.what());
  }
  require_valid(s);
  return s;
}

inline void save_shape(const std::string& path, const FunctionalShape& s) {
  write_json_file(path, shape_to_json(s));
}

inline FunctionalShape load_shape(const std::string& path) {
  return shape_from_json(read_json_file(path));
}

inline json fcurrent_to_json(const FCurrent& c) {
  json j;
  j["version"] = 1;
  j["ambient_dim"] = c.ambient_dim;
  j["manifold_dim"] = c.manifold_dim;
  j["signal_dim"] = c.signal_dim;
  json atoms = json::array();
  for (const Dirac& a : c.atoms) {
    json e;
    e["x"] = detail::vec_to_json(a.x, c.ambient_dim);
    e["m"] = a.m;
    e["xi"] = detail::vec_to_json(a.xi, c.ambient_dim);
    atoms.push_back(std::move(e));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

inline FCurrent fcurrent_from_json(const json& j) {
  FCurrent c;
  try {
    if (j.at("version").get<int>() != 1) throw IoError("fcurrent: unsupported version");
    c.ambient_dim = j.at("ambient_dim").get<int>();
    c.manifold_dim = j.at("manifold_dim").get<int>();
    c.signal_dim = j.at("signal_dim").get<int>();
    if (!dims_supported(c.ambient_dim, c.manifold_dim))
      throw IoError("fcurrent: unsupported dimensions");
    for (const auto& e : j.at("atoms")) {
      Dirac a;
      a.x = detail::vec_from_json(e.at("x"), c.ambient_dim, "fcurrent atom x");
      a.m = e.at("m").get<Signal>();
      if (a.m.size() != static_cast<std::size_t>(c.signal_dim))
        throw IoError("fcurrent: atom signal dimension mismatch");
      a.xi = detail::vec_from_json(e.at("xi"), c.ambient_dim, "fcurrent atom xi");
      c.atoms.push_back(std::move(a));
    }
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(std::string("fcurrent: ") + e.what());
  }
  return c;
}

inline void save_fcurrent(const std::string& path, const FCurrent& c) {
  write_json_file(path, fcurrent_to_json(c));
}

inline FCurrent load_fcurrent(const std::string& path) {
  return fcurrent_from_json(read_json_file(path));
}

// Deformation paths are stored row-major by timestep: control_points[j][p]
// and momenta[j][p].
inline json path_to_json(const DeformationPath& p) {
  json j;
  j["version"] = 1;
  j["timesteps"] = p.timesteps;
  j["sigma_v"] = p.sigma_v;
  j["integrator"] = to_string(p.integrator);
  const int dim = 3;
  json cps = json::array();
  for (const auto& row : p.control_points) cps.push_back(detail::points_to_json(row, dim));
  j["control_points"] = std::move(cps);
  json mom = json::array();
  for (const auto& row : p.momenta) mom.push_back(detail::points_to_json(row, dim));
  j["momenta"] = std::move(mom);
  return j;
}

inline DeformationPath path_from_json(const json& j) {
  DeformationPath p;
  try {
    if (j.at("version").get<int>() != 1) throw IoError("path: unsupported version");
    p.timesteps = j.at("timesteps").get<int>();
    p.sigma_v = j.at("sigma_v").get<double>();
    p.integrator = integrator_from_string(j.at("integrator").get<std::string>());
    for (const auto& row : j.at("control_points"))
      p.control_points.push_back(detail::points_from_json(row, 3, "path control point"));
    for (const auto& row : j.at("momenta"))
      p.momenta.push_back(detail::points_from_json(row, 3, "path momentum"));
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(std::string("path: ") + e.what());
  }
  p.validate();
  return p;
}

inline json registration_result_to_json(const RegistrationResult& r) {
  json j;
  j["version"] = 1;
  j["path"] = path_to_json(r.path);
  json trace = json::array();
  for (const auto& e : r.energy_trace)
    trace.push_back({{"kinetic", e.kinetic}, {"attachment", e.attachment}, {"total", e.total}});
  j["energy_trace"] = std::move(trace);
  j["final_gradient_norm"] = r.final_gradient_norm;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

// Accepts either a bare deformation-path document or a registration result
// wrapping one under "path".
inline DeformationPath load_path(const std::string& file) {
  const json j = read_json_file(file);
  if (j.contains("path")) return path_from_json(j.at("path"));
  return path_from_json(j);
}

}  // namespace fcur
