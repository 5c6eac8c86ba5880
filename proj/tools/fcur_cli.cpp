// Command-line surface for the functional-currents toolkit: synthetic shape
// generators, discretization, distances, matching-pursuit compression,
// LDDMM registration and the crenellation experiment.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fcur/fcur.hpp"

namespace {

int exit_code_for(const fcur::Error& e) {
  const std::string cat = e.category();
  if (cat == "io") return 2;
  if (cat == "kernel-spec") return 3;
  if (cat == "dimension") return 4;
  if (cat == "shape") return 5;
  if (cat == "numeric") return 6;
  return 1;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw fcur::Error("bad number in list: " + item);
    }
  }
  if (out.empty()) throw fcur::Error("empty number list: " + csv);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw fcur::IoError("cannot write file: " + path);
  out << std::setprecision(17);
  return out;
}

struct KernelFlags {
  std::string kg, kf;

  void add_to(CLI::App* cmd, bool required = true) {
    auto* g = cmd->add_option("--kg", kg, "geometric kernel, <kind>:<width> (gaussian, cauchy)");
    auto* f = cmd->add_option("--kf", kf,
                              "signal kernel, <kind>:<width> or 'constant' (gaussian, cauchy, constant)");
    if (required) {
      g->required();
      f->required();
    }
  }

  fcur::KernelConfig config() const {
    fcur::KernelConfig cfg;
    cfg.geom = fcur::parse_kernel_spec(kg, /*allow_constant=*/false);
    cfg.sig = fcur::parse_kernel_spec(kf, /*allow_constant=*/true);
    cfg.validate();
    return cfg;
  }
};

void run_distance(const std::string& file_a, const std::string& file_b, const KernelFlags& kf,
                  const std::string& representation) {
  const fcur::KernelConfig cfg = kf.config();
  std::cout << std::setprecision(17);
  if (representation == "fcurrent") {
    const fcur::FCurrent a = fcur::discretize(fcur::load_shape(file_a));
    const fcur::FCurrent b = fcur::discretize(fcur::load_shape(file_b));
    std::cout << "distance,norm_a,norm_b\n"
              << fcur::fcurrent_distance(cfg, a, b) << "," << fcur::fcurrent_norm(cfg, a) << ","
              << fcur::fcurrent_norm(cfg, b) << "\n";
  } else if (representation == "colored") {
    const fcur::ColoredCurrent a = fcur::colored_current(fcur::load_shape(file_a));
    const fcur::ColoredCurrent b = fcur::colored_current(fcur::load_shape(file_b));
    auto cnorm = [&](const fcur::ColoredCurrent& c) {
      const double n2 = fcur::colored_inner_product(cfg.geom, c, c);
      return n2 > 0 ? std::sqrt(n2) : 0.0;
    };
    std::cout << "distance,norm_a,norm_b\n"
              << fcur::colored_distance(cfg.geom, a, b) << "," << cnorm(a) << "," << cnorm(b)
              << "\n";
  } else if (representation == "product") {
    const fcur::FunctionalShape a = fcur::load_shape(file_a);
    const fcur::FunctionalShape b = fcur::load_shape(file_b);
    fcur::KernelConfig pc;
    pc.geom = cfg.geom;
    pc.sig = fcur::RadialKernel{fcur::RadialKind::constant, 1.0};
    const fcur::FCurrent la = fcur::product_space_current(a);
    const fcur::FCurrent lb = fcur::product_space_current(b);
    std::cout << "distance,norm_a,norm_b\n"
              << fcur::fcurrent_distance(pc, la, lb) << "," << fcur::fcurrent_norm(pc, la) << ","
              << fcur::fcurrent_norm(pc, lb) << "\n";
  } else {
    throw fcur::Error("unknown representation: " + representation);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fcur — functional shapes as functional currents"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = hardware)");

  // ---- synth ---------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate synthetic functional shapes");
  synth->require_subcommand(1);

  struct {
    int segments = 512;
    int crenels = 0;
    double amplitude = 1.0;
    std::string out;
  } circle;
  auto* synth_circle_cmd = synth->add_subcommand("circle", "unit circle with a crenellated signal");
  synth_circle_cmd->add_option("--segments", circle.segments, "number of edges");
  synth_circle_cmd->add_option("--crenels", circle.crenels, "number of crenels (0 = flat signal)");
  synth_circle_cmd->add_option("--amplitude", circle.amplitude, "crenel height");
  synth_circle_cmd->add_option("-o,--output", circle.out, "output .fshape path")->required();

  struct {
    int segments = 96;
    double rx = 1.0, ry = 0.6;
    double stain_angle = 0.0, stain_width = 0.5, amplitude = 1.0;
    std::string out;
  } ellipse;
  auto* synth_ellipse_cmd =
      synth->add_subcommand("ellipse-stain", "ellipse contour with a smooth stain signal");
  synth_ellipse_cmd->add_option("--segments", ellipse.segments, "number of edges");
  synth_ellipse_cmd->add_option("--rx", ellipse.rx, "semi-axis along x");
  synth_ellipse_cmd->add_option("--ry", ellipse.ry, "semi-axis along y");
  synth_ellipse_cmd->add_option("--stain-angle", ellipse.stain_angle, "stain center angle (rad)");
  synth_ellipse_cmd->add_option("--stain-width", ellipse.stain_width, "stain angular width (rad)");
  synth_ellipse_cmd->add_option("--amplitude", ellipse.amplitude, "stain peak value");
  synth_ellipse_cmd->add_option("-o,--output", ellipse.out, "output .fshape path")->required();

  struct {
    int fibers = 300;
    int points = 20;
    std::string out;
  } bundle;
  auto* synth_bundle_cmd =
      synth->add_subcommand("fiber-bundle", "bundle of planar fibers with per-fiber signal");
  synth_bundle_cmd->add_option("--fibers", bundle.fibers, "number of fibers");
  synth_bundle_cmd->add_option("--points", bundle.points, "samples per fiber");
  synth_bundle_cmd->add_option("-o,--output", bundle.out, "output .fshape path")->required();

  struct {
    int rings = 16;
    int sectors = 24;
    double cap_angle = 0.6;
    double amplitude = 1.0;
    std::string out;
  } sphere;
  auto* synth_sphere_cmd =
      synth->add_subcommand("sphere-caps", "unit sphere with two signal caps at the poles");
  synth_sphere_cmd->add_option("--rings", sphere.rings, "latitude rings");
  synth_sphere_cmd->add_option("--sectors", sphere.sectors, "longitude sectors");
  synth_sphere_cmd->add_option("--cap-angle", sphere.cap_angle, "cap polar angle (rad)");
  synth_sphere_cmd->add_option("--amplitude", sphere.amplitude, "cap signal value");
  synth_sphere_cmd->add_option("-o,--output", sphere.out, "output .fshape path")->required();

  // ---- discretize ----------------------------------------------------
  struct {
    std::string in, out;
  } disc;
  auto* disc_cmd = app.add_subcommand("discretize", "convert a shape into Dirac fcurrent atoms");
  disc_cmd->add_option("input", disc.in, "input .fshape")->required();
  disc_cmd->add_option("-o,--output", disc.out, "output .fcur path")->required();

  // ---- distance ------------------------------------------------------
  struct {
    std::string a, b, representation = "fcurrent";
    KernelFlags kernels;
  } dist;
  auto* dist_cmd = app.add_subcommand(
      "distance", "kernel distance between two shapes; prints CSV distance,norm_a,norm_b");
  dist_cmd->add_option("a", dist.a, "first .fshape")->required();
  dist_cmd->add_option("b", dist.b, "second .fshape")->required();
  dist.kernels.add_to(dist_cmd);
  dist_cmd->add_option("--representation", dist.representation,
                       "fcurrent | colored | product (default fcurrent)");

  // ---- compress ------------------------------------------------------
  struct {
    std::string in, out, log;
    double eps = 0.05;
    std::string variant = "orthogonal";
    int max_atoms = 10000;
    double grid_spacing = 0.0;
    KernelFlags kernels;
  } comp;
  auto* comp_cmd = app.add_subcommand("compress", "matching-pursuit compression of an fcurrent");
  comp_cmd->add_option("input", comp.in, "input .fshape or .fcur")->required();
  comp_cmd->add_option("--eps", comp.eps, "relative residual threshold in (0,1)");
  comp_cmd->add_option("--variant", comp.variant, "greedy | orthogonal");
  comp_cmd->add_option("--max-atoms", comp.max_atoms, "atom cap");
  comp_cmd->add_option("--grid-spacing", comp.grid_spacing,
                       "use a regular grid dictionary with this spacing (default: source supports)");
  comp.kernels.add_to(comp_cmd);
  comp_cmd->add_option("-o,--output", comp.out, "output .fcur path")->required();
  comp_cmd->add_option("--log", comp.log, "per-step CSV log (step,support,gamma_norm,residual_ratio)");

  // ---- register ------------------------------------------------------
  struct {
    std::string src, tgt, out, deformed, trace, grid_csv, integrator = "euler";
    KernelFlags kernels;
    double sigma_v = 0.0, lambda = 1.0, grad_tol = 1e-6;
    int timesteps = 10, max_iters = 200;
  } reg;
  auto* reg_cmd = app.add_subcommand("register", "LDDMM registration of two functional shapes");
  reg_cmd->add_option("source", reg.src, "source .fshape")->required();
  reg_cmd->add_option("target", reg.tgt, "target .fshape")->required();
  reg.kernels.add_to(reg_cmd);
  reg_cmd->add_option("--sigma-v", reg.sigma_v, "velocity kernel width")->required();
  reg_cmd->add_option("--lambda", reg.lambda, "attachment weight");
  reg_cmd->add_option("--timesteps", reg.timesteps, "flow timesteps");
  reg_cmd->add_option("--max-iters", reg.max_iters, "gradient-descent iteration cap");
  reg_cmd->add_option("--grad-tol", reg.grad_tol, "gradient norm tolerance");
  reg_cmd->add_option("--integrator", reg.integrator, "euler | rk4");
  reg_cmd->add_option("-o,--output", reg.out, "result JSON (path + energy trace)")->required();
  reg_cmd->add_option("--deformed", reg.deformed, "deformed source .fshape");
  reg_cmd->add_option("--trace", reg.trace, "energy trace CSV (iter,kinetic,attachment,total)");
  reg_cmd->add_option("--grid-csv", reg.grid_csv,
                      "deformed grid CSV (line,idx,x0,y0,x1,y1) for plotting");

  // ---- transport -----------------------------------------------------
  struct {
    std::string shape, path, out;
  } trans;
  auto* trans_cmd =
      app.add_subcommand("transport", "flow a shape through a stored deformation path");
  trans_cmd->add_option("shape", trans.shape, "input .fshape")->required();
  trans_cmd->add_option("path", trans.path, "result JSON or bare path JSON")->required();
  trans_cmd->add_option("-o,--output", trans.out, "output .fshape path")->required();

  // ---- experiment ----------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "reference experiments");
  exp_cmd->require_subcommand(1);
  struct {
    std::string dthetas = "0.005,0.01,0.02,0.04";
    int segments = 512;
    int crenels = 16;
    double amplitude = 1.0;
    KernelFlags kernels;
    std::string out;
  } cren;
  auto* cren_cmd = exp_cmd->add_subcommand(
      "crenel", "W' vs L1 distance for a rotated crenellated signal on the circle");
  cren_cmd->add_option("--dthetas", cren.dthetas, "comma-separated rotation angles");
  cren_cmd->add_option("--segments", cren.segments, "circle edges");
  cren_cmd->add_option("--crenels", cren.crenels, "crenel count");
  cren_cmd->add_option("--amplitude", cren.amplitude, "crenel height");
  cren.kernels.kg = "gaussian:0.3";
  cren.kernels.kf = "gaussian:0.5";
  cren.kernels.add_to(cren_cmd, /*required=*/false);
  cren_cmd->add_option("-o,--output", cren.out, "output CSV (dtheta,wprime,l1)")->required();

  try {
    app.parse(argc, argv);
    fcur::set_max_threads(threads);

    if (synth_circle_cmd->parsed())
      fcur::save_shape(circle.out,
                       fcur::synth_circle(circle.segments, circle.crenels, circle.amplitude));
    if (synth_ellipse_cmd->parsed())
      fcur::save_shape(ellipse.out,
                       fcur::synth_ellipse_stain(ellipse.segments, ellipse.rx, ellipse.ry,
                                                 ellipse.stain_angle, ellipse.stain_width,
                                                 ellipse.amplitude));
    if (synth_bundle_cmd->parsed())
      fcur::save_shape(bundle.out, fcur::synth_fiber_bundle(bundle.fibers, bundle.points));
    if (synth_sphere_cmd->parsed())
      fcur::save_shape(sphere.out, fcur::synth_sphere_caps(sphere.rings, sphere.sectors,
                                                           sphere.cap_angle, sphere.amplitude));

    if (disc_cmd->parsed()) {
      std::size_t dropped = 0;
      const fcur::FCurrent c = fcur::discretize(fcur::load_shape(disc.in), &dropped);
      fcur::save_fcurrent(disc.out, c);
      if (dropped > 0)
        std::cerr << "note: dropped " << dropped << " degenerate cell(s)\n";
    }

    if (dist_cmd->parsed()) run_distance(dist.a, dist.b, dist.kernels, dist.representation);

    if (comp_cmd->parsed()) {
      fcur::MPConfig mp;
      mp.epsilon = comp.eps;
      mp.max_atoms = comp.max_atoms;
      if (comp.variant == "greedy")
        mp.variant = fcur::MPVariant::greedy;
      else if (comp.variant == "orthogonal")
        mp.variant = fcur::MPVariant::orthogonal;
      else
        throw fcur::Error("unknown matching-pursuit variant: " + comp.variant);
      if (comp.grid_spacing > 0.0) {
        mp.dictionary = fcur::MPDictionary::grid;
        mp.grid_spacing = comp.grid_spacing;
      }
      fcur::FCurrent input;
      if (comp.in.size() > 5 && comp.in.substr(comp.in.size() - 5) == ".fcur")
        input = fcur::load_fcurrent(comp.in);
      else
        input = fcur::discretize(fcur::load_shape(comp.in));
      std::vector<fcur::MPStep> log;
      const fcur::MPResult result =
          fcur::mp_compress(mp, comp.kernels.config(), input, comp.log.empty() ? nullptr : &log);
      fcur::save_fcurrent(comp.out, fcur::reconstruct(result));
      if (!comp.log.empty()) {
        auto out = open_out(comp.log);
        out << "step,support,gamma_norm,residual_ratio\n";
        for (const auto& row : log)
          out << row.step << "," << row.support << "," << row.gamma_norm << ","
              << row.residual_ratio << "\n";
      }
      std::cout << "atoms," << result.atoms.size() << "\nconverged," << (result.converged ? 1 : 0)
                << "\nresidual_ratio,"
                << (result.residual_norms.back() /
                    (result.residual_norms.front() > 0 ? result.residual_norms.front() : 1.0))
                << "\n";
    }

    if (reg_cmd->parsed()) {
      fcur::RegistrationConfig cfg;
      cfg.kernels = reg.kernels.config();
      cfg.sigma_v = reg.sigma_v;
      cfg.lambda = reg.lambda;
      cfg.timesteps = reg.timesteps;
      cfg.max_iters = reg.max_iters;
      cfg.grad_tol = reg.grad_tol;
      cfg.integrator = fcur::integrator_from_string(reg.integrator);
      const fcur::FunctionalShape src = fcur::load_shape(reg.src);
      const fcur::FunctionalShape tgt = fcur::load_shape(reg.tgt);
      const fcur::RegistrationResult result = fcur::register_shapes(cfg, src, tgt);
      fcur::write_json_file(reg.out, fcur::registration_result_to_json(result));
      if (!reg.deformed.empty()) fcur::save_shape(reg.deformed, result.deformed_source);
      if (!reg.trace.empty()) {
        auto out = open_out(reg.trace);
        out << "iter,kinetic,attachment,total\n";
        for (std::size_t i = 0; i < result.energy_trace.size(); ++i)
          out << i << "," << result.energy_trace[i].kinetic << ","
              << result.energy_trace[i].attachment << "," << result.energy_trace[i].total << "\n";
      }
      if (!reg.grid_csv.empty()) {
        fcur::Vec lo = src.vertices.front(), hi = lo;
        for (const fcur::Vec& v : src.vertices)
          for (int i = 0; i < 2; ++i) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
          }
        const double margin = 0.2 * std::max(hi.x - lo.x, hi.y - lo.y);
        const double glo = std::min(lo.x, lo.y) - margin, ghi = std::max(hi.x, hi.y) + margin;
        const fcur::FunctionalShape grid = fcur::synth_grid(glo, ghi, 15, 40);
        const fcur::FunctionalShape moved = fcur::apply_result(result, grid);
        auto out = open_out(reg.grid_csv);
        out << "line,idx,x0,y0,x1,y1\n";
        for (std::size_t i = 0; i < grid.vertices.size(); ++i)
          out << i / 40 << "," << i % 40 << "," << grid.vertices[i].x << "," << grid.vertices[i].y
              << "," << moved.vertices[i].x << "," << moved.vertices[i].y << "\n";
      }
      const auto& last = result.energy_trace.back();
      std::cout << "iterations," << result.iterations << "\nkinetic," << last.kinetic
                << "\nattachment," << last.attachment << "\ntotal," << last.total
                << "\ngradient_norm," << result.final_gradient_norm << "\n";
    }

    if (trans_cmd->parsed()) {
      const fcur::FunctionalShape s = fcur::load_shape(trans.shape);
      const fcur::DeformationPath p = fcur::load_path(trans.path);
      fcur::save_shape(trans.out, fcur::transport_shape(s, p));
    }

    if (cren_cmd->parsed()) {
      const auto rows = fcur::crenel_experiment(cren.segments, cren.crenels, cren.amplitude,
                                                cren.kernels.config(),
                                                parse_double_list(cren.dthetas));
      auto out = open_out(cren.out);
      out << "dtheta,wprime,l1\n";
      for (const auto& r : rows) out << r.dtheta << "," << r.wprime << "," << r.l1 << "\n";
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const fcur::Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
