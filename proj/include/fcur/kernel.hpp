#pragma once

#include <cmath>
#include <string>

#include "fcur/errors.hpp"

namespace fcur {

enum class RadialKind { gaussian, cauchy, constant };

// Radial scalar kernel k(r) with k(0) = 1. Conventions:
//   gaussian  k(r) = exp(-r^2 / w^2)
//   cauchy    k(r) = 1 / (1 + r^2 / w^2)
//   constant  k(r) = 1   (the w -> infinity limit; signal side only)
struct RadialKernel {
  RadialKind kind = RadialKind::gaussian;
  double width = 1.0;

  double eval_sq(double r2) const {
    switch (kind) {
      case RadialKind::gaussian:
        return std::exp(-r2 / (width * width));
      case RadialKind::cauchy:
        return 1.0 / (1.0 + r2 / (width * width));
      case RadialKind::constant:
        return 1.0;
    }
    return 1.0;
  }

  double operator()(double r) const { return eval_sq(r * r); }

  // d/d(r^2) of eval_sq, for gradients of kernel sums.
  double d_eval_sq(double r2) const {
    const double w2 = width * width;
    switch (kind) {
      case RadialKind::gaussian:
        return -std::exp(-r2 / w2) / w2;
      case RadialKind::cauchy: {
        const double k = 1.0 / (1.0 + r2 / w2);
        return -k * k / w2;
      }
      case RadialKind::constant:
        return 0.0;
    }
    return 0.0;
  }
};

// Tensor-product kernel configuration: geometric kernel on positions times a
// scalar kernel on signal values.
struct KernelConfig {
  RadialKernel geom;
  RadialKernel sig;

  void validate() const {
    if (geom.kind == RadialKind::constant)
      throw KernelSpecError("geometric kernel cannot be constant");
    if (geom.width <= 0.0) throw KernelSpecError("geometric kernel width must be positive");
    if (sig.kind != RadialKind::constant && sig.width <= 0.0)
      throw KernelSpecError("signal kernel width must be positive");
  }
};

// Parses the CLI grammar `<kind>:<width>` (e.g. "gaussian:0.04", "cauchy:2");
// "constant" takes no width.
inline RadialKernel parse_kernel_spec(const std::string& spec, bool allow_constant = true) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  RadialKernel k;
  if (kind == "gaussian") {
    k.kind = RadialKind::gaussian;
  } else if (kind == "cauchy") {
    k.kind = RadialKind::cauchy;
  } else if (kind == "constant") {
    if (!allow_constant) throw KernelSpecError("constant kernel not allowed here: " + spec);
    if (colon != std::string::npos)
      throw KernelSpecError("constant kernel takes no width: " + spec);
    k.kind = RadialKind::constant;
    k.width = 1.0;
    return k;
  } else {
    throw KernelSpecError("unknown kernel kind: " + spec);
  }
  if (colon == std::string::npos)
    throw KernelSpecError("missing kernel width: " + spec);
  try {
    std::size_t used = 0;
    const std::string w = spec.substr(colon + 1);
    k.width = std::stod(w, &used);
    if (used != w.size()) throw KernelSpecError("bad kernel width: " + spec);
  } catch (const std::exception&) {
    throw KernelSpecError("bad kernel width: " + spec);
  }
  if (!(k.width > 0.0)) throw KernelSpecError("kernel width must be positive: " + spec);
  return k;
}

inline std::string to_string(const RadialKernel& k) {
  switch (k.kind) {
    case RadialKind::gaussian:
      return "gaussian:" + std::to_string(k.width);
    case RadialKind::cauchy:
      return "cauchy:" + std::to_string(k.width);
    case RadialKind::constant:
      return "constant";
  }
  return "";
}

}  // namespace fcur
