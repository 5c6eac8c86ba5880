#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fcur {

// Library error taxonomy. The CLI maps each category to a distinct exit code.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual const char* category() const { return "error"; }
};

struct IoError : Error {
  using Error::Error;
  const char* category() const override { return "io"; }
};

struct KernelSpecError : Error {
  using Error::Error;
  const char* category() const override { return "kernel-spec"; }
};

struct DimensionError : Error {
  using Error::Error;
  const char* category() const override { return "dimension"; }
};

struct ShapeError : Error {
  std::vector<std::string> violations;
  explicit ShapeError(std::vector<std::string> v)
      : Error(join(v)), violations(std::move(v)) {}
  const char* category() const override { return "shape"; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string msg = "invalid shape";
    for (const auto& s : v) msg += "; " + s;
    return msg;
  }
};

struct NumericError : Error {
  using Error::Error;
  const char* category() const override { return "numeric"; }
};

}  // namespace fcur
