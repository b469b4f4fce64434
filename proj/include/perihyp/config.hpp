#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "perihyp/certify.hpp"
#include "perihyp/model.hpp"
#include "perihyp/periodic.hpp"

namespace perihyp {

/// Schema, parse or validation error with the offending position (1-based, 0 if unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct SolverSettings {
  double tol = 1e-8;
  int maxit = 200;
  bool anderson = false;
  double tol_inner = 1e-10;
  double tol_outer = 1e-8;
  int maxit_outer = 50;
};

struct MmsSettings {
  std::vector<Expression> solution;
  std::vector<std::pair<int, int>> levels;  // (nx, nt)
};

struct PerturbSettings {
  double gamma = 1e-2;
  int samples = 8;
};

struct SimulateSettings {
  std::optional<double> t_end;  // default: 8 periods
  std::string initial = "random";  // "zero" or "random"
  int skip = 2;
};

struct Config {
  std::string origin;
  bool quasilinear = false;
  LinearProblem linear;          // system + boundary when !quasilinear
  QuasilinearSystemSpec qspec;   // when quasilinear
  LinearSystemSpec system;       // built from `linear`
  BoundarySpec boundary;
  LyapunovSpec lyapunov;
  Discretization disc;
  SolverSettings solver;
  std::optional<MmsSettings> mms;
  PerturbSettings perturb;
  SimulateSettings simulate;

  double period() const { return quasilinear ? qspec.period : linear.period; }
  int n() const { return quasilinear ? qspec.n : linear.n; }
};

/// Loads and validates a YAML configuration file.
Config load_config(const std::string& path);
/// Same from text; `origin` prefixes error messages.
Config parse_config(const std::string& text, const std::string& origin = "<config>");

/// Runs the model validation of a loaded configuration and throws ConfigError on failure.
void validate_config(const Config& cfg);

}  // namespace perihyp
