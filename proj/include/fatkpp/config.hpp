#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fatkpp/cauchy_solver.hpp"
#include "fatkpp/kernel.hpp"

namespace fatkpp {

enum class Experiment {
  KernelValidate,
  Simulate,
  Front,
  HopfCole,
  Mutation,
  HJ,
  Hamiltonian,
  CrossValidate,
};

std::string_view to_string(Experiment experiment);
std::optional<Experiment> experiment_from_string(std::string_view name);

struct GridBlock {
  double L = 0.0;
  std::size_t N = 0;
};

struct SolverBlock {
  double dt = 0.05;
  double t_end = 0.0;
  std::size_t snapshot_count = 0;     // evenly spaced, used when no explicit times
  std::vector<double> snapshot_times;  // explicit times win over the count
  Method method = Method::RK4;
  double boundary_guard = 1e-4;
  double C = 1.0;  // initial amplitude, n0 = min(C J, 1)

  /// Resolved snapshot times in (0, t_end], sorted, t_end included.
  std::vector<double> times() const;
};

/// Rectangle [x_min, x_max] x [t_min, t_max] sampled on nx x nt points.
struct CompactBlock {
  double x_min = 0.5;
  double x_max = 3.0;
  double t_min = 0.5;
  double t_max = 2.0;
  std::size_t nx = 101;
  std::size_t nt = 7;

  std::vector<double> xs() const;
  std::vector<double> ts() const;
};

struct AnalysisBlock {
  std::vector<double> levels{0.5};
  std::vector<double> eps;
  std::optional<double> A;  // filled with 0.5 (1 - 1/mu) when the kernel allows it
  double theta1_alpha = 0.5;
  double delta = 0.2;  // front lower bound inv_J(e^{-(1-delta)t})
  double rho = 2.0;    // front upper bound inv_J(e^{-rho t})
  bool envelope = true;
  double limit_tol = 1e-3;
  double front_band = 0.5;  // CrossValidate: band around the zero-set boundary left out of the inner error
  std::size_t p_samples = 201;
  CompactBlock compact;
  std::optional<GridBlock> hj_grid;  // CrossValidate: grid of the HJ solve
};

struct OutputBlock {
  std::string directory = "out";
  bool plot = true;
  double window = 0.0;     // rows with |x| > window are not written; 0 means all
  std::size_t stride = 1;  // write every stride-th node
};

struct RunConfig {
  Experiment experiment = Experiment::Simulate;
  std::optional<KernelSpec> kernel;
  std::optional<GridBlock> grid;
  std::optional<SolverBlock> solver;
  AnalysisBlock analysis;
  OutputBlock output;
};

/// Parses and validates a JSON config. Error(ParseError) carries the line of
/// a syntax error or the key of a mistyped value; Error(ValidationError)
/// lists every violated constraint, one per line. A kernel that the chosen
/// experiment cannot use for the small-mutation problem adds a line starting
/// with "NotMutationEligible".
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Every violated constraint; empty when the config is runnable.
std::vector<std::string> validate(const RunConfig& config);

/// JSON text of the resolved config, defaults included.
std::string config_to_json(const RunConfig& config);

}  // namespace fatkpp
