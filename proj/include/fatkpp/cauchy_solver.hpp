#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fatkpp/grid.hpp"
#include "fatkpp/kernel.hpp"

namespace fatkpp {

enum class Method { Euler, RK4 };

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);

/// Time integration of n_t = rate * (J*n - n + n(1-n)).
struct SolverConfig {
  double dt = 0.05;
  double t_end = 0.0;
  /// Times at which the state is stored; steps are shortened to land on them
  /// exactly. Empty means {t_end}.
  std::vector<double> snapshot_times;
  /// Abort once the boundary density exceeds its initial value by this much.
  double boundary_guard = 1e-4;
  Method method = Method::RK4;
  /// Time-scale factor; 1/eps for the small-mutation problem.
  double rate = 1.0;
};

/// 0.9 / (2 + max|1 - 2n|): explicit stability bound of the linearization.
double max_stable_dt(const Field& n);

/// n0 = min(C J, 1) with the unnormalized shape J (J(0) = 1).
Field initial_condition(const Kernel& kernel, const Grid1D& grid, double C);

struct StepStats {
  double overshoot = 0.0;  // largest excursion outside [0,1] before clamping
  double clamp = 0.0;      // largest correction applied by the clamp
};

class CauchySolver {
 public:
  CauchySolver(DiscreteKernel kernel, Method method, double rate = 1.0);

  /// rate * (J*n - n + n(1-n)).
  Field rhs(const Field& n) const;

  /// One explicit step, clamped to [0,1]. Throws Error(StabilityViolation)
  /// when the overshoot exceeds 1e-6.
  Field step(const Field& n, double dt, StepStats* stats = nullptr) const;

  const DiscreteKernel& kernel() const { return kernel_; }

 private:
  DiscreteKernel kernel_;
  Method method_;
  double rate_;
};

struct MonitorSample {
  double t = 0.0;
  double n_min = 0.0;
  double n_max = 0.0;
  double boundary_density = 0.0;
  double clamp_total = 0.0;
};

struct Snapshot {
  double t = 0.0;
  Field field;
};

struct RunManifest {
  std::optional<KernelSpec> kernel;
  double kernel_mass = 1.0;
  double kernel_mu = 0.0;
  double truncation_tail_mass = 0.0;
  double kernel_radius = 0.0;
  std::size_t steps = 0;
  double clamp_total = 0.0;
  double max_step_clamp = 0.0;
  std::size_t clamp_flagged_steps = 0;  // steps whose clamp exceeded 1e-9
  bool contaminated = false;
  double aborted_at = -1.0;  // time of the boundary abort, -1 if none
  double wall_seconds = 0.0;
};

struct SimulationRun {
  Grid1D grid;
  SolverConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<MonitorSample> monitors;
  RunManifest manifest;

  /// Snapshot whose time is closest to t; Error(DomainError) if there is none.
  const Snapshot& nearest_snapshot(double t) const;
  /// Throws Error(BoundaryContamination) for a contaminated run.
  void require_clean() const;
};

struct RunOptions {
  /// Called at every snapshot time, also when snapshots are not retained.
  std::function<void(double t, const Field& n)> on_snapshot;
  bool keep_snapshots = true;
};

SimulationRun run(const Kernel& kernel, const Grid1D& grid, const SolverConfig& config,
                  const Field& n0, const RunOptions& options = {});

/// Same as run() with a prebuilt discrete kernel.
SimulationRun run_with_kernel(const DiscreteKernel& kernel, const SolverConfig& config,
                              const Field& n0, const RunOptions& options = {});

}  // namespace fatkpp
