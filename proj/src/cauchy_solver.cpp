#include "fatkpp/cauchy_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fatkpp/errors.hpp"

namespace fatkpp {
namespace {

constexpr double kOvershootLimit = 1e-6;
constexpr double kClampFlag = 1e-9;

void axpy(Field& out, const Field& base, double a, const Field& k) {
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = base.values[i] + a * k.values[i];
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::Euler ? "Euler" : "RK4";
}

std::optional<Method> method_from_string(std::string_view name) {
  if (name == "Euler") return Method::Euler;
  if (name == "RK4") return Method::RK4;
  return std::nullopt;
}

double max_stable_dt(const Field& n) {
  double worst = 0.0;
  for (double v : n.values) worst = std::max(worst, std::abs(1.0 - 2.0 * v));
  return 0.9 / (2.0 + worst);
}

Field initial_condition(const Kernel& kernel, const Grid1D& grid, double C) {
  if (!(C > 0.0)) raise(ErrorKind::InvalidParams, "initial amplitude C must be positive");
  Field n0 = Field::zeros(grid);
  const std::size_t c = grid.center();
  // Fill from the distances |i - c| so that mirrored nodes get identical values.
  for (std::size_t i = 0; i < grid.N; ++i) {
    const std::size_t d = i >= c ? i - c : c - i;
    n0.values[i] = std::min(C * kernel.J(static_cast<double>(d) * grid.dx()), 1.0);
  }
  return n0;
}

CauchySolver::CauchySolver(DiscreteKernel kernel, Method method, double rate)
    : kernel_(std::move(kernel)), method_(method), rate_(rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    raise(ErrorKind::InvalidParams, "solver rate must be positive");
  }
}

Field CauchySolver::rhs(const Field& n) const {
  Field out = convolve(kernel_, n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = n.values[i];
    out.values[i] = rate_ * (out.values[i] - v * v);  // J*n - n + n(1-n)
  }
  return out;
}

Field CauchySolver::step(const Field& n, double dt, StepStats* stats) const {
  Field next = Field::zeros(n.grid);
  if (method_ == Method::Euler) {
    const Field k1 = rhs(n);
    axpy(next, n, dt, k1);
  } else {
    Field stage = Field::zeros(n.grid);
    const Field k1 = rhs(n);
    axpy(stage, n, 0.5 * dt, k1);
    const Field k2 = rhs(stage);
    axpy(stage, n, 0.5 * dt, k2);
    const Field k3 = rhs(stage);
    axpy(stage, n, dt, k3);
    const Field k4 = rhs(stage);
    for (std::size_t i = 0; i < n.size(); ++i) {
      next.values[i] = n.values[i] + dt / 6.0 *
                                         (k1.values[i] + 2.0 * k2.values[i] +
                                          2.0 * k3.values[i] + k4.values[i]);
    }
  }
  StepStats local;
  for (double& v : next.values) {
    if (!std::isfinite(v)) raise(ErrorKind::StabilityViolation, "non-finite value after a step");
    const double clamped = std::clamp(v, 0.0, 1.0);
    local.clamp = std::max(local.clamp, std::abs(clamped - v));
    v = clamped;
  }
  local.overshoot = local.clamp;
  if (local.overshoot > kOvershootLimit) {
    std::ostringstream msg;
    msg << "pre-clamp overshoot " << local.overshoot << " exceeds " << kOvershootLimit;
    raise(ErrorKind::StabilityViolation, msg.str());
  }
  if (stats) *stats = local;
  return next;
}

const Snapshot& SimulationRun::nearest_snapshot(double t) const {
  if (snapshots.empty()) raise(ErrorKind::DomainError, "run has no snapshots");
  const Snapshot* best = &snapshots.front();
  for (const auto& s : snapshots) {
    if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
  }
  return *best;
}

void SimulationRun::require_clean() const {
  if (manifest.contaminated) {
    std::ostringstream msg;
    msg << "boundary density exceeded the guard at t = " << manifest.aborted_at;
    raise(ErrorKind::BoundaryContamination, msg.str());
  }
}

SimulationRun run(const Kernel& kernel, const Grid1D& grid, const SolverConfig& config,
                  const Field& n0, const RunOptions& options) {
  SimulationRun result = run_with_kernel(DiscreteKernel::from_kernel(kernel, grid), config, n0, options);
  result.manifest.kernel = kernel.spec();
  result.manifest.kernel_mass = kernel.mass();
  result.manifest.kernel_mu = kernel.mu();
  return result;
}

SimulationRun run_with_kernel(const DiscreteKernel& kernel, const SolverConfig& config,
                              const Field& n0, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  if (!(kernel.grid() == n0.grid) || n0.size() != n0.grid.N) {
    raise(ErrorKind::GridMismatch, "initial data and kernel live on different grids");
  }
  if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end)) {
    raise(ErrorKind::InvalidParams, "t_end must be finite and >= 0");
  }
  for (double v : n0.values) {
    if (!(v >= 0.0 && v <= 1.0)) raise(ErrorKind::InvalidParams, "initial data must lie in [0,1]");
  }
  const double dt_max = max_stable_dt(n0);
  if (!(config.dt > 0.0) || config.dt * config.rate > dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << config.dt << " violates the stability bound " << dt_max / config.rate;
    raise(ErrorKind::InvalidParams, msg.str());
  }

  std::vector<double> times = config.snapshot_times;
  if (times.empty()) times.push_back(config.t_end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times) {
    if (!(t >= 0.0 && t <= config.t_end * (1.0 + 1e-12) + 1e-12)) {
      raise(ErrorKind::InvalidParams, "snapshot times must lie in [0, t_end]");
    }
  }

  SimulationRun result;
  result.grid = n0.grid;
  result.config = config;
  result.config.snapshot_times = times;
  result.manifest.truncation_tail_mass = kernel.tail_mass();
  result.manifest.kernel_radius = kernel.radius();

  const CauchySolver solver(kernel, config.method, config.rate);
  const std::size_t last = n0.grid.N - 1;
  auto boundary = [&](const Field& n) { return std::max(n.values[0], n.values[last]); };
  const double threshold = boundary(n0) + config.boundary_guard;

  auto record = [&](double t, const Field& n) {
    const auto [lo, hi] = std::minmax_element(n.values.begin(), n.values.end());
    result.monitors.push_back({t, *lo, *hi, boundary(n), result.manifest.clamp_total});
  };
  auto snapshot = [&](double t, const Field& n) {
    if (options.on_snapshot) options.on_snapshot(t, n);
    if (options.keep_snapshots) result.snapshots.push_back({t, n});
  };

  Field n = n0;
  double t = 0.0;
  record(t, n);
  std::size_t next = 0;
  while (next < times.size() && times[next] <= 0.0) snapshot(times[next++], n);

  bool aborted = false;
  while (next < times.size() && !aborted) {
    const double target = times[next];
    const double span = target - t;
    const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / config.dt - 1e-9)));
    const double h = span / static_cast<double>(substeps);
    const double segment_start = t;
    for (std::size_t s = 0; s < substeps; ++s) {
      StepStats stats;
      n = solver.step(n, h, &stats);
      t = s + 1 == substeps ? target : segment_start + static_cast<double>(s + 1) * h;
      auto& m = result.manifest;
      ++m.steps;
      m.clamp_total += stats.clamp;
      m.max_step_clamp = std::max(m.max_step_clamp, stats.clamp);
      if (stats.clamp > kClampFlag) ++m.clamp_flagged_steps;
      record(t, n);
      if (boundary(n) >= threshold) {
        m.contaminated = true;
        m.aborted_at = t;
        aborted = true;
        break;
      }
    }
    if (!aborted) snapshot(times[next++], n);
  }

  result.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace fatkpp
