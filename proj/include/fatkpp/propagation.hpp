#pragma once

#include <vector>

#include "fatkpp/cauchy_solver.hpp"
#include "fatkpp/grid.hpp"
#include "fatkpp/kernel.hpp"

namespace fatkpp {

/// Rightmost x at which n drops from >= level to < level, linearly
/// interpolated between the two nodes. NaN when there is no such crossing;
/// Error(InvalidParams) unless level lies in (0,1).
double rightmost_crossing(const Field& n, double level);

struct FrontTrack {
  double level = 0.5;
  double delta = 0.2;  // lower bound inv_J(e^{-(1-delta)t})
  double rho = 2.0;    // upper bound inv_J(e^{-rho t})
  std::vector<double> times;
  std::vector<double> positions;  // NaN where the level is not crossed
  std::vector<double> predicted;  // inv_f(t)
  std::vector<double> lower;
  std::vector<double> upper;

  void append(const Kernel& kernel, double t, const Field& n);
};

/// Front positions of every snapshot of an uncontaminated run.
FrontTrack track_level(const Kernel& kernel, const SimulationRun& run, double level,
                       double delta = 0.2, double rho = 2.0);

/// phi(t,x) = 1 / (1 + e^{-t}/J(x)).
double phi_envelope(const Kernel& kernel, double t, double x);
/// d phi / dx = -phi (1 - phi) f'(|x|) sign(x).
double phi_envelope_dx(const Kernel& kernel, double t, double x);
Field phi_field(const Kernel& kernel, const Grid1D& grid, double t);

/// sup |J*phi - phi| / phi over nodes at least one kernel radius away from
/// the boundary: a numerical estimate of theta(t).
double envelope_residual(const Kernel& kernel, const DiscreteKernel& dk, double t);

/// Checks C e^{-Theta} phi <= n <= 2 C e^{Theta} phi at successive snapshots,
/// with Theta the trapezoid integral of envelope_residual over the snapshot
/// times seen so far. The first observation must be at t = 0.
class EnvelopeMonitor {
 public:
  struct Sample {
    double t = 0.0;
    double theta_hat = 0.0;
    double theta_integral = 0.0;
    double lo_violation = 0.0;  // max relative shortfall of n below the lower envelope
    double hi_violation = 0.0;  // max relative excess of n above the upper envelope
  };

  /// Nodes within `margin` of either boundary are excluded from the check.
  EnvelopeMonitor(const Kernel& kernel, const DiscreteKernel& dk, double C_lower, double C_upper,
                  double margin);

  const Sample& observe(double t, const Field& n);
  const std::vector<Sample>& samples() const { return samples_; }
  double worst_lo_violation() const;
  double worst_hi_violation() const;

 private:
  Kernel kernel_;
  DiscreteKernel dk_;
  double c_lower_;
  double c_upper_;
  double margin_;
  std::vector<Sample> samples_;
};

/// max{ sup|f'| e^{-(1-a)t}, sup_{|z| >= inv_f(a t)} |f'(z)| }.
/// Refuses the thin-tailed control kernel.
double theta1(const Kernel& kernel, double t, double theta1_alpha = 0.5);
/// min{ 1 / f'(inv_f(t)/2), 1 / theta1(t) }.
double gamma_loc(const Kernel& kernel, double t, double theta1_alpha = 0.5);

enum class Region { ShortRange, LongRange };
/// LongRange iff f(|x|) >= t.
Region classify_region(const Kernel& kernel, double t, double x);

/// Dilation x -> sign(x) inv_f(f(|x|)/eps) and its inverse, the contraction
/// x -> sign(x) inv_f(eps f(|x|)).
class RescalingMap {
 public:
  RescalingMap(const Kernel& kernel, double eps);

  double eps() const { return eps_; }
  double forward(double x) const;
  double inverse(double x) const;
  double forward_jacobian(double x) const;
  double inverse_jacobian(double x) const;

 private:
  Kernel kernel_;
  double eps_;
};

RescalingMap dilation(const Kernel& kernel, double eps);

struct HopfColeSample {
  double t = 0.0;
  double x = 0.0;
  double u_eps = 0.0;
  double u_limit = 0.0;  // max(f(x) - t, 0)
  double abs_err = 0.0;
  bool floored = false;  // n was below 1e-300 and was floored before the log
};

/// u_eps(t, x) = -eps ln n(t/eps, Psi_eps(x)) for one snapshot n taken at
/// time t/eps. Points whose image lies farther out than `usable` raise
/// Error(OutOfDomain).
std::vector<HopfColeSample> hopf_cole_slice(const Kernel& kernel, const Field& n, double eps,
                                            double t, const std::vector<double>& xs,
                                            double usable);

/// Samples u_eps on xs x ts from the snapshots of a run; each t/eps must be
/// a snapshot time. The usable half-width is L minus the kernel radius.
std::vector<HopfColeSample> hopf_cole_field(const Kernel& kernel, const SimulationRun& run,
                                            double eps, const std::vector<double>& xs,
                                            const std::vector<double>& ts);

/// sup |u_eps - u_limit| over non-floored samples.
double hopf_cole_error(const std::vector<HopfColeSample>& samples);

}  // namespace fatkpp
