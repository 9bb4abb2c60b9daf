#include "fatkpp/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fatkpp/errors.hpp"

namespace fatkpp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFloor = 1e-300;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Usable nodes: at least `margin` away from both ends of the grid.
std::pair<std::size_t, std::size_t> interior_range(const Grid1D& grid, double margin) {
  const auto cells = static_cast<std::size_t>(std::ceil(margin / grid.dx()));
  if (2 * cells >= grid.N) return {0, 0};
  return {cells, grid.N - cells};
}

}  // namespace

double rightmost_crossing(const Field& n, double level) {
  if (!(level > 0.0 && level < 1.0)) raise(ErrorKind::InvalidParams, "level must lie in (0,1)");
  for (std::size_t i = n.size() - 1; i > 0; --i) {
    const double a = n.values[i - 1];
    const double b = n.values[i];
    if (a >= level && b < level) {
      const double w = (a - level) / (a - b);
      return n.grid.x(i - 1) + w * n.grid.dx();
    }
  }
  return kNaN;
}

void FrontTrack::append(const Kernel& kernel, double t, const Field& n) {
  times.push_back(t);
  positions.push_back(rightmost_crossing(n, level));
  predicted.push_back(kernel.inv_f(t));
  lower.push_back(kernel.inv_f((1.0 - delta) * t));
  upper.push_back(kernel.inv_f(rho * t));
}

FrontTrack track_level(const Kernel& kernel, const SimulationRun& run, double level, double delta,
                       double rho) {
  if (!(level > 0.0 && level < 1.0)) raise(ErrorKind::InvalidParams, "level must lie in (0,1)");
  run.require_clean();
  FrontTrack track;
  track.level = level;
  track.delta = delta;
  track.rho = rho;
  for (const auto& s : run.snapshots) track.append(kernel, s.t, s.field);
  return track;
}

double phi_envelope(const Kernel& kernel, double t, double x) {
  const double z = kernel.f(x) - t;  // phi = 1 / (1 + e^z)
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double phi_envelope_dx(const Kernel& kernel, double t, double x) {
  const double phi = phi_envelope(kernel, t, x);
  const double z = kernel.f(x) - t;
  // 1 - phi = 1 / (1 + e^{-z}), evaluated without cancellation.
  const double one_minus = z < 0.0 ? std::exp(z) / (1.0 + std::exp(z)) : 1.0 / (1.0 + std::exp(-z));
  return -phi * one_minus * kernel.f_prime(x) * sign(x);
}

Field phi_field(const Kernel& kernel, const Grid1D& grid, double t) {
  return Field::from_function(grid, [&](double x) { return phi_envelope(kernel, t, x); });
}

double envelope_residual(const Kernel& kernel, const DiscreteKernel& dk, double t) {
  const Grid1D& grid = dk.grid();
  const Field phi = phi_field(kernel, grid, t);
  const Field conv = convolve(dk, phi);
  const auto [lo, hi] = interior_range(grid, dk.radius());
  double worst = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    worst = std::max(worst, std::abs(conv.values[i] - phi.values[i]) / phi.values[i]);
  }
  return worst;
}

EnvelopeMonitor::EnvelopeMonitor(const Kernel& kernel, const DiscreteKernel& dk, double C_lower,
                                 double C_upper, double margin)
    : kernel_(kernel), dk_(dk), c_lower_(C_lower), c_upper_(C_upper), margin_(margin) {}

const EnvelopeMonitor::Sample& EnvelopeMonitor::observe(double t, const Field& n) {
  Sample s;
  s.t = t;
  s.theta_hat = envelope_residual(kernel_, dk_, t);
  if (samples_.empty()) {
    if (t != 0.0) raise(ErrorKind::InvalidParams, "the envelope monitor must start at t = 0");
  } else {
    const Sample& prev = samples_.back();
    if (!(t > prev.t)) raise(ErrorKind::InvalidParams, "envelope observations must advance in time");
    s.theta_integral = prev.theta_integral + 0.5 * (t - prev.t) * (prev.theta_hat + s.theta_hat);
  }
  const double lo_factor = c_lower_ * std::exp(-s.theta_integral);
  const double hi_factor = 2.0 * c_upper_ * std::exp(s.theta_integral);
  const auto [first, last] = interior_range(n.grid, margin_);
  for (std::size_t i = first; i < last; ++i) {
    const double phi = phi_envelope(kernel_, t, n.grid.x(i));
    const double lower = lo_factor * phi;
    const double upper = hi_factor * phi;
    const double v = n.values[i];
    if (v < lower) s.lo_violation = std::max(s.lo_violation, (lower - v) / lower);
    if (v > upper) s.hi_violation = std::max(s.hi_violation, (v - upper) / upper);
  }
  samples_.push_back(s);
  return samples_.back();
}

double EnvelopeMonitor::worst_lo_violation() const {
  double w = 0.0;
  for (const auto& s : samples_) w = std::max(w, s.lo_violation);
  return w;
}

double EnvelopeMonitor::worst_hi_violation() const {
  double w = 0.0;
  for (const auto& s : samples_) w = std::max(w, s.hi_violation);
  return w;
}

double theta1(const Kernel& kernel, double t, double theta1_alpha) {
  if (kernel.thin_tailed()) {
    raise(ErrorKind::InvalidParams, "theta1 needs a fat-tailed kernel (sup|f'| is infinite)");
  }
  if (!(theta1_alpha > 0.0 && theta1_alpha < 1.0)) {
    raise(ErrorKind::InvalidParams, "theta1_alpha must lie in (0,1)");
  }
  const double a = theta1_alpha;
  const double decay = kernel.fprime_sup() * std::exp(-(1.0 - a) * t);
  // f' increases up to x_conc and decreases beyond it.
  const double z = std::max(kernel.inv_f(a * t), kernel.x_conc());
  return std::max(decay, kernel.f_prime(z));
}

double gamma_loc(const Kernel& kernel, double t, double theta1_alpha) {
  const double slope = kernel.f_prime(0.5 * kernel.inv_f(t));
  const double first = slope > 0.0 ? 1.0 / slope : std::numeric_limits<double>::infinity();
  return std::min(first, 1.0 / theta1(kernel, t, theta1_alpha));
}

Region classify_region(const Kernel& kernel, double t, double x) {
  return kernel.f(x) >= t ? Region::LongRange : Region::ShortRange;
}

RescalingMap::RescalingMap(const Kernel& kernel, double eps) : kernel_(kernel), eps_(eps) {
  if (!(eps > 0.0 && eps <= 1.0)) raise(ErrorKind::InvalidParams, "eps must lie in (0,1]");
}

double RescalingMap::forward(double x) const {
  if (eps_ == 1.0) return x;
  return sign(x) * kernel_.inv_f(kernel_.f(x) / eps_);
}

double RescalingMap::inverse(double x) const {
  if (eps_ == 1.0) return x;
  return sign(x) * kernel_.inv_f(eps_ * kernel_.f(x));
}

double RescalingMap::forward_jacobian(double x) const {
  if (eps_ == 1.0) return 1.0;
  return kernel_.f_prime(x) / (eps_ * kernel_.f_prime(forward(x)));
}

double RescalingMap::inverse_jacobian(double x) const {
  if (eps_ == 1.0) return 1.0;
  return eps_ * kernel_.f_prime(x) / kernel_.f_prime(inverse(x));
}

RescalingMap dilation(const Kernel& kernel, double eps) { return RescalingMap(kernel, eps); }

std::vector<HopfColeSample> hopf_cole_slice(const Kernel& kernel, const Field& n, double eps,
                                            double t, const std::vector<double>& xs,
                                            double usable) {
  const RescalingMap map(kernel, eps);
  std::vector<HopfColeSample> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const double y = map.forward(x);
    if (!(std::abs(y) <= usable)) {
      std::ostringstream msg;
      msg << "Psi_eps(" << x << ") = " << y << " lies beyond the usable half-width " << usable;
      raise(ErrorKind::OutOfDomain, msg.str());
    }
    HopfColeSample s;
    s.t = t;
    s.x = x;
    const double v = n.interpolate(y);
    s.floored = !(v >= kFloor);
    s.u_eps = -eps * std::log(std::max(v, kFloor));
    s.u_limit = std::max(kernel.f(x) - t, 0.0);
    s.abs_err = std::abs(s.u_eps - s.u_limit);
    out.push_back(s);
  }
  return out;
}

std::vector<HopfColeSample> hopf_cole_field(const Kernel& kernel, const SimulationRun& run,
                                            double eps, const std::vector<double>& xs,
                                            const std::vector<double>& ts) {
  const double usable = run.grid.L - run.manifest.kernel_radius;
  std::vector<HopfColeSample> out;
  for (double t : ts) {
    const double s = t / eps;
    const Snapshot& snap = run.nearest_snapshot(s);
    if (std::abs(snap.t - s) > 1e-9 * std::max(1.0, s)) {
      std::ostringstream msg;
      msg << "no snapshot at t/eps = " << s;
      raise(ErrorKind::DomainError, msg.str());
    }
    if (run.manifest.contaminated && s >= run.manifest.aborted_at) run.require_clean();
    auto slice = hopf_cole_slice(kernel, snap.field, eps, t, xs, usable);
    out.insert(out.end(), slice.begin(), slice.end());
  }
  return out;
}

double hopf_cole_error(const std::vector<HopfColeSample>& samples) {
  double worst = 0.0;
  for (const auto& s : samples) {
    if (!s.floored) worst = std::max(worst, s.abs_err);
  }
  return worst;
}

}  // namespace fatkpp
