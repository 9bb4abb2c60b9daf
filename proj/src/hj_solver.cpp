#include "fatkpp/hj_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fatkpp/errors.hpp"
#include "fatkpp/quadrature.hpp"

namespace fatkpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void out_of_range(double p, double limit) {
  std::ostringstream msg;
  msg << "|p| = " << std::abs(p) << " is outside the admissible range " << limit;
  raise(ErrorKind::GradientOutOfRange, msg.str());
}

}  // namespace

Hamiltonian::Hamiltonian(const Kernel& kernel) : kernel_(kernel) {
  if (!kernel.mutation_eligible()) {
    raise(ErrorKind::NotMutationEligible, "the Hamiltonian needs f'(0) in (0, inf)");
  }
  p_max_ = kernel.fprime0() * (1.0 - 1.0 / kernel.mu());
}

// 2 \int_0^inf g^k c_k(p g) J/Z with g = f/f'(0) and c_0 = cosh - 1,
// c_1 = sinh, c_2 = cosh.
double Hamiltonian::moment(double p, int power) const {
  const double a = std::abs(p);
  if (power == 0 && a == 0.0) return 0.0;
  const double f0 = kernel_.fprime0();
  const double inv_z = 1.0 / kernel_.mass();
  // The growth e^{x} is folded into J = e^{-f} so that no factor overflows
  // far out in the tail, where x - f = f (a/f'(0) - 1) < 0.
  auto integrand = [&](double h) {
    const double f = kernel_.f(h);
    const double g = f / f0;
    const double x = a * g;
    const double up = std::exp(x - f);
    const double down = std::exp(-x - f);
    double value = 0.0;
    if (power == 0) {
      const double w = -std::expm1(-x);  // cosh x - 1 = e^x (1 - e^{-x})^2 / 2
      value = 0.5 * w * w * up;
    } else if (power == 1) {
      // sinh directly where e^x - e^{-x} would cancel.
      value = x < 1.0 ? g * std::sinh(x) * std::exp(-f) : 0.5 * g * (up - down);
    } else {
      value = 0.5 * g * g * (up + down);
    }
    return value * inv_z;
  };
  const double c = 1.0 - a / f0;
  auto tail = [&](double B) {
    return 2.0 * kernel_.tail_bound(B, c, power) / (std::pow(f0, power) * kernel_.mass());
  };
  const auto result = adaptive_integrate(integrand, 0.0, kInf, TailBound(tail),
                                         {.abs = 1e-14, .rel = 1e-11});
  return 2.0 * result.value;
}

double Hamiltonian::eval(double p) const {
  if (!(std::abs(p) < p_max_)) out_of_range(p, p_max_);
  return 1.0 + moment(p, 0);
}

double Hamiltonian::derivative(double p) const {
  if (!(std::abs(p) < p_max_)) out_of_range(p, p_max_);
  const double d = moment(p, 1);
  return p < 0.0 ? -d : d;
}

double Hamiltonian::derivative_fd(double p) const {
  const double h = 1e-4 * p_max_;
  return (eval(p + h) - eval(p - h)) / (2.0 * h);
}

double Hamiltonian::second_derivative(double p) const {
  if (!(std::abs(p) < p_max_)) out_of_range(p, p_max_);
  return moment(p, 2);
}

KappaBounds Hamiltonian::kappa_bounds(double A) const {
  const double upper_A = 1.0 - 1.0 / kernel_.mu();
  if (!(A > 0.0 && A < upper_A)) {
    std::ostringstream msg;
    msg << "A = " << A << " must lie in (0, " << upper_A << ")";
    raise(ErrorKind::InvalidParams, msg.str());
  }
  const double f0 = kernel_.fprime0();
  auto weighted = [&](double sign) {
    auto integrand = [&](double h) {
      const double f = kernel_.f(h);
      const double g = f / f0;
      return g * g * std::exp(sign * A * g - f) / kernel_.mass();
    };
    const double c = 1.0 - std::max(sign, 0.0) * A / f0;
    auto tail = [&](double B) {
      return kernel_.tail_bound(B, c, 2) / (f0 * f0 * kernel_.mass());
    };
    return adaptive_integrate(integrand, 0.0, kInf, TailBound(tail), {.abs = 1e-14, .rel = 1e-11})
        .value;
  };
  return {weighted(-1.0), weighted(1.0)};
}

HamiltonianFunction tabulate(const Hamiltonian& hamiltonian, double range, std::size_t intervals) {
  if (!(range > 0.0 && range < hamiltonian.p_max())) {
    raise(ErrorKind::GradientOutOfRange, "table range must lie in (0, p_max)");
  }
  if (intervals < 2) raise(ErrorKind::InvalidParams, "a table needs at least two intervals");
  const double h = range / static_cast<double>(intervals);
  auto values = std::make_shared<std::vector<double>>(intervals + 1);
  auto slopes = std::make_shared<std::vector<double>>(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    const double p = static_cast<double>(j) * h;
    (*values)[j] = hamiltonian.eval(p);
    (*slopes)[j] = hamiltonian.derivative(p);
  }
  // Locates |p| in the table; returns the interval and local coordinate.
  auto locate = [=](double p) {
    const double a = std::abs(p);
    if (!(a <= range * (1.0 + 1e-12))) out_of_range(p, range);
    const auto j = std::min(static_cast<std::size_t>(a / h), intervals - 1);
    return std::pair{j, a / h - static_cast<double>(j)};
  };
  HamiltonianFunction out;
  out.range = range;
  out.H = [=](double p) {
    const auto [j, s] = locate(p);
    const double y0 = (*values)[j], y1 = (*values)[j + 1];
    const double d0 = (*slopes)[j] * h, d1 = (*slopes)[j + 1] * h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * d1;
  };
  out.dH = [=](double p) {
    const auto [j, s] = locate(p);
    const double y0 = (*values)[j], y1 = (*values)[j + 1];
    const double d0 = (*slopes)[j] * h, d1 = (*slopes)[j + 1] * h;
    const double s2 = s * s;
    const double d = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * d0 + (-6 * s2 + 6 * s) * y1 +
                      (3 * s2 - 2 * s) * d1) /
                     h;
    return p < 0.0 ? -d : d;
  };
  return out;
}

HamiltonianFunction quadratic_hamiltonian(double kappa) {
  if (!(kappa > 0.0)) raise(ErrorKind::InvalidParams, "kappa must be positive");
  HamiltonianFunction out;
  out.range = kInf;
  out.H = [kappa](double p) { return 1.0 + kappa * p * p; };
  out.dH = [kappa](double p) { return 2.0 * kappa * p; };
  return out;
}

double discrete_lipschitz(const Field& u) {
  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    lip = std::max(lip, std::abs(u.values[i + 1] - u.values[i]));
  }
  return lip / u.grid.dx();
}

namespace {

double lf_sigma(const HamiltonianFunction& ham, double lip, double safety) {
  const double range = std::isfinite(ham.range) ? ham.range : std::max(1.0, 2.0 * lip);
  const double step = 1e-4 * range;
  double worst = 0.0;
  constexpr int kSamples = 64;
  for (int k = 0; k <= kSamples; ++k) {
    const double p = lip * k / kSamples;
    const double lo = std::max(p - step, -range);
    const double hi = std::min(p + step, range);
    worst = std::max(worst, std::abs((ham.H(hi) - ham.H(lo)) / (hi - lo)));
  }
  return safety * worst;
}

void check_initial_data(const Field& u0) {
  if (!u0.all_finite()) raise(ErrorKind::InvalidParams, "u0 must be finite");
  if (std::any_of(u0.values.begin(), u0.values.end(), [](double v) { return v < 0.0; })) {
    raise(ErrorKind::InvalidParams, "u0 must be nonnegative");
  }
}

}  // namespace

HJSolution solve_constrained_hj(const HamiltonianFunction& ham, const Field& u0,
                                const std::vector<double>& snapshot_times,
                                const HJOptions& options) {
  const Grid1D& grid = u0.grid;
  const std::size_t n = grid.N;
  const double dx = grid.dx();
  check_initial_data(u0);

  HJSolution sol;
  sol.initial_lipschitz = discrete_lipschitz(u0);
  sol.max_lipschitz = sol.initial_lipschitz;
  if (!(sol.initial_lipschitz <= ham.range)) out_of_range(sol.initial_lipschitz, ham.range);

  sol.sigma = std::max(lf_sigma(ham, sol.initial_lipschitz, options.sigma_safety), 1e-12);
  if (options.sigma > 0.0) {
    if (options.sigma < sol.sigma) {
      std::ostringstream msg;
      msg << "sigma = " << options.sigma << " is below the monotonicity bound " << sol.sigma;
      raise(ErrorKind::InvalidParams, msg.str());
    }
    sol.sigma = options.sigma;
  }
  const double dt_cfl = 0.9 * dx / sol.sigma;
  double dt = dt_cfl;
  if (options.dt > 0.0) {
    if (options.dt > dt_cfl * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "dt = " << options.dt << " exceeds the CFL bound " << dt_cfl;
      raise(ErrorKind::CFLViolation, msg.str());
    }
    dt = options.dt;
  }
  sol.dt = dt;

  std::vector<double> times = snapshot_times;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (!times.empty() && times.front() < 0.0) {
    raise(ErrorKind::InvalidParams, "snapshot times must be >= 0");
  }

  Field u = u0;
  Field next = u0;
  const double sigma = sol.sigma;
  auto advance = [&](double h) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? u.values[i - 1] : 2.0 * u.values[0] - u.values[1];
      const double right = i + 1 < n ? u.values[i + 1] : 2.0 * u.values[n - 1] - u.values[n - 2];
      double pm = (u.values[i] - left) / dx;
      double pp = (right - u.values[i]) / dx;
      if (i == 0 || i + 1 == n) {
        pm = std::clamp(pm, -ham.range, ham.range);
        pp = std::clamp(pp, -ham.range, ham.range);
      }
      const double flux = ham.H(0.5 * (pm + pp)) - 0.5 * sigma * (pp - pm);
      next.values[i] = std::max(u.values[i] - h * flux, 0.0);
    }
    std::swap(u.values, next.values);
    const double lip = discrete_lipschitz(u);
    sol.max_lipschitz = std::max(sol.max_lipschitz, lip);
    if (!(lip <= ham.range)) out_of_range(lip, ham.range);
  };

  double t = 0.0;
  for (double target : times) {
    const double span = target - t;
    if (span > 0.0) {
      const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
      const double h = span / static_cast<double>(substeps);
      for (std::size_t s = 0; s < substeps; ++s) advance(h);
      sol.steps += substeps;
      t = target;
    }
    sol.snapshots.push_back({target, u});
  }
  return sol;
}

HJSolution solve_constrained_hj(const Hamiltonian& hamiltonian, const Field& u0,
                                const std::vector<double>& snapshot_times,
                                const HJOptions& options) {
  check_initial_data(u0);
  const double lip = discrete_lipschitz(u0);
  if (!(lip < hamiltonian.p_max())) out_of_range(lip, hamiltonian.p_max());
  const double range = std::min(0.999 * hamiltonian.p_max(), std::max(1.25 * lip, 1e-3));
  return solve_constrained_hj(tabulate(hamiltonian, range), u0, snapshot_times, options);
}

ZeroSetBoundary zero_set_boundary(const Field& u, double tol) {
  const std::size_t c = u.grid.center();
  if (u.values[c] > tol) return {kNaN, kNaN};
  std::size_t hi = c;
  while (hi + 1 < u.size() && u.values[hi + 1] <= tol) ++hi;
  std::size_t lo = c;
  while (lo > 0 && u.values[lo - 1] <= tol) --lo;
  return {u.grid.x(lo), u.grid.x(hi)};
}

double example_inclusion_radius(const Kernel& kernel, double kappa, double A, double t,
                                std::size_t samples) {
  if (samples < 2) raise(ErrorKind::InvalidParams, "the r-scan needs at least two samples");
  double best = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double r = static_cast<double>(k) / static_cast<double>(samples - 1);
    const double value = 2.0 * std::sqrt(kappa) * r * t + kernel.inv_f(t * (1.0 - r * r) / A);
    best = std::max(best, value);
  }
  return best;
}

double hopf_lax_quadratic(const Kernel& kernel, double A, double kappa, double t, double x) {
  if (!(t > 0.0)) return A * kernel.f(x);
  auto cost = [&](double y) {
    const double d = x - y;
    return A * kernel.f(y) + d * d / (4.0 * kappa * t);
  };
  // The minimizer lies between 0 and x: moving y toward 0 lowers f.
  const double a = std::min(0.0, x);
  const double b = std::max(0.0, x);
  constexpr int kScan = 4000;
  double best_y = a;
  double best = cost(a);
  for (int k = 1; k <= kScan; ++k) {
    const double y = a + (b - a) * k / kScan;
    const double c = cost(y);
    if (c < best) {
      best = c;
      best_y = y;
    }
  }
  // Golden-section refinement inside the bracketing cells.
  const double cell = (b - a) / kScan;
  double lo = std::max(a, best_y - cell);
  double hi = std::min(b, best_y + cell);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + std::abs(x)); ++it) {
    const double y1 = hi - g * (hi - lo);
    const double y2 = lo + g * (hi - lo);
    if (cost(y1) < cost(y2)) {
      hi = y2;
    } else {
      lo = y1;
    }
  }
  best = std::min(best, cost(0.5 * (lo + hi)));
  return std::max(best - t, 0.0);
}

std::vector<CrossValidationRow> cross_validate(const std::vector<MutationRun>& runs,
                                               const HJSolution& hj, double x_max,
                                               double front_band) {
  std::vector<CrossValidationRow> rows;
  for (const auto& mr : runs) {
    CrossValidationRow row;
    row.eps = mr.eps;
    bool matched = false;
    for (const auto& snap : mr.snapshots) {
      const HJSnapshot* ref = nullptr;
      for (const auto& h : hj.snapshots) {
        if (std::abs(h.t - snap.t) <= 1e-9 * std::max(1.0, snap.t)) ref = &h;
      }
      if (!ref || snap.t <= 0.0) continue;
      matched = true;
      const ZeroSetBoundary zero = zero_set_boundary(ref->u);
      const Grid1D& grid = snap.u.grid;
      for (std::size_t i = 0; i < grid.N; ++i) {
        const double x = grid.x(i);
        if (std::abs(x) > x_max || snap.floored[i]) continue;
        const double err = std::abs(snap.u.values[i] - ref->u.interpolate(x));
        row.error = std::max(row.error, err);
        const double edge = x >= 0.0 ? zero.right : zero.left;
        const bool near_front = std::isfinite(edge) && std::abs(x - edge) <= front_band;
        if (!near_front) row.error_inner = std::max(row.error_inner, err);
      }
    }
    if (!matched) {
      raise(ErrorKind::DomainError, "mutation run shares no snapshot time with the HJ solution");
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fatkpp
