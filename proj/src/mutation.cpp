#include "fatkpp/mutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fatkpp/errors.hpp"
#include "fatkpp/quadrature.hpp"

namespace fatkpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFloor = 1e-300;

void require_eligible(const Kernel& kernel) {
  if (!kernel.mutation_eligible()) {
    raise(ErrorKind::NotMutationEligible,
          std::string(to_string(kernel.spec().family)) +
              " kernel has f'(0) = 0; the small-mutation limit needs f'(0) in (0, inf)");
  }
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) raise(ErrorKind::InvalidParams, "eps must lie in (0,1]");
}

void require_A(const Kernel& kernel, double A) {
  const double upper = 1.0 - 1.0 / kernel.mu();
  if (!(A > 0.0 && A < upper)) {
    std::ostringstream msg;
    msg << "A = " << A << " must lie in (0, " << upper << ")";
    raise(ErrorKind::InvalidParams, msg.str());
  }
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Smallest R in [0, cap] with tail(R) <= target, for a nonincreasing tail.
double bisect_tail(const std::function<double(double)>& tail, double target, double cap) {
  if (tail(cap) > target) return cap;
  double lo = 0.0;
  double hi = cap;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

double contraction(const Kernel& kernel, double eps, double h) {
  require_eligible(kernel);
  require_eps(eps);
  if (eps == 1.0) return h;
  return sign(h) * kernel.inv_f(eps * kernel.f(h));
}

double rescaled_density(const Kernel& kernel, double eps, double y) {
  return MutationKernel(kernel, eps).density(y);
}

MutationKernel::MutationKernel(const Kernel& base, double eps) : base_(base), eps_(eps) {
  require_eligible(base);
  require_eps(eps);
}

double MutationKernel::contract(double h) const {
  if (eps_ == 1.0) return h;
  return sign(h) * base_.inv_f(eps_ * base_.f(h));
}

double MutationKernel::dilate(double y) const {
  if (eps_ == 1.0) return y;
  return sign(y) * base_.inv_f(base_.f(y) / eps_);
}

double MutationKernel::density(double y) const {
  const double h = std::abs(y);
  if (h == 0.0) return 1.0 / (eps_ * base_.mass());
  if (eps_ == 1.0) return base_.density(h);
  const double fy = base_.f(h);
  const double log_value = -std::log(eps_) + std::log(base_.f_prime(h)) -
                           base_.log_fprime_at_inv_f(fy / eps_) - fy / eps_ -
                           std::log(base_.mass());
  return std::exp(log_value);
}

double MutationKernel::tail_mass(double R) const {
  if (!(R > 0.0)) return 1.0;
  const double image = dilate(R);
  return std::isfinite(image) ? base_.tail_mass(image) : 0.0;
}

double MutationKernel::mass() const {
  const auto half = adaptive_integrate(
      [this](double y) { return density(y); }, 0.0, kInf,
      TailBound([this](double B) { return base_.tail_bound(dilate(B), 1.0, 0) / base_.mass(); }),
      {.abs = 1e-13, .rel = 1e-11});
  return 2.0 * half.value;
}

double MutationKernel::second_moment_f() const {
  const auto half = adaptive_integrate(
      [this](double y) {
        const double fy = base_.f(y);
        return fy * fy * density(y);
      },
      0.0, kInf,
      TailBound([this](double B) {
        return eps_ * eps_ * base_.tail_bound(dilate(B), 1.0, 2) / base_.mass();
      }),
      {.abs = 1e-14, .rel = 1e-10});
  return 2.0 * half.value;
}

DiscreteKernel MutationKernel::discretize(const Grid1D& grid, double tail_tol) const {
  const double h0 = upper_quartile(base_);
  const double resolution = contract(h0) / 4.0;
  if (grid.dx() > resolution) {
    std::ostringstream msg;
    msg << "dx = " << grid.dx() << " does not resolve the rescaled kernel; need dx <= "
        << resolution;
    raise(ErrorKind::GridTooCoarse, msg.str());
  }
  const double cap = 2.0 * grid.L;
  const double radius = bisect_tail([this](double R) { return tail_mass(R); }, tail_tol, cap);
  return DiscreteKernel::from_density(grid, [this](double y) { return density(y); }, radius,
                                      tail_mass(radius));
}

double upper_quartile(const Kernel& kernel) {
  double hi = 1.0;
  while (kernel.tail_mass(hi) > 0.5) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (kernel.tail_mass(mid) > 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double apriori_rate(const Kernel& kernel, double A) {
  require_A(kernel, A);
  const auto half = adaptive_integrate(
      [&](double h) { return std::exp(-(1.0 - A) * kernel.f(h)); }, 0.0, kInf,
      TailBound([&](double B) { return kernel.tail_bound(B, 1.0 - A, 0); }),
      {.abs = 1e-12, .rel = 1e-10});
  return 2.0 * half.value / kernel.mass();
}

double default_A(const Kernel& kernel) { return 0.5 * (1.0 - 1.0 / kernel.mu()); }

InitialDataReport validate_initial_data(const Kernel& kernel, const InitialDataMut& data,
                                        double tol) {
  InitialDataReport report;
  const Field& u = data.u0;
  const double upper = 1.0 - 1.0 / kernel.mu();
  if (!(data.A > 0.0 && data.A < upper)) {
    std::ostringstream msg;
    msg << "A = " << data.A << " must lie in (0, " << upper << ")";
    report.problems.push_back(msg.str());
  }
  if (!u.all_finite()) report.problems.push_back("u0 has non-finite values");
  if (std::any_of(u.values.begin(), u.values.end(), [](double v) { return v < 0.0; })) {
    report.problems.push_back("u0 must be nonnegative");
  }
  const std::size_t n = u.size();
  const double dx = u.grid.dx();
  for (std::size_t offset = 1; offset < n; offset *= 2) {
    const double bound = data.A * kernel.f(static_cast<double>(offset) * dx);
    for (std::size_t i = 0; i + offset < n; ++i) {
      const double diff = u.values[i + offset] - u.values[i];
      report.worst_fd_violation = std::max(report.worst_fd_violation, -bound - diff);
      report.worst_fd_violation = std::max(report.worst_fd_violation, -bound + diff);
      report.pairs_checked += 2;
    }
  }
  if (report.worst_fd_violation > tol) {
    std::ostringstream msg;
    msg << "u0(x+h) - u0(x) >= -A f(|h|) fails by " << report.worst_fd_violation;
    report.problems.push_back(msg.str());
  }
  report.valid = report.problems.empty();
  return report;
}

InitialDataMut power_initial_data(const Kernel& kernel, const Grid1D& grid, double A) {
  InitialDataMut data;
  data.A = A;
  data.u0 = Field::zeros(grid);
  const std::size_t c = grid.center();
  for (std::size_t i = 0; i < grid.N; ++i) {
    const std::size_t d = i >= c ? i - c : c - i;
    data.u0.values[i] = A * kernel.f(static_cast<double>(d) * grid.dx());
  }
  return data;
}

MutationSnapshot hopf_cole_snapshot(double t, const Field& n, double eps) {
  MutationSnapshot s;
  s.t = t;
  s.n = n;
  s.u = Field::zeros(n.grid);
  s.floored.assign(n.size(), 0);
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double v = n.values[i];
    s.floored[i] = v < kFloor ? 1 : 0;
    s.u.values[i] = -eps * std::log(std::max(v, kFloor));
  }
  return s;
}

MutationRun mutation_run(const Kernel& kernel, const Grid1D& grid, double eps,
                         const SolverConfig& config, const InitialDataMut& data) {
  require_eligible(kernel);
  require_eps(eps);
  if (!(data.u0.grid == grid)) raise(ErrorKind::GridMismatch, "u0 lives on a different grid");
  const auto report = validate_initial_data(kernel, data);
  if (!report.valid) {
    std::string message;
    for (const auto& p : report.problems) message += (message.empty() ? "" : "; ") + p;
    raise(ErrorKind::InvalidParams, "invalid initial data: " + message);
  }
  const MutationKernel mk(kernel, eps);
  const DiscreteKernel dk = mk.discretize(grid);

  Field n0 = Field::zeros(grid);
  for (std::size_t i = 0; i < grid.N; ++i) n0.values[i] = std::exp(-data.u0.values[i] / eps);

  MutationRun out;
  out.eps = eps;
  out.A = data.A;
  SolverConfig cfg = config;
  cfg.rate = 1.0 / eps;
  RunOptions options;
  options.keep_snapshots = false;
  options.on_snapshot = [&](double t, const Field& n) {
    out.snapshots.push_back(hopf_cole_snapshot(t, n, eps));
  };
  out.run = run_with_kernel(dk, cfg, n0, options);
  out.run.manifest.kernel = kernel.spec();
  out.run.manifest.kernel_mass = kernel.mass();
  out.run.manifest.kernel_mu = kernel.mu();
  return out;
}

char region_code(LimitRegion region) {
  switch (region) {
    case LimitRegion::Positive: return 'A';
    case LimitRegion::Null: return 'B';
    case LimitRegion::Uncertain: return 'U';
  }
  return 'U';
}

std::vector<LimitRegion> classify_limit_sets(const Field& u, double tol, std::size_t erosion) {
  const std::size_t n = u.size();
  std::vector<LimitRegion> out(n, LimitRegion::Uncertain);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = u.values[i];
    if (v > tol) {
      out[i] = LimitRegion::Positive;
      continue;
    }
    if (!(v < tol)) continue;
    const std::size_t lo = i >= erosion ? i - erosion : 0;
    const std::size_t hi = std::min(n - 1, i + erosion);
    bool interior = true;
    for (std::size_t j = lo; j <= hi && interior; ++j) interior = u.values[j] < tol;
    if (interior) out[i] = LimitRegion::Null;
  }
  return out;
}

AprioriReport check_apriori(const Kernel& kernel, const MutationSnapshot& snap, const Field& u0,
                            double A, double r_hat, double margin, std::size_t pairs,
                            std::uint64_t seed) {
  AprioriReport report;
  const Grid1D& grid = snap.u.grid;
  const auto cells = static_cast<std::size_t>(std::ceil(margin / grid.dx()));
  if (2 * cells + 2 > grid.N) raise(ErrorKind::InvalidParams, "margin leaves no interior nodes");
  const std::size_t first = cells;
  const std::size_t last = grid.N - cells;  // exclusive
  const double t = snap.t;

  report.upper_excess = -kInf;
  report.lower_excess = -kInf;
  for (std::size_t i = first; i < last; ++i) {
    if (snap.floored[i]) continue;
    const double du = snap.u.values[i] - u0.values[i];
    report.upper_excess = std::max(report.upper_excess, du - t);
    report.lower_excess = std::max(report.lower_excess, -r_hat * t - du);
    ++report.points;
    if (i + 1 < last && !snap.floored[i + 1]) {
      report.lipschitz = std::max(report.lipschitz,
                                  std::abs(snap.u.values[i + 1] - snap.u.values[i]) / grid.dx());
    }
  }

  // Offsets are log-uniform so that short and long jumps are both sampled.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(first, last - 1);
  std::uniform_real_distribution<double> log_offset(0.0, std::log(static_cast<double>(last - first)));
  std::bernoulli_distribution forward(0.5);
  report.fd_violation = -kInf;
  for (std::size_t attempt = 0; report.pairs < pairs && attempt < 100 * pairs; ++attempt) {
    const std::size_t i = pick(rng);
    const auto offset = static_cast<std::size_t>(std::exp(log_offset(rng)));
    const bool ahead = forward(rng);
    if (offset == 0 || (ahead && i + offset >= last) || (!ahead && i < first + offset)) continue;
    const std::size_t j = ahead ? i + offset : i - offset;
    if (snap.floored[i] || snap.floored[j]) continue;
    const double h = (static_cast<double>(j) - static_cast<double>(i)) * grid.dx();
    const double diff = snap.u.values[j] - snap.u.values[i];
    report.fd_violation = std::max(report.fd_violation, -A * kernel.f(h) - diff);
    ++report.pairs;
  }
  return report;
}

}  // namespace fatkpp
