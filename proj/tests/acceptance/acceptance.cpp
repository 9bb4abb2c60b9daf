// Acceptance driver: one PASS/FAIL line per criterion, exit 1 if any
// selected criterion fails.
//
//   acceptance --criterion 3,4 --out build/acceptance_out

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fatkpp/cauchy_solver.hpp"
#include "fatkpp/config.hpp"
#include "fatkpp/errors.hpp"
#include "fatkpp/experiments.hpp"
#include "fatkpp/grid.hpp"
#include "fatkpp/hj_solver.hpp"
#include "fatkpp/kernel.hpp"
#include "fatkpp/mutation.hpp"
#include "fatkpp/propagation.hpp"

#ifndef FATKPP_CONFIG_DIR
#define FATKPP_CONFIG_DIR "configs"
#endif

using namespace fatkpp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the individual checks of one criterion.
class Checks {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
  }
  void note(const std::string& what) { notes_.push_back(what); }

  Outcome outcome() const {
    Outcome o;
    o.pass = failed_.empty();
    std::string s;
    for (const auto& f : failed_) s += (s.empty() ? "" : "; ") + ("violated: " + f);
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    o.detail = s;
    return o;
  }

 private:
  std::vector<std::string> failed_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g(double v) { return fmt("%.4g", v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void runtime_limit(Checks& c, std::chrono::steady_clock::time_point t0, double limit) {
  const double s = seconds_since(t0);
  c.require(s < limit, "runtime " + g(s) + " s < " + g(limit) + " s");
  c.note("runtime " + fmt("%.2f", s) + " s");
}

// 1. Hypothesis checks, normalization and inverse round trips.
Outcome criterion_1(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  const std::vector<std::pair<std::string, KernelSpec>> specs{
      {"Polynomial(4)", KernelSpec::polynomial(4.0)},
      {"SubExponential(0.5)", KernelSpec::sub_exponential(0.5)},
      {"LogLinear(2)", KernelSpec::log_linear(2.0)},
      {"LogLinear(3)", KernelSpec::log_linear(3.0)},
      {"PowerShift(1,0.5)", KernelSpec::power_shift(1.0, 0.5)},
  };
  double worst_mass = 0.0;
  double worst_round = 0.0;
  for (const auto& [name, spec] : specs) {
    const Kernel k = build_kernel(spec);
    const HypothesisReport r = validate_hypotheses(k);
    for (const auto& chk : r.checks) c.require(chk.passed, name + " check " + chk.name);
    c.require(r.mass_error <= 1e-8, name + " |int J/Z - 1| = " + g(r.mass_error) + " <= 1e-8");
    worst_mass = std::max(worst_mass, r.mass_error);
    for (double x = 1e-6; x <= 1e8; x *= 1.7) {
      const double fx = k.f(x);
      worst_round = std::max(worst_round, std::abs(k.inv_f(fx) - x) / x);
      // Where J(x) is within a few ulps of 1 the value no longer determines x;
      // that side of the round trip is only checked where J <= 1/2.
      const double jx = k.J(x);
      if (jx > 1e-280 && jx <= 0.5) worst_round = std::max(worst_round, std::abs(k.inv_J(jx) - x) / x);
    }
    for (double y = 1e-8; y <= 1e3; y *= 1.9) {
      worst_round = std::max(worst_round, std::abs(k.f(k.inv_f(y)) - y) / y);
    }
    std::vector<double> levels{0.9, 0.99};
    for (double v = 1e-280; v < 0.9; v *= 7.3) levels.push_back(v);
    for (double v : levels) worst_round = std::max(worst_round, std::abs(k.J(k.inv_J(v)) - v) / v);
  }
  c.require(worst_round <= 1e-9, "inverse round trip " + g(worst_round) + " <= 1e-9");
  c.note("worst mass error " + g(worst_mass));
  c.note("worst round trip " + g(worst_round));
  runtime_limit(c, t0, 10.0);
  return c.outcome();
}

// 2. FFT convolution against the direct sum.
Outcome criterion_2(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  std::mt19937_64 rng(20240601);
  const std::vector<KernelSpec> specs{KernelSpec::polynomial(4.0), KernelSpec::sub_exponential(0.5),
                                      KernelSpec::log_linear(3.0), KernelSpec::power_shift(1.0, 0.5),
                                      KernelSpec::gaussian(1.0)};
  std::uniform_int_distribution<int> log_n(4, 11);
  std::uniform_real_distribution<double> log_l(0.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, specs.size() - 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = std::size_t{1} << log_n(rng);
    const Grid1D grid = Grid1D::make(std::pow(10.0, log_l(rng)), N);
    const DiscreteKernel dk = DiscreteKernel::from_kernel(build_kernel(specs[pick(rng)]), grid);
    Field f = Field::zeros(grid);
    for (auto& v : f.values) v = unit(rng);
    const Field a = convolve(dk, f);
    const Field b = convolve_direct(dk, f);
    for (std::size_t i = 0; i < N; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  c.require(worst <= 1e-10, "max |FFT - direct| = " + g(worst) + " <= 1e-10");
  c.note("max |FFT - direct| " + g(worst) + " over 100 trials");
  runtime_limit(c, t0, 30.0);
  return c.outcome();
}

// 3 and 4 share one run: Polynomial(4), L = 5000, N = 2^21, t_end = 30.
Outcome criteria_3_4(const fs::path&, Outcome& out4) {
  const auto t0 = std::chrono::steady_clock::now();
  const Kernel k = build_kernel(KernelSpec::polynomial(4.0));
  const Grid1D grid = Grid1D::make(5000.0, std::size_t{1} << 21);
  const DiscreteKernel dk = DiscreteKernel::from_kernel(k, grid);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 30.0;
  for (int i = 0; i <= 60; ++i) cfg.snapshot_times.push_back(0.5 * i);
  EnvelopeMonitor monitor(k, dk, 1.0, 1.0, dk.radius());
  std::map<double, double> front;
  RunOptions opts;
  opts.keep_snapshots = false;
  opts.on_snapshot = [&](double t, const Field& n) {
    monitor.observe(t, n);
    if (t > 0.0) front[t] = rightmost_crossing(n, 0.5);
  };
  const SimulationRun run = run_with_kernel(dk, cfg, initial_condition(k, grid, 1.0), opts);

  Checks c3;
  c3.require(!run.manifest.contaminated, "run free of boundary contamination");
  for (double t : {20.0, 25.0, 30.0}) {
    const auto it = front.find(t);
    if (it == front.end() || !std::isfinite(it->second)) {
      c3.require(false, "level 1/2 crossed at t = " + g(t));
      continue;
    }
    const double ratio = k.f(it->second) / t;
    c3.require(std::abs(ratio - 1.0) <= 0.15, "|f(x_1/2)/t - 1| <= 0.15 at t = " + g(t));
    c3.note("t=" + g(t) + " f(x)/t=" + fmt("%.5f", ratio));
  }
  double shortfall = 0.0;
  for (const auto& [t, x] : front) {
    if (t < 10.0) continue;
    const double lo = k.inv_J(std::exp(-0.8 * t));
    if (!std::isfinite(x) || x < lo) shortfall = std::max(shortfall, std::isfinite(x) ? lo - x : INFINITY);
  }
  c3.require(shortfall == 0.0, "inv_J(e^{-0.8t}) <= x_1/2(t) for t >= 10 (shortfall " + g(shortfall) + ")");
  c3.note("clamp total " + g(run.manifest.clamp_total));
  c3.note("wall " + fmt("%.0f", seconds_since(t0)) + " s");

  Checks c4;
  c4.require(!run.manifest.contaminated, "run free of boundary contamination");
  const double lo = monitor.worst_lo_violation();
  const double hi = monitor.worst_hi_violation();
  c4.require(lo <= 0.0, "lower envelope, worst relative shortfall " + g(lo));
  c4.require(hi <= 0.0, "upper envelope, worst relative excess " + g(hi));
  double th5 = NAN;
  double th30 = NAN;
  for (const auto& s : monitor.samples()) {
    if (s.t == 5.0) th5 = s.theta_hat;
    if (s.t == 30.0) th30 = s.theta_hat;
  }
  c4.require(th30 < th5, "theta_hat(30) < theta_hat(5)");
  c4.note("snapshots " + std::to_string(monitor.samples().size()));
  c4.note("theta_hat(5)=" + g(th5) + " theta_hat(30)=" + g(th30));
  c4.note("worst lo/hi " + g(lo) + "/" + g(hi));
  out4 = c4.outcome();
  return c3.outcome();
}

// 5. |d phi/dx| <= theta1(t) phi.
Outcome criterion_5(const fs::path&) {
  Checks c;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> near(-60.0, 60.0);
  std::uniform_real_distribution<double> decade(-3.0, 9.0);
  std::bernoulli_distribution sign(0.5);
  double worst = -INFINITY;
  std::size_t violations = 0;
  for (const auto& spec : {KernelSpec::polynomial(4.0), KernelSpec::sub_exponential(0.5)}) {
    const Kernel k = build_kernel(spec);
    for (double t : {5.0, 20.0}) {
      const double th = theta1(k, t);
      for (int i = 0; i < 10000; ++i) {
        double x = i % 2 == 0 ? near(rng) : std::pow(10.0, decade(rng));
        if (i % 2 == 1 && sign(rng)) x = -x;
        const double excess = std::abs(phi_envelope_dx(k, t, x)) - th * phi_envelope(k, t, x);
        worst = std::max(worst, excess);
        if (excess > 1e-10) ++violations;
      }
    }
  }
  c.require(violations == 0, std::to_string(violations) + " samples beyond 1e-10");
  c.note("40000 samples, max(|phi_x| - theta1 phi) = " + g(worst));
  return c.outcome();
}

// 6. Hopf-Cole convergence on SubExponential(0.5).
Outcome criterion_6(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  const Kernel k = build_kernel(KernelSpec::sub_exponential(0.5));
  const Grid1D grid = Grid1D::make(1000.0, std::size_t{1} << 21);
  const DiscreteKernel dk = DiscreteKernel::from_kernel(k, grid);
  const CompactBlock compact;
  const std::vector<double> xs = compact.xs();
  const std::vector<double> ts = compact.ts();
  const std::vector<double> eps{0.4, 0.2, 0.1};

  SolverConfig cfg;
  cfg.dt = 0.125;
  cfg.t_end = 20.0;
  for (double e : eps) {
    for (double t : ts) cfg.snapshot_times.push_back(t / e);
  }
  std::sort(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
  cfg.snapshot_times.erase(std::unique(cfg.snapshot_times.begin(), cfg.snapshot_times.end(),
                                       [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
                           cfg.snapshot_times.end());
  std::map<double, double> E;
  std::map<double, int> slices;
  const double usable = grid.L - dk.radius();
  RunOptions opts;
  opts.keep_snapshots = false;
  opts.on_snapshot = [&](double s, const Field& n) {
    for (double e : eps) {
      for (double t : ts) {
        if (std::abs(t / e - s) > 1e-9 * s) continue;
        E[e] = std::max(E[e], hopf_cole_error(hopf_cole_slice(k, n, e, t, xs, usable)));
        ++slices[e];
      }
    }
  };
  const SimulationRun run = run_with_kernel(dk, cfg, initial_condition(k, grid, 1.0), opts);
  c.require(!run.manifest.contaminated, "run free of boundary contamination");
  for (double e : eps) c.require(slices[e] == static_cast<int>(ts.size()), "every slice of eps " + g(e) + " computed");
  c.require(E[0.2] <= E[0.4] && E[0.1] <= E[0.2], "E(eps) nonincreasing as eps decreases");
  c.require(E[0.1] <= 0.5, "E(0.1) <= 0.5");
  for (double e : eps) c.note("E(" + g(e) + ")=" + fmt("%.4f", E[e]));
  c.note("wall " + fmt("%.0f", seconds_since(t0)) + " s");
  return c.outcome();
}

// 7. Mass and second moment of the rescaled jump law.
Outcome criterion_7(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  const Kernel k = build_kernel(KernelSpec::log_linear(3.0));
  // For beta = 3: Z = 1 and \int f^2 J/Z = 18 \int_0^inf y^2 e^{-2y} dy = 9/2.
  const double m2 = 4.5;
  for (double e : {0.5, 0.25, 0.1}) {
    const MutationKernel mk(k, e);
    const double mass_err = std::abs(mk.mass() - 1.0);
    const double rel = std::abs(mk.second_moment_f() - e * e * m2) / (e * e * m2);
    c.require(mass_err <= 1e-6, "|int J_eps - 1| <= 1e-6 at eps " + g(e));
    c.require(rel <= 1e-4, "second moment relative error <= 1e-4 at eps " + g(e));
    c.note("eps " + g(e) + ": mass err " + g(mass_err) + ", moment err " + g(rel));
  }
  runtime_limit(c, t0, 30.0);
  return c.outcome();
}

// 8. A-priori bounds on a mutation run.
Outcome criterion_8(const fs::path&) {
  Checks c;
  const Kernel k = build_kernel(KernelSpec::log_linear(3.0));
  const double A = 0.25;
  const double eps = 0.1;
  const Grid1D grid = Grid1D::make(512.0, std::size_t{1} << 18);
  const InitialDataMut data = power_initial_data(k, grid, A);
  SolverConfig cfg;
  cfg.dt = 0.025;
  cfg.t_end = 2.0;
  for (int i = 1; i <= 8; ++i) cfg.snapshot_times.push_back(0.25 * i);
  const MutationRun mr = mutation_run(k, grid, eps, cfg, data);
  c.require(!mr.run.manifest.contaminated, "run free of boundary contamination");
  const double r_hat = apriori_rate(k, A);
  const double lip_bound = 1.05 * A * k.fprime0();
  const double margin = mr.run.manifest.kernel_radius + 10.0 * grid.dx();
  AprioriReport worst;
  for (const auto& s : mr.snapshots) {
    const AprioriReport r = check_apriori(k, s, data.u0, A, r_hat, margin, 10000);
    c.require(r.pairs == 10000, "10^4 pairs sampled at t = " + g(s.t));
    worst.upper_excess = std::max(worst.upper_excess, r.upper_excess);
    worst.lower_excess = std::max(worst.lower_excess, r.lower_excess);
    worst.fd_violation = std::max(worst.fd_violation, r.fd_violation);
    worst.lipschitz = std::max(worst.lipschitz, r.lipschitz);
  }
  c.require(mr.snapshots.size() == 8, "8 snapshots");
  // The two bounds carry no stated slack; 1e-12 absorbs round-off in u - u0.
  c.require(worst.upper_excess <= 1e-12, "u - u0 <= t (excess " + g(worst.upper_excess) + ")");
  c.require(worst.lower_excess <= 1e-12, "u - u0 >= -r t (excess " + g(worst.lower_excess) + ")");
  c.require(worst.fd_violation <= 1e-6, "finite-difference condition (violation " + g(worst.fd_violation) + ")");
  c.require(worst.lipschitz <= lip_bound, "Lipschitz " + g(worst.lipschitz) + " <= " + g(lip_bound));
  c.note("r_hat " + g(r_hat) + ", Lipschitz " + g(worst.lipschitz) + ", fd " + g(worst.fd_violation));
  return c.outcome();
}

// 9. Hamiltonian identities on LogLinear(3), A = 0.3.
Outcome criterion_9(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  const Kernel k = build_kernel(KernelSpec::log_linear(3.0));
  const Hamiltonian H(k);
  const double A = 0.3;
  const double pm = A * k.fprime0();
  c.require(H.eval(0.0) == 1.0, "H(0) == 1");
  const KappaBounds kb = H.kappa_bounds(A);
  double even = 0.0;
  double sandwich = 0.0;
  double convex = INFINITY;
  double closed = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double p = -pm + 2.0 * pm * i / 49.0;
    const double h = H.eval(p);
    even = std::max(even, std::abs(h - H.eval(-p)));
    sandwich = std::max(sandwich, std::max(1.0 + kb.lower * p * p - h, h - 1.0 - kb.upper * p * p));
    closed = std::max(closed, std::abs(h - 4.0 / (4.0 - p * p)));
  }
  const double step = pm / 100.0;
  for (int i = -99; i <= 99; ++i) {
    const double p = i * step;
    convex = std::min(convex, H.eval(p + step) - 2.0 * H.eval(p) + H.eval(p - step));
  }
  c.require(even <= 1e-10, "|H(p) - H(-p)| = " + g(even) + " <= 1e-10");
  c.require(convex >= 0.0, "second differences >= 0 (min " + g(convex) + ")");
  c.require(sandwich <= 1e-12, "1 + kl p^2 <= H <= 1 + ku p^2 (excess " + g(sandwich) + ")");
  // Independent oracles for beta = 3: H = 4/(4 - p^2), kappa = 2/(2 +- A)^3.
  c.require(closed <= 1e-9, "H matches 4/(4 - p^2) (" + g(closed) + ")");
  c.require(std::abs(kb.lower - 2.0 / std::pow(2.0 + A, 3)) <= 1e-9, "lower kappa closed form");
  c.require(std::abs(kb.upper - 2.0 / std::pow(2.0 - A, 3)) <= 1e-9, "upper kappa closed form");
  c.note("kappa [" + fmt("%.6f", kb.lower) + ", " + fmt("%.6f", kb.upper) + "]");
  runtime_limit(c, t0, 10.0);
  return c.outcome();
}

// 10. HJ solver exactness controls and monotonicity.
Outcome criterion_10(const fs::path&) {
  Checks c;
  const Kernel k = build_kernel(KernelSpec::log_linear(3.0));
  const Hamiltonian H(k);
  const HamiltonianFunction table = tabulate(H, 0.9 * H.p_max());
  const Grid1D grid = Grid1D::make(8.0, 256);
  const std::vector<double> times{0.25, 0.5, 1.0, 2.0, 3.0};

  double const_err = 0.0;
  for (double cval : {0.0, 0.3, 1.0, 2.5}) {
    const HJSolution sol = solve_constrained_hj(table, Field::constant(grid, cval), times);
    for (const auto& s : sol.snapshots) {
      for (double v : s.u.values) const_err = std::max(const_err, std::abs(v - std::max(cval - s.t, 0.0)));
    }
  }
  c.require(const_err <= 1e-8, "constant data error " + g(const_err) + " <= 1e-8");

  const HJSolution zero = solve_constrained_hj(table, Field::zeros(grid), times);
  double zero_max = 0.0;
  for (const auto& s : zero.snapshots) {
    for (double v : s.u.values) zero_max = std::max(zero_max, std::abs(v));
  }
  c.require(zero_max == 0.0, "u0 = 0 stays 0 (max " + g(zero_max) + ")");

  // Random ordered pairs u0 <= v0 sharing one scheme (same sigma and dt).
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lip_cap = 0.6 * H.p_max();
  auto random_data = [&](const Field& below) {
    const double shift = 0.5 * unit(rng);
    const double freq = 0.2 + unit(rng);
    // Slopes: bump <= lip_cap / 4, ramp <= lip_cap / 16, so a sum of two
    // draws keeps Lip below lip_cap.
    const double amp = std::min(0.4 * unit(rng), 0.5 * lip_cap / freq);
    const double phase = 6.283185307179586 * unit(rng);
    const double ramp = 0.25 * lip_cap * unit(rng);
    Field u = Field::zeros(grid);
    for (std::size_t i = 0; i < grid.N; ++i) {
      const double x = grid.x(i);
      const double base = below.values.empty() ? 0.0 : below[i];
      u[i] = base + shift + amp * (1.0 + std::sin(freq * x + phase)) / 2.0 +
             ramp * std::min(std::abs(x), 4.0) / 4.0;
    }
    return u;
  };
  std::size_t pair_violations = 0;
  double worst_gap = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const Field u0 = random_data(Field{});
    const Field v0 = random_data(u0);
    const HJSolution a0 = solve_constrained_hj(table, u0, times);
    const HJSolution b0 = solve_constrained_hj(table, v0, times);
    HJOptions opts;
    opts.sigma = std::max(a0.sigma, b0.sigma);
    opts.dt = 0.9 * grid.dx() / opts.sigma;
    const HJSolution a = solve_constrained_hj(table, u0, times, opts);
    const HJSolution b = solve_constrained_hj(table, v0, times, opts);
    bool ok = a.snapshots.size() == b.snapshots.size();
    for (std::size_t s = 0; ok && s < a.snapshots.size(); ++s) {
      for (std::size_t i = 0; i < grid.N; ++i) {
        const double gap = a.snapshots[s].u[i] - b.snapshots[s].u[i];
        worst_gap = std::max(worst_gap, gap);
        if (gap > 0.0) ok = false;
      }
    }
    if (!ok) ++pair_violations;
  }
  c.require(pair_violations == 0, std::to_string(pair_violations) + " of 20 pairs lose their order");
  c.note("constant error " + g(const_err) + ", max (u - v) " + g(worst_gap) + " over 20 pairs at N=256");
  return c.outcome();
}

// 11 and 12 share the mutation runs and the HJ solve on LogLinear(3), A = 1/3.
Outcome criteria_11_12(const fs::path&, Outcome& out12) {
  const auto t0 = std::chrono::steady_clock::now();
  const Kernel k = build_kernel(KernelSpec::log_linear(3.0));
  const Hamiltonian H(k);
  const double A = 1.0 / 3.0;
  const Grid1D gh = Grid1D::make(16.0, 32768);
  const std::vector<double> times{0.5, 1.0, 1.5, 2.0};
  const HJSolution hj = solve_constrained_hj(H, power_initial_data(k, gh, A).u0, times);

  const Grid1D gm = Grid1D::make(512.0, std::size_t{1} << 18);
  const InitialDataMut data = power_initial_data(k, gm, A);
  std::vector<MutationRun> runs;
  for (double e : {0.4, 0.2, 0.1, 0.05}) {
    SolverConfig cfg;
    cfg.dt = 0.25 * e;
    cfg.t_end = 2.0;
    cfg.snapshot_times = times;
    runs.push_back(mutation_run(k, gm, e, cfg, data));
  }
  const double x_max = gh.L - 10.0 * gh.dx();

  Checks c11;
  for (const auto& r : runs) c11.require(!r.run.manifest.contaminated, "eps " + g(r.eps) + " run uncontaminated");
  const auto rows = cross_validate(runs, hj, x_max, 0.5);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    c11.require(rows[i].error <= rows[i - 1].error,
                "gap nonincreasing from eps " + g(rows[i - 1].eps) + " to " + g(rows[i].eps));
  }
  for (const auto& r : rows) c11.note("eps " + g(r.eps) + ": " + fmt("%.4f", r.error));
  c11.note("wall " + fmt("%.0f", seconds_since(t0)) + " s");

  Checks c12;
  const KappaBounds kb = H.kappa_bounds(A);
  const MutationRun& finest = runs.back();
  for (double t : {0.5, 1.0, 2.0}) {
    const HJSnapshot* ref = nullptr;
    for (const auto& s : hj.snapshots) {
      if (s.t == t) ref = &s;
    }
    const MutationSnapshot* mut = nullptr;
    for (const auto& s : finest.snapshots) {
      if (s.t == t) mut = &s;
    }
    if (!ref || !mut) {
      c12.require(false, "snapshots present at t = " + g(t));
      continue;
    }
    const ZeroSetBoundary z = zero_set_boundary(ref->u);
    const double lo = example_inclusion_radius(k, kb.lower, A, t, 101);
    const double hi = example_inclusion_radius(k, kb.upper, A, t, 101);
    for (double r : {z.right, -z.left}) {
      c12.require(std::isfinite(r) && r >= 0.95 * lo && r <= 1.05 * hi,
                  "zero-set boundary " + g(r) + " within [" + g(lo) + ", " + g(hi) + "] +-5% at t = " + g(t));
    }
    const auto cls = classify_limit_sets(ref->u, 1e-3);
    double min_null = INFINITY;
    double max_pos = -INFINITY;
    for (std::size_t i = 0; i < gh.N; ++i) {
      const double x = gh.x(i);
      if (std::abs(x) > x_max) continue;
      const double n = mut->n.interpolate(x);
      if (cls[i] == LimitRegion::Null) min_null = std::min(min_null, n);
      if (cls[i] == LimitRegion::Positive) max_pos = std::max(max_pos, n);
    }
    c12.require(min_null > 0.8, "n_eps > 0.8 on the eroded zero set at t = " + g(t) + " (min " + fmt("%.3f", min_null) + ")");
    c12.require(max_pos < 0.2, "n_eps < 0.2 on the positive set at t = " + g(t) + " (max " + fmt("%.3f", max_pos) + ")");
    c12.note("t=" + g(t) + " boundary " + fmt("%.4f", z.right) + " in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]");
  }
  out12 = c12.outcome();
  return c11.outcome();
}

std::map<std::string, std::string> read_outputs(const ExperimentResult& r) {
  std::map<std::string, std::string> files;
  for (const auto& f : r.files) {
    const fs::path p(f);
    if (p.filename() == "run.json") continue;
    std::ifstream in(p, std::ios::binary);
    files[p.filename().string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

// 13. Byte-identical CSV/SVG outputs across reruns.
Outcome criterion_13(const fs::path& out) {
  Checks c;
  const std::vector<std::string> configs{"kernel_validate", "simulate_small", "hamiltonian_loglinear",
                                         "hj_loglinear", "mutation_loglinear"};
  std::size_t compared = 0;
  for (const auto& name : configs) {
    const RunConfig cfg = parse_config(std::string(FATKPP_CONFIG_DIR) + "/" + name + ".json");
    const auto first = read_outputs(run_experiment(cfg, (out / name / "a").string()));
    const auto second = read_outputs(run_experiment(cfg, (out / name / "b").string()));
    c.require(!first.empty(), name + " wrote data files");
    c.require(first.size() == second.size(), name + " wrote the same file set twice");
    for (const auto& [file, bytes] : first) {
      const auto it = second.find(file);
      c.require(it != second.end() && it->second == bytes, name + "/" + file + " identical");
      ++compared;
    }
  }
  c.note(std::to_string(compared) + " files compared across " + std::to_string(configs.size()) + " configs");
  return c.outcome();
}

const std::map<int, std::string> kTitles{
    {1, "kernel validation"},          {2, "convolution oracle"},
    {3, "accelerating front"},         {4, "envelope sandwich"},
    {5, "theta1 gradient bound"},      {6, "Hopf-Cole convergence"},
    {7, "mutation kernel identities"}, {8, "a-priori bounds"},
    {9, "Hamiltonian suite"},          {10, "HJ exactness controls"},
    {11, "HJ cross-validation"},       {12, "zero-set inclusion"},
    {13, "determinism"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  std::string out_dir = "acceptance_out";
  app.add_option("--criterion", selected, "criteria to run (default: all)")->delimiter(',');
  app.add_option("--out", out_dir, "scratch directory for experiment outputs");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (const auto& [id, title] : kTitles) selected.push_back(id);
  }
  const std::set<int> want(selected.begin(), selected.end());
  for (int id : want) {
    if (!kTitles.count(id)) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
  }
  const fs::path out(out_dir);
  fs::create_directories(out);

  std::map<int, Outcome> results;
  auto guarded = [&](std::initializer_list<int> ids, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      for (int id : ids) results[id] = {false, std::string("error: ") + e.what()};
    }
  };
  using Single = Outcome (*)(const fs::path&);
  const std::map<int, Single> singles{{1, criterion_1}, {2, criterion_2}, {5, criterion_5},
                                      {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
                                      {9, criterion_9}, {10, criterion_10}, {13, criterion_13}};
  for (int id : want) {
    if (singles.count(id)) guarded({id}, [&] { results[id] = singles.at(id)(out / ("c" + std::to_string(id))); });
  }
  if (want.count(3) || want.count(4)) {
    guarded({3, 4}, [&] { results[3] = criteria_3_4(out, results[4]); });
  }
  if (want.count(11) || want.count(12)) {
    guarded({11, 12}, [&] { results[11] = criteria_11_12(out, results[12]); });
  }

  bool all = true;
  for (int id : want) {
    const Outcome& o = results.at(id);
    all = all && o.pass;
    std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, kTitles.at(id).c_str(),
                o.detail.c_str());
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
