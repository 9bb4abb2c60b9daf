#include "fatkpp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>

#include "json.hpp"

#include "fatkpp/cauchy_solver.hpp"
#include "fatkpp/csv.hpp"
#include "fatkpp/errors.hpp"
#include "fatkpp/hj_solver.hpp"
#include "fatkpp/mutation.hpp"
#include "fatkpp/propagation.hpp"
#include "fatkpp/svg_plot.hpp"

namespace fatkpp {
namespace {

using ordered = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::size_t kPlotPoints = 1200;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered manifest_json(const std::string& label, const RunManifest& m) {
  ordered j;
  j["label"] = label;
  j["truncation_tail_mass"] = m.truncation_tail_mass;
  j["kernel_radius"] = m.kernel_radius;
  j["steps"] = m.steps;
  j["clamp_total"] = m.clamp_total;
  j["max_step_clamp"] = m.max_step_clamp;
  j["clamp_flagged_steps"] = m.clamp_flagged_steps;
  j["contaminated"] = m.contaminated;
  j["aborted_at"] = m.aborted_at;
  j["wall_seconds"] = m.wall_seconds;
  return j;
}

// Collects output files, filters rows and writes run.json.
class Output {
 public:
  Output(const RunConfig& cfg, std::string dir, const ProgressFn& progress)
      : cfg_(cfg), dir_(std::move(dir)), progress_(progress) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      raise(ErrorKind::IoError, "cannot create output directory " + dir_);
    }
  }

  std::string path(const std::string& name) {
    files_.push_back(name);
    return (fs::path(dir_) / name).string();
  }

  bool keep(const Grid1D& grid, std::size_t i) const {
    const auto offset = static_cast<long long>(i) - static_cast<long long>(grid.center());
    if (offset % static_cast<long long>(cfg_.output.stride) != 0) return false;
    return cfg_.output.window <= 0.0 || std::abs(grid.x(i)) <= cfg_.output.window;
  }

  void say(const std::string& msg) const {
    if (progress_) progress_(msg);
  }

  void metric(const std::string& name, double value) { metrics_.emplace_back(name, value); }
  void manifest(const std::string& label, const RunManifest& m) {
    runs_.push_back(manifest_json(label, m));
  }
  void kernel(const Kernel& k) {
    kernel_ = ordered{{"Z", k.mass()}, {"mu", k.mu()}, {"fprime0", k.fprime0()}};
  }

  void plot(const std::string& name, const std::vector<PlotSeries>& series,
            const PlotOptions& options) {
    if (!cfg_.output.plot) return;
    emit_svg_plot(series, path(name), options);
  }

  ExperimentResult finish(double wall, const std::string& abort_message) {
    ordered j;
    j["created_at"] = utc_timestamp();
    j["experiment"] = std::string(to_string(cfg_.experiment));
    j["config"] = ordered::parse(config_to_json(cfg_));
    if (!kernel_.is_null()) j["kernel"] = kernel_;
    j["runs"] = runs_.is_null() ? ordered::array() : runs_;
    ordered m = ordered::object();  // non-finite values become null
    for (const auto& [k, v] : metrics_) m[k] = v;
    j["metrics"] = m;
    j["aborted"] = !abort_message.empty();
    if (!abort_message.empty()) j["abort_reason"] = abort_message;
    j["wall_seconds"] = wall;
    j["files"] = files_;

    const std::string file = path("run.json");
    std::ofstream out(file, std::ios::binary);
    if (!out) raise(ErrorKind::IoError, "cannot open " + file + " for writing");
    out << j.dump(2) << '\n';
    if (!out) raise(ErrorKind::IoError, "failed writing " + file);

    ExperimentResult r;
    r.directory = dir_;
    r.files = files_;
    r.metrics = metrics_;
    return r;
  }

 private:
  const RunConfig& cfg_;
  std::string dir_;
  const ProgressFn& progress_;
  std::vector<std::string> files_;
  std::vector<std::pair<std::string, double>> metrics_;
  ordered runs_;
  ordered kernel_;
};

// At most kPlotPoints evenly spaced nodes of the written window.
PlotSeries profile_series(const std::string& label, const Field& n, double window) {
  PlotSeries s;
  s.label = label;
  const Grid1D& g = n.grid;
  std::size_t lo = 0, hi = g.N;
  if (window > 0.0) {
    while (lo < g.N && g.x(lo) < -window) ++lo;
    while (hi > lo && g.x(hi - 1) > window) --hi;
  }
  const std::size_t count = hi - lo;
  const std::size_t step = std::max<std::size_t>(1, count / kPlotPoints);
  for (std::size_t i = lo; i < hi; i += step) {
    s.x.push_back(g.x(i));
    s.y.push_back(n.values[i]);
  }
  return s;
}

// Keeps at most eight evenly chosen profiles for a plot.
std::vector<PlotSeries> thin_profiles(const std::vector<PlotSeries>& all) {
  if (all.size() <= 8) return all;
  std::vector<PlotSeries> out;
  for (std::size_t k = 0; k < 8; ++k) out.push_back(all[k * (all.size() - 1) / 7]);
  return out;
}

SolverConfig solver_config(const SolverBlock& s, std::vector<double> times) {
  SolverConfig c;
  c.dt = s.dt;
  c.t_end = s.t_end;
  c.snapshot_times = std::move(times);
  c.boundary_guard = s.boundary_guard;
  c.method = s.method;
  return c;
}

void write_snapshot(Output& out, const Field& n, double t) {
  CsvWriter w(out.path("snapshot_t" + compact_number(t) + ".csv"), {"x", "n"});
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (out.keep(n.grid, i)) w.row({n.grid.x(i), n.values[i]});
  }
  w.close();
}

void write_monitors(Output& out, const SimulationRun& run) {
  CsvWriter w(out.path("monitors.csv"), {"t", "n_min", "n_max", "boundary_density", "clamp_total"});
  for (const auto& m : run.monitors) {
    w.row({m.t, m.n_min, m.n_max, m.boundary_density, m.clamp_total});
  }
  w.close();
}

std::string abort_reason(const SimulationRun& run) {
  if (!run.manifest.contaminated) return {};
  return "boundary density exceeded the guard at t = " + format_number(run.manifest.aborted_at);
}

// ---------------------------------------------------------------------------

void kernel_validate(const RunConfig& cfg, Output& out) {
  const Kernel k = build_kernel(*cfg.kernel);
  out.kernel(k);
  const HypothesisReport rep = validate_hypotheses(k);
  CsvWriter w(out.path("hypotheses.csv"), {"check", "passed", "value", "detail"});
  for (const auto& c : rep.checks) {
    w.row_cells({c.name, c.passed ? 1.0 : 0.0, c.value, c.detail});
  }
  w.close();
  out.metric("all_passed", rep.all_passed() ? 1.0 : 0.0);
  out.metric("mass_error", rep.mass_error);
  out.metric("limsup_ratio", rep.limsup_ratio);
  out.metric("mutation_eligible", rep.mutation_eligible ? 1.0 : 0.0);

  PlotSeries shape{"J", {}, {}}, dens{"J/Z", {}, {}};
  for (int i = 0; i <= 120; ++i) {
    const double x = std::pow(10.0, -2.0 + 6.0 * i / 120.0);
    shape.x.push_back(x);
    shape.y.push_back(k.J(x));
    dens.x.push_back(x);
    dens.y.push_back(k.density(x));
  }
  out.plot("kernel.svg", {shape, dens},
           {.title = std::string(to_string(k.spec().family)) + " kernel",
            .x_label = "x",
            .y_label = "J",
            .log_x = true,
            .log_y = true});
}

std::string simulate(const RunConfig& cfg, Output& out, bool front) {
  const Kernel k = build_kernel(*cfg.kernel);
  out.kernel(k);
  const SolverBlock& sb = *cfg.solver;
  const Grid1D grid = Grid1D::make(cfg.grid->L, cfg.grid->N);
  out.say("discretizing the kernel");
  const DiscreteKernel dk = DiscreteKernel::from_kernel(k, grid);
  const Field n0 = initial_condition(k, grid, sb.C);

  const std::vector<double> user_times = sb.times();
  std::vector<double> times = user_times;
  const bool envelope = front && cfg.analysis.envelope;
  if (envelope) times.insert(times.begin(), 0.0);

  std::vector<FrontTrack> tracks;
  for (double level : cfg.analysis.levels) {
    FrontTrack t;
    t.level = level;
    t.delta = cfg.analysis.delta;
    t.rho = cfg.analysis.rho;
    tracks.push_back(t);
  }
  std::optional<EnvelopeMonitor> monitor;
  if (envelope) {
    monitor.emplace(k, dk, std::min(sb.C, 1.0), std::max(sb.C, 1.0), dk.radius());
  }

  std::vector<PlotSeries> profiles;
  RunOptions opts;
  opts.keep_snapshots = false;
  opts.on_snapshot = [&](double t, const Field& n) {
    if (monitor) monitor->observe(t, n);
    if (t > 0.0 || !envelope) {
      write_snapshot(out, n, t);
      for (auto& tr : tracks) tr.append(k, t, n);
      profiles.push_back(profile_series("t = " + compact_number(t), n, cfg.output.window));
    }
    out.say("t = " + compact_number(t));
  };
  const SimulationRun run = run_with_kernel(dk, solver_config(sb, times), n0, opts);
  out.manifest("cauchy", run.manifest);
  write_monitors(out, run);
  out.metric("truncation_tail_mass", dk.tail_mass());
  if (!profiles.empty()) {
    out.plot("profiles.svg", thin_profiles(profiles),
             {.title = "density profiles", .x_label = "x", .y_label = "n"});
  }
  if (!front) return abort_reason(run);

  CsvWriter w(out.path("front.csv"), {"t", "level", "x_level", "f_inv_t", "ratio_f_over_t",
                                      "garnier_lo", "garnier_hi"});
  for (const auto& tr : tracks) {
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const double t = tr.times[i];
      const double x = tr.positions[i];
      w.row({t, tr.level, x, tr.predicted[i], std::isfinite(x) ? k.f(x) / t : x, tr.lower[i],
             tr.upper[i]});
    }
  }
  w.close();
  for (const auto& tr : tracks) {
    if (tr.times.empty()) continue;
    const std::string tag = "level" + compact_number(tr.level);
    const double x = tr.positions.back();
    out.metric(tag + "_final_ratio", std::isfinite(x) ? k.f(x) / tr.times.back() : x);
    double worst = 0.0;  // largest shortfall below the Garnier lower bound for t >= 10
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      if (tr.times[i] >= 10.0 && std::isfinite(tr.positions[i])) {
        worst = std::max(worst, tr.lower[i] - tr.positions[i]);
      }
    }
    out.metric(tag + "_garnier_shortfall", worst);
  }
  if (!tracks.empty() && !tracks.front().times.empty()) {
    const auto& tr = tracks.front();
    out.plot("front.svg",
             {{"x_level (level " + compact_number(tr.level) + ")", tr.times, tr.positions},
              {"inv_J(e^-t)", tr.times, tr.predicted},
              {"inv_J(e^-(1-delta)t)", tr.times, tr.lower}},
             {.title = "level-set position", .x_label = "t", .y_label = "x", .log_y = true});
  }

  if (monitor) {
    CsvWriter e(out.path("envelope.csv"),
                {"t", "theta_hat", "sandwich_lo_violation", "sandwich_hi_violation"});
    PlotSeries th{"theta_hat", {}, {}};
    for (const auto& s : monitor->samples()) {
      e.row({s.t, s.theta_hat, s.lo_violation, s.hi_violation});
      th.x.push_back(s.t);
      th.y.push_back(s.theta_hat);
    }
    e.close();
    out.metric("sandwich_lo_violation", monitor->worst_lo_violation());
    out.metric("sandwich_hi_violation", monitor->worst_hi_violation());
    out.metric("theta_hat_final", monitor->samples().back().theta_hat);
    out.metric("theta_integral_final", monitor->samples().back().theta_integral);
    out.plot("envelope.svg", {th},
             {.title = "envelope residual", .x_label = "t", .y_label = "theta_hat", .log_y = true});
  }
  return abort_reason(run);
}

std::string hopf_cole(const RunConfig& cfg, Output& out) {
  const Kernel k = build_kernel(*cfg.kernel);
  out.kernel(k);
  const SolverBlock& sb = *cfg.solver;
  const Grid1D grid = Grid1D::make(cfg.grid->L, cfg.grid->N);
  const DiscreteKernel dk = DiscreteKernel::from_kernel(k, grid);
  const std::vector<double> xs = cfg.analysis.compact.xs();
  const std::vector<double> ts = cfg.analysis.compact.ts();
  const auto& eps_list = cfg.analysis.eps;

  // Snapshot time s = t / eps for every pair; pairs sharing s share a snapshot.
  struct Pair {
    std::size_t e;
    double t;
  };
  std::vector<std::pair<double, std::vector<Pair>>> plan;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    for (double t : ts) {
      const double s = t / eps_list[e];
      auto it = std::find_if(plan.begin(), plan.end(), [&](const auto& p) {
        return std::abs(p.first - s) <= 1e-12 * std::max(1.0, s);
      });
      if (it == plan.end()) {
        plan.push_back({s, {}});
        it = plan.end() - 1;
      }
      it->second.push_back({e, t});
    }
  }
  std::sort(plan.begin(), plan.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> times;
  for (const auto& p : plan) times.push_back(p.first);

  const double usable = grid.L - dk.radius();
  std::vector<std::vector<HopfColeSample>> samples(eps_list.size());
  std::size_t next = 0;
  RunOptions opts;
  opts.keep_snapshots = false;
  opts.on_snapshot = [&](double s, const Field& n) {
    for (const Pair& p : plan[next].second) {
      auto slice = hopf_cole_slice(k, n, eps_list[p.e], p.t, xs, usable);
      samples[p.e].insert(samples[p.e].end(), slice.begin(), slice.end());
    }
    ++next;
    out.say("t = " + compact_number(s));
  };
  const SimulationRun run =
      run_with_kernel(dk, solver_config(sb, times), initial_condition(k, grid, sb.C), opts);
  out.manifest("cauchy", run.manifest);
  write_monitors(out, run);

  std::vector<PlotSeries> series;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    auto rows = samples[e];
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    CsvWriter w(out.path("hopfcole_eps" + compact_number(eps_list[e]) + ".csv"),
                {"t", "x", "u_eps", "u_limit", "abs_err"});
    PlotSeries s{"eps = " + compact_number(eps_list[e]), {}, {}};
    for (const auto& r : rows) {
      w.row({r.t, r.x, r.u_eps, r.u_limit, r.abs_err});
      if (r.t == ts.back()) {
        s.x.push_back(r.x);
        s.y.push_back(r.u_eps);
      }
    }
    w.close();
    series.push_back(s);
    const bool complete = rows.size() == xs.size() * ts.size();
    out.metric("E_eps" + compact_number(eps_list[e]),
               complete ? hopf_cole_error(rows) : std::numeric_limits<double>::quiet_NaN());
  }
  PlotSeries limit{"max(f - t, 0)", xs, {}};
  for (double x : xs) limit.y.push_back(std::max(k.f(x) - ts.back(), 0.0));
  series.push_back(limit);
  out.plot("hopfcole.svg", series,
           {.title = "u_eps at t = " + compact_number(ts.back()), .x_label = "x", .y_label = "u"});
  return abort_reason(run);
}

void write_mutation(Output& out, const MutationRun& mr) {
  CsvWriter w(out.path("mutation_eps" + compact_number(mr.eps) + ".csv"),
              {"t", "x", "n_eps", "u_eps", "floored_flag"});
  for (const auto& s : mr.snapshots) {
    for (std::size_t i = 0; i < s.n.size(); ++i) {
      if (!out.keep(s.n.grid, i)) continue;
      w.row({s.t, s.n.grid.x(i), s.n.values[i], s.u.values[i], s.floored[i] ? 1.0 : 0.0});
    }
  }
  w.close();
}

void write_limits(Output& out, const std::vector<std::pair<double, const Field*>>& us, double tol) {
  CsvWriter w(out.path("limits.csv"), {"t", "x", "region"});
  for (const auto& [t, u] : us) {
    const auto cls = classify_limit_sets(*u, tol);
    for (std::size_t i = 0; i < u->size(); ++i) {
      if (!out.keep(u->grid, i)) continue;
      w.row_cells({t, u->grid.x(i), std::string(1, region_code(cls[i]))});
    }
  }
  w.close();
}

std::vector<MutationRun> mutation_runs(const RunConfig& cfg, const Kernel& k, Output& out,
                                       std::string& abort) {
  const Grid1D grid = Grid1D::make(cfg.grid->L, cfg.grid->N);
  const double A = *cfg.analysis.A;
  const InitialDataMut data = power_initial_data(k, grid, A);
  const double r_hat = apriori_rate(k, A);
  std::vector<MutationRun> runs;
  for (double eps : cfg.analysis.eps) {
    out.say("mutation run eps = " + compact_number(eps));
    MutationRun mr = mutation_run(k, grid, eps, solver_config(*cfg.solver, cfg.solver->times()), data);
    const std::string tag = "eps" + compact_number(eps);
    out.manifest("mutation_" + tag, mr.run.manifest);
    write_mutation(out, mr);
    AprioriReport worst;
    for (const auto& s : mr.snapshots) {
      const auto r = check_apriori(k, s, data.u0, A, r_hat,
                                   mr.run.manifest.kernel_radius + 10.0 * grid.dx(), 10000);
      worst.upper_excess = std::max(worst.upper_excess, r.upper_excess);
      worst.lower_excess = std::max(worst.lower_excess, r.lower_excess);
      worst.fd_violation = std::max(worst.fd_violation, r.fd_violation);
      worst.lipschitz = std::max(worst.lipschitz, r.lipschitz);
    }
    out.metric(tag + "_upper_excess", worst.upper_excess);
    out.metric(tag + "_lower_excess", worst.lower_excess);
    out.metric(tag + "_fd_violation", worst.fd_violation);
    out.metric(tag + "_lipschitz", worst.lipschitz);
    if (abort.empty()) abort = abort_reason(mr.run);
    runs.push_back(std::move(mr));
  }
  out.metric("r_hat", r_hat);
  out.metric("A", A);
  return runs;
}

const MutationRun& smallest_eps(const std::vector<MutationRun>& runs) {
  return *std::min_element(runs.begin(), runs.end(),
                           [](const auto& a, const auto& b) { return a.eps < b.eps; });
}

std::string mutation(const RunConfig& cfg, Output& out) {
  const Kernel k = build_kernel(*cfg.kernel);
  out.kernel(k);
  std::string abort;
  const auto runs = mutation_runs(cfg, k, out, abort);
  const MutationRun& fine = smallest_eps(runs);
  std::vector<std::pair<double, const Field*>> us;
  for (const auto& s : fine.snapshots) us.push_back({s.t, &s.u});
  write_limits(out, us, cfg.analysis.limit_tol);
  std::vector<PlotSeries> series;
  for (const auto& mr : runs) {
    if (mr.snapshots.empty()) continue;
    series.push_back(profile_series("eps = " + compact_number(mr.eps), mr.snapshots.back().u,
                                    cfg.output.window));
  }
  if (!series.empty()) {
    out.plot("mutation.svg", series,
             {.title = "u_eps at the last snapshot", .x_label = "x", .y_label = "u"});
  }
  return abort;
}

void write_hj(const RunConfig& cfg, Output& out, const Kernel& k, const HJSolution& sol,
              double A) {
  const Hamiltonian H(k);
  const KappaBounds kb = H.kappa_bounds(A);
  CsvWriter w(out.path("hj_solution.csv"), {"t", "x", "u"});
  std::vector<PlotSeries> profiles;
  for (const auto& s : sol.snapshots) {
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      if (out.keep(s.u.grid, i)) w.row({s.t, s.u.grid.x(i), s.u.values[i]});
    }
    profiles.push_back(profile_series("t = " + compact_number(s.t), s.u, cfg.output.window));
  }
  w.close();
  CsvWriter z(out.path("zeroset.csv"),
              {"t", "x_boundary_left", "x_boundary_right", "example_lo", "example_hi"});
  PlotSeries right{"zero-set boundary", {}, {}, true}, lo{"example lower", {}, {}, true},
      hi{"example upper", {}, {}, true};
  for (const auto& s : sol.snapshots) {
    const ZeroSetBoundary b = zero_set_boundary(s.u);
    const double l = example_inclusion_radius(k, kb.lower, A, s.t);
    const double h = example_inclusion_radius(k, kb.upper, A, s.t);
    z.row({s.t, b.left, b.right, l, h});
    right.x.push_back(s.t);
    right.y.push_back(b.right);
    lo.x.push_back(s.t);
    lo.y.push_back(l);
    hi.x.push_back(s.t);
    hi.y.push_back(h);
  }
  z.close();
  out.metric("hj_sigma", sol.sigma);
  out.metric("hj_dt", sol.dt);
  out.metric("hj_steps", static_cast<double>(sol.steps));
  out.metric("hj_initial_lipschitz", sol.initial_lipschitz);
  out.metric("hj_max_lipschitz", sol.max_lipschitz);
  out.metric("kappa_lower", kb.lower);
  out.metric("kappa_upper", kb.upper);
  out.plot("hj_solution.svg", thin_profiles(profiles),
           {.title = "HJ solution", .x_label = "x", .y_label = "u"});
  out.plot("zeroset.svg", {right, lo, hi},
           {.title = "zero-set boundary", .x_label = "t", .y_label = "x"});
}

HJSolution solve_hj(const Kernel& k, const Grid1D& grid, double A, const std::vector<double>& ts) {
  const Hamiltonian H(k);
  return solve_constrained_hj(H, power_initial_data(k, grid, A).u0, ts);
}

void hj(const RunConfig& cfg, Output& out) {
  const Kernel k = build_kernel(*cfg.kernel);
  out.kernel(k);
  const Grid1D grid = Grid1D::make(cfg.grid->L, cfg.grid->N);
  const double A = *cfg.analysis.A;
  out.say("solving the HJ obstacle problem");
  const auto t0 = std::chrono::steady_clock::now();
  const HJSolution sol = solve_hj(k, grid, A, cfg.solver->times());
  out.metric("A", A);
  write_hj(cfg, out, k, sol, A);
  RunManifest m;
  m.kernel = k.spec();
  m.steps = sol.steps;
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.manifest("hj", m);
}

void hamiltonian(const RunConfig& cfg, Output& out) {
  const Kernel k = build_kernel(*cfg.kernel);
  out.kernel(k);
  const Hamiltonian H(k);
  const double A = *cfg.analysis.A;
  const KappaBounds kb = H.kappa_bounds(A);
  const double pm = A * k.fprime0();
  const std::size_t n = cfg.analysis.p_samples;
  CsvWriter w(out.path("hamiltonian.csv"), {"p", "H", "H_lower_env", "H_upper_env"});
  PlotSeries sh{"H", {}, {}}, sl{"1 + kappa_lo p^2", {}, {}}, su{"1 + kappa_hi p^2", {}, {}};
  double below = 0.0, above = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = -pm + 2.0 * pm * static_cast<double>(i) / static_cast<double>(n - 1);
    const double h = H.eval(p);
    const double lo = 1.0 + kb.lower * p * p;
    const double hi = 1.0 + kb.upper * p * p;
    w.row({p, h, lo, hi});
    below = std::max(below, lo - h);
    above = std::max(above, h - hi);
    sh.x.push_back(p);
    sh.y.push_back(h);
    sl.x.push_back(p);
    sl.y.push_back(lo);
    su.x.push_back(p);
    su.y.push_back(hi);
  }
  w.close();
  out.metric("A", A);
  out.metric("p_max", H.p_max());
  out.metric("kappa_lower", kb.lower);
  out.metric("kappa_upper", kb.upper);
  out.metric("lower_envelope_excess", below);
  out.metric("upper_envelope_excess", above);
  out.plot("hamiltonian.svg", {sh, sl, su},
           {.title = "Hamiltonian and its quadratic envelopes", .x_label = "p", .y_label = "H"});
}

std::string cross_validate_experiment(const RunConfig& cfg, Output& out) {
  const Kernel k = build_kernel(*cfg.kernel);
  out.kernel(k);
  const double A = *cfg.analysis.A;
  const Grid1D hj_grid = Grid1D::make(cfg.analysis.hj_grid->L, cfg.analysis.hj_grid->N);
  out.say("solving the HJ obstacle problem");
  const HJSolution sol = solve_hj(k, hj_grid, A, cfg.solver->times());
  write_hj(cfg, out, k, sol, A);
  std::vector<std::pair<double, const Field*>> us;
  for (const auto& s : sol.snapshots) us.push_back({s.t, &s.u});
  write_limits(out, us, cfg.analysis.limit_tol);

  std::string abort;
  const auto runs = mutation_runs(cfg, k, out, abort);
  const double x_max = cfg.analysis.compact.x_max;
  const auto rows = cross_validate(runs, sol, x_max, cfg.analysis.front_band);
  CsvWriter w(out.path("crossval.csv"), {"eps", "error", "error_inner"});
  PlotSeries err{"sup |u_eps - u|", {}, {}, true}, inner{"away from the front", {}, {}, true};
  for (const auto& r : rows) {
    w.row({r.eps, r.error, r.error_inner});
    out.metric("error_eps" + compact_number(r.eps), r.error);
    out.metric("error_inner_eps" + compact_number(r.eps), r.error_inner);
    err.x.push_back(r.eps);
    err.y.push_back(r.error);
    inner.x.push_back(r.eps);
    inner.y.push_back(r.error_inner);
  }
  w.close();
  out.plot("crossval.svg", {err, inner},
           {.title = "HJ cross-validation", .x_label = "eps", .y_label = "error",
            .log_x = true, .log_y = true});

  // n_eps of the smallest eps on the limit sets of the HJ solution.
  const MutationRun& fine = smallest_eps(runs);
  double min_null = 1.0, max_pos = 0.0;
  for (const auto& s : fine.snapshots) {
    const HJSnapshot* ref = nullptr;
    for (const auto& h : sol.snapshots) {
      if (std::abs(h.t - s.t) <= 1e-12 * std::max(1.0, s.t)) ref = &h;
    }
    if (!ref) continue;
    const auto cls = classify_limit_sets(ref->u, cfg.analysis.limit_tol);
    for (std::size_t i = 0; i < hj_grid.N; ++i) {
      const double x = hj_grid.x(i);
      if (std::abs(x) > x_max) continue;
      const double n = s.n.interpolate(x);
      if (cls[i] == LimitRegion::Null) min_null = std::min(min_null, n);
      if (cls[i] == LimitRegion::Positive) max_pos = std::max(max_pos, n);
    }
  }
  out.metric("min_n_on_null_set", min_null);
  out.metric("max_n_on_positive_set", max_pos);
  return abort;
}

}  // namespace

std::string compact_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

ExperimentResult run_experiment(const RunConfig& cfg, const std::string& directory,
                                const ProgressFn& progress) {
  const auto problems = validate(cfg);
  if (!problems.empty()) {
    std::string msg = std::to_string(problems.size()) + " violated constraint(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    raise(ErrorKind::ValidationError, msg);
  }
  const auto start = std::chrono::steady_clock::now();
  Output out(cfg, directory, progress);
  std::string abort;
  std::optional<Error> failure;
  try {
    switch (cfg.experiment) {
      case Experiment::KernelValidate: kernel_validate(cfg, out); break;
      case Experiment::Simulate: abort = simulate(cfg, out, false); break;
      case Experiment::Front: abort = simulate(cfg, out, true); break;
      case Experiment::HopfCole: abort = hopf_cole(cfg, out); break;
      case Experiment::Mutation: abort = mutation(cfg, out); break;
      case Experiment::HJ: hj(cfg, out); break;
      case Experiment::Hamiltonian: hamiltonian(cfg, out); break;
      case Experiment::CrossValidate: abort = cross_validate_experiment(cfg, out); break;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::IoError) throw;
    failure = e;
    abort = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ExperimentResult result = out.finish(wall, abort);
  if (failure) throw *failure;
  if (!abort.empty()) raise(ErrorKind::BoundaryContamination, abort);
  return result;
}

}  // namespace fatkpp
