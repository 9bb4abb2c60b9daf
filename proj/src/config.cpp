#include "fatkpp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fatkpp/errors.hpp"
#include "fatkpp/mutation.hpp"

namespace fatkpp {
namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

constexpr Experiment kExperiments[] = {
    Experiment::KernelValidate, Experiment::Simulate, Experiment::Front,
    Experiment::HopfCole,       Experiment::Mutation, Experiment::HJ,
    Experiment::Hamiltonian,    Experiment::CrossValidate,
};

// Typed access to one JSON object. Wrong types raise ParseError naming the
// key; keys never read are reported as unknown afterwards.
class Block {
 public:
  Block(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  template <class T>
  std::optional<T> get(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) return std::nullopt;
    const json& v = node_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(key, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(key, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::size_t>) {
      if (!v.is_number_unsigned()) fail(key, "expected a nonnegative integer");
      return v.get<std::size_t>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail(key, "expected a number");
      return v.get<double>();
    } else {
      static_assert(std::is_same_v<T, std::vector<double>>);
      if (!v.is_array()) fail(key, "expected an array of numbers");
      std::vector<double> out;
      for (const auto& e : v) {
        if (!e.is_number()) fail(key, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    }
  }

  Block child(const std::string& key) {
    seen_.insert(key);
    return Block(node_.at(key), qualified(key));
  }

  void unknown_keys(std::vector<std::string>& problems) const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) problems.push_back("unknown key '" + qualified(key) + "'");
    }
  }

 private:
  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : qualified(key);
    raise(ErrorKind::ParseError, "key '" + where + "': " + what);
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

GridBlock read_grid(Block b, std::vector<std::string>& problems) {
  GridBlock g;
  g.L = b.get<double>("L").value_or(0.0);
  g.N = b.get<std::size_t>("N").value_or(0);
  b.unknown_keys(problems);
  return g;
}

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_grid(const GridBlock& g, const std::string& name, std::vector<std::string>& problems) {
  if (!(g.L > 0.0 && std::isfinite(g.L))) problems.push_back(name + ".L must be positive");
  if (!power_of_two(g.N) || g.N < 16) {
    problems.push_back(name + ".N must be a power of two >= 16");
  }
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

bool needs_mutation(Experiment e) {
  return e == Experiment::Mutation || e == Experiment::HJ || e == Experiment::Hamiltonian ||
         e == Experiment::CrossValidate;
}

bool needs_run(Experiment e) {
  return e != Experiment::KernelValidate && e != Experiment::Hamiltonian;
}

}  // namespace

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::KernelValidate: return "KernelValidate";
    case Experiment::Simulate: return "Simulate";
    case Experiment::Front: return "Front";
    case Experiment::HopfCole: return "HopfCole";
    case Experiment::Mutation: return "Mutation";
    case Experiment::HJ: return "HJ";
    case Experiment::Hamiltonian: return "Hamiltonian";
    case Experiment::CrossValidate: return "CrossValidate";
  }
  return "Unknown";
}

std::optional<Experiment> experiment_from_string(std::string_view name) {
  for (Experiment e : kExperiments) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

std::vector<double> SolverBlock::times() const {
  std::vector<double> out = snapshot_times;
  if (out.empty() && snapshot_count > 0) {
    for (std::size_t k = 1; k <= snapshot_count; ++k) {
      out.push_back(t_end * static_cast<double>(k) / static_cast<double>(snapshot_count));
    }
  }
  out.push_back(t_end);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> CompactBlock::xs() const { return linspace(x_min, x_max, nx); }
std::vector<double> CompactBlock::ts() const { return linspace(t_min, t_max, nt); }

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "line " << line_of(text, e.byte) << ": " << e.what();
    raise(ErrorKind::ParseError, msg.str());
  }

  RunConfig cfg;
  std::vector<std::string> problems;
  Block top(root, "");

  bool checkable = true;
  const auto experiment = top.get<std::string>("experiment");
  if (!experiment) {
    problems.push_back("experiment is required");
    checkable = false;
  } else if (auto e = experiment_from_string(*experiment)) {
    cfg.experiment = *e;
  } else {
    problems.push_back("unknown experiment '" + *experiment + "'");
    checkable = false;
  }

  if (top.has("kernel")) {
    Block k = top.child("kernel");
    KernelSpec spec;
    const auto family = k.get<std::string>("family");
    if (!family) {
      problems.push_back("kernel.family is required");
      checkable = false;
    } else if (auto f = family_from_string(*family)) {
      spec.family = *f;
    } else {
      problems.push_back("unknown kernel.family '" + *family + "'");
      checkable = false;
    }
    spec.alpha = k.get<double>("alpha").value_or(0.0);
    spec.beta = k.get<double>("beta").value_or(0.0);
    spec.b = k.get<double>("b").value_or(0.0);
    spec.sigma = k.get<double>("sigma").value_or(0.0);
    k.unknown_keys(problems);
    if (family && family_from_string(*family)) cfg.kernel = spec;
  }

  if (top.has("grid")) cfg.grid = read_grid(top.child("grid"), problems);

  if (top.has("solver")) {
    Block s = top.child("solver");
    SolverBlock sb;
    sb.dt = s.get<double>("dt").value_or(sb.dt);
    sb.t_end = s.get<double>("t_end").value_or(0.0);
    sb.snapshot_count = s.get<std::size_t>("snapshot_count").value_or(0);
    sb.snapshot_times = s.get<std::vector<double>>("snapshot_times").value_or(std::vector<double>{});
    if (auto m = s.get<std::string>("method")) {
      if (auto method = method_from_string(*m)) {
        sb.method = *method;
      } else {
        problems.push_back("unknown solver.method '" + *m + "'");
      }
    }
    sb.boundary_guard = s.get<double>("boundary_guard").value_or(sb.boundary_guard);
    sb.C = s.get<double>("C").value_or(sb.C);
    s.unknown_keys(problems);
    cfg.solver = sb;
  }

  if (top.has("analysis")) {
    Block a = top.child("analysis");
    AnalysisBlock& ab = cfg.analysis;
    ab.levels = a.get<std::vector<double>>("levels").value_or(ab.levels);
    ab.eps = a.get<std::vector<double>>("eps").value_or(ab.eps);
    ab.A = a.get<double>("A");
    ab.theta1_alpha = a.get<double>("theta1_alpha").value_or(ab.theta1_alpha);
    ab.delta = a.get<double>("delta").value_or(ab.delta);
    ab.rho = a.get<double>("rho").value_or(ab.rho);
    ab.envelope = a.get<bool>("envelope").value_or(ab.envelope);
    ab.limit_tol = a.get<double>("limit_tol").value_or(ab.limit_tol);
    ab.front_band = a.get<double>("front_band").value_or(ab.front_band);
    ab.p_samples = a.get<std::size_t>("p_samples").value_or(ab.p_samples);
    if (a.has("compact")) {
      Block c = a.child("compact");
      CompactBlock& cb = ab.compact;
      cb.x_min = c.get<double>("x_min").value_or(cb.x_min);
      cb.x_max = c.get<double>("x_max").value_or(cb.x_max);
      cb.t_min = c.get<double>("t_min").value_or(cb.t_min);
      cb.t_max = c.get<double>("t_max").value_or(cb.t_max);
      cb.nx = c.get<std::size_t>("nx").value_or(cb.nx);
      cb.nt = c.get<std::size_t>("nt").value_or(cb.nt);
      c.unknown_keys(problems);
    }
    if (a.has("hj_grid")) ab.hj_grid = read_grid(a.child("hj_grid"), problems);
    a.unknown_keys(problems);
  }

  if (top.has("output")) {
    Block o = top.child("output");
    OutputBlock& ob = cfg.output;
    ob.directory = o.get<std::string>("directory").value_or(ob.directory);
    ob.plot = o.get<bool>("plot").value_or(ob.plot);
    ob.window = o.get<double>("window").value_or(ob.window);
    ob.stride = o.get<std::size_t>("stride").value_or(ob.stride);
    o.unknown_keys(problems);
  }
  top.unknown_keys(problems);

  // Unknown keys and misspelled enum values do not stop the semantic checks,
  // so that one pass reports everything. A missing or unknown experiment or
  // kernel family would only add misleading follow-up lines.
  if (checkable) {
    // The default A needs mu, hence a valid kernel.
    if (!cfg.analysis.A && cfg.kernel && check_params(*cfg.kernel).empty()) {
      cfg.analysis.A = default_A(build_kernel(*cfg.kernel));
    }
    const auto more = validate(cfg);
    problems.insert(problems.end(), more.begin(), more.end());
  }
  if (!problems.empty()) {
    std::string msg = std::to_string(problems.size()) + " violated constraint(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    raise(ErrorKind::ValidationError, msg);
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> problems;
  const Experiment e = cfg.experiment;
  const AnalysisBlock& a = cfg.analysis;

  std::optional<Kernel> kernel;
  if (!cfg.kernel) {
    problems.push_back("kernel block is required");
  } else {
    for (const auto& p : check_params(*cfg.kernel)) problems.push_back("kernel: " + p);
    if (problems.empty()) kernel = build_kernel(*cfg.kernel);
  }

  if (needs_run(e)) {
    if (!cfg.grid) {
      problems.push_back("grid block is required for " + std::string(to_string(e)));
    } else {
      check_grid(*cfg.grid, "grid", problems);
    }
    if (!cfg.solver) {
      problems.push_back("solver block is required for " + std::string(to_string(e)));
    } else {
      const SolverBlock& s = *cfg.solver;
      if (!(s.t_end > 0.0 && std::isfinite(s.t_end))) {
        problems.push_back("solver.t_end must be positive");
      }
      if (!(s.dt > 0.0)) problems.push_back("solver.dt must be positive");
      for (double t : s.snapshot_times) {
        if (!(t > 0.0 && t <= s.t_end)) {
          problems.push_back("solver.snapshot_times must lie in (0, t_end]");
          break;
        }
      }
      if (!(s.boundary_guard > 0.0)) problems.push_back("solver.boundary_guard must be positive");
      if (!(s.C > 0.0)) problems.push_back("solver.C must be positive");
      // n0 takes values near 0 and near 1, so max_stable_dt(n0) = 0.3.
      const double eps_min = e == Experiment::Mutation || e == Experiment::CrossValidate
                                 ? (a.eps.empty() ? 1.0 : *std::min_element(a.eps.begin(), a.eps.end()))
                                 : 1.0;
      if (s.dt > 0.3 * eps_min) {
        std::ostringstream msg;
        msg << "solver.dt = " << s.dt << " exceeds the stability bound " << 0.3 * eps_min;
        problems.push_back(msg.str());
      }
    }
  }

  for (double l : a.levels) {
    if (!(l > 0.0 && l < 1.0)) {
      problems.push_back("analysis.levels must lie in (0,1)");
      break;
    }
  }
  for (double v : a.eps) {
    if (!(v > 0.0 && v <= 1.0)) {
      problems.push_back("analysis.eps must lie in (0,1]");
      break;
    }
  }
  if (!(a.theta1_alpha > 0.0 && a.theta1_alpha < 1.0)) {
    problems.push_back("analysis.theta1_alpha must lie in (0,1)");
  }
  if (!(a.delta > 0.0 && a.delta < 1.0)) problems.push_back("analysis.delta must lie in (0,1)");
  if (!(a.rho > 1.0)) problems.push_back("analysis.rho must exceed 1");
  if (!(a.limit_tol >= 0.0)) problems.push_back("analysis.limit_tol must be nonnegative");
  if (!(a.front_band >= 0.0)) problems.push_back("analysis.front_band must be nonnegative");
  if (a.p_samples < 2) problems.push_back("analysis.p_samples must be at least 2");
  const CompactBlock& c = a.compact;
  if (!(c.x_min <= c.x_max) || !(c.t_min <= c.t_max) || c.nx == 0 || c.nt == 0) {
    problems.push_back("analysis.compact must be a nonempty rectangle");
  }
  if (cfg.output.stride == 0) problems.push_back("output.stride must be at least 1");
  if (!(cfg.output.window >= 0.0)) problems.push_back("output.window must be nonnegative");
  if (cfg.output.directory.empty()) problems.push_back("output.directory must not be empty");

  if ((e == Experiment::HopfCole || e == Experiment::Mutation || e == Experiment::CrossValidate) &&
      a.eps.empty()) {
    problems.push_back("analysis.eps must list at least one value for " + std::string(to_string(e)));
  }
  if (e == Experiment::HopfCole && !a.eps.empty() && cfg.solver) {
    const double eps_min = *std::min_element(a.eps.begin(), a.eps.end());
    if (c.t_max / eps_min > cfg.solver->t_end * (1.0 + 1e-12)) {
      problems.push_back("solver.t_end must reach compact.t_max / min(eps)");
    }
    if (!(c.t_min > 0.0)) problems.push_back("analysis.compact.t_min must be positive");
  }
  if (e == Experiment::CrossValidate) {
    if (!a.hj_grid) {
      problems.push_back("analysis.hj_grid is required for CrossValidate");
    } else {
      check_grid(*a.hj_grid, "analysis.hj_grid", problems);
    }
  }
  if (e == Experiment::Front && kernel && kernel->thin_tailed() && a.envelope) {
    problems.push_back("analysis.envelope needs a fat-tailed kernel");
  }

  if (kernel && needs_mutation(e)) {
    if (!kernel->mutation_eligible()) {
      problems.push_back("NotMutationEligible: f'(0) = " + std::to_string(kernel->fprime0()) +
                         " must be finite and positive for " + std::string(to_string(e)));
    } else {
      const double a_max = 1.0 - 1.0 / kernel->mu();
      if (!a.A) {
        problems.push_back("analysis.A is required");
      } else if (!(*a.A > 0.0 && *a.A < a_max)) {
        std::ostringstream msg;
        msg << "analysis.A must lie in (0, " << a_max << ")";
        problems.push_back(msg.str());
      }
      if ((e == Experiment::Mutation || e == Experiment::CrossValidate) && cfg.grid &&
          power_of_two(cfg.grid->N) && cfg.grid->N >= 16 && cfg.grid->L > 0.0) {
        const double dx = 2.0 * cfg.grid->L / static_cast<double>(cfg.grid->N);
        const double h0 = upper_quartile(*kernel);
        for (double v : a.eps) {
          if (!(v > 0.0 && v <= 1.0)) continue;
          const double need = contraction(*kernel, v, h0) / 4.0;
          if (dx > need) {
            std::ostringstream msg;
            msg << "GridTooCoarse: dx = " << dx << " exceeds m_eps(h0)/4 = " << need
                << " at eps = " << v;
            problems.push_back(msg.str());
          }
        }
      }
    }
  }
  return problems;
}

std::string config_to_json(const RunConfig& cfg) {
  ordered j;
  j["experiment"] = std::string(to_string(cfg.experiment));
  if (cfg.kernel) {
    const KernelSpec& k = *cfg.kernel;
    ordered kj;
    kj["family"] = std::string(to_string(k.family));
    switch (k.family) {
      case Family::SubExponential:
      case Family::Polynomial: kj["alpha"] = k.alpha; break;
      case Family::LogLinear: kj["beta"] = k.beta; break;
      case Family::PowerShift:
        kj["b"] = k.b;
        kj["alpha"] = k.alpha;
        break;
      case Family::Gaussian: kj["sigma"] = k.sigma; break;
    }
    j["kernel"] = kj;
  }
  if (cfg.grid) j["grid"] = ordered{{"L", cfg.grid->L}, {"N", cfg.grid->N}};
  if (cfg.solver) {
    const SolverBlock& s = *cfg.solver;
    ordered sj;
    sj["dt"] = s.dt;
    sj["t_end"] = s.t_end;
    sj["snapshot_times"] = s.times();
    sj["method"] = std::string(to_string(s.method));
    sj["boundary_guard"] = s.boundary_guard;
    sj["C"] = s.C;
    j["solver"] = sj;
  }
  const AnalysisBlock& a = cfg.analysis;
  ordered aj;
  aj["levels"] = a.levels;
  aj["eps"] = a.eps;
  if (a.A) aj["A"] = *a.A;
  aj["theta1_alpha"] = a.theta1_alpha;
  aj["delta"] = a.delta;
  aj["rho"] = a.rho;
  aj["envelope"] = a.envelope;
  aj["limit_tol"] = a.limit_tol;
  aj["front_band"] = a.front_band;
  aj["p_samples"] = a.p_samples;
  aj["compact"] = ordered{{"x_min", a.compact.x_min}, {"x_max", a.compact.x_max},
                          {"t_min", a.compact.t_min}, {"t_max", a.compact.t_max},
                          {"nx", a.compact.nx},       {"nt", a.compact.nt}};
  if (a.hj_grid) aj["hj_grid"] = ordered{{"L", a.hj_grid->L}, {"N", a.hj_grid->N}};
  j["analysis"] = aj;
  j["output"] = ordered{{"directory", cfg.output.directory},
                        {"plot", cfg.output.plot},
                        {"window", cfg.output.window},
                        {"stride", cfg.output.stride}};
  return j.dump(2);
}

}  // namespace fatkpp
