#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fatkpp/cauchy_solver.hpp"
#include "fatkpp/grid.hpp"
#include "fatkpp/kernel.hpp"

namespace fatkpp {

/// Jump map of the small-mutation scaling, h -> sign(h) inv_f(eps f(|h|)).
/// Throws Error(NotMutationEligible) unless f'(0) is finite and positive.
double contraction(const Kernel& kernel, double eps, double h);

/// J_eps(y) = (1/eps) f'(y) / f'(Psi_eps(y)) e^{-f(y)/eps} / Z, the density
/// of m_eps(h) when h is drawn from J/Z. J_eps(0) = 1/(eps Z).
double rescaled_density(const Kernel& kernel, double eps, double y);

/// The rescaled jump law for one eps.
class MutationKernel {
 public:
  MutationKernel(const Kernel& base, double eps);

  const Kernel& base() const { return base_; }
  double eps() const { return eps_; }
  double contract(double h) const;
  double dilate(double y) const;
  double density(double y) const;
  /// Mass outside [-R, R]; equals the base tail mass outside Psi_eps(R).
  double tail_mass(double R) const;
  /// \int J_eps by quadrature with the pushed-forward analytic tail bound.
  double mass() const;
  /// \int f^2 J_eps by quadrature.
  double second_moment_f() const;

  /// Samples J_eps(j dx) dx out to the radius whose tail mass is tail_tol.
  /// Throws Error(GridTooCoarse) if dx > m_eps(h0)/4, h0 the upper quartile
  /// of the base density.
  DiscreteKernel discretize(const Grid1D& grid, double tail_tol = 1e-6) const;

 private:
  Kernel base_;
  double eps_;
};

/// h0 > 0 with \int_{h0}^inf J/Z = 1/4.
double upper_quartile(const Kernel& kernel);

/// \int e^{A f} J/Z, the growth rate of the a-priori lower bound.
double apriori_rate(const Kernel& kernel, double A);

/// Midpoint of the admissible interval (0, 1 - 1/mu).
double default_A(const Kernel& kernel);

struct InitialDataMut {
  Field u0;
  double A = 0.0;
};

struct InitialDataReport {
  bool valid = false;
  std::vector<std::string> problems;
  double worst_fd_violation = 0.0;  // max of -A f(|h|) - (u(x+h) - u(x)), clipped at 0
  std::size_t pairs_checked = 0;
};

/// Checks u0 >= 0, finiteness, A in (0, 1 - 1/mu) and u0(x+h) - u0(x) >=
/// -A f(|h|) - tol over node pairs at geometric offsets from every node.
InitialDataReport validate_initial_data(const Kernel& kernel, const InitialDataMut& data,
                                        double tol = 1e-8);

/// The Hopf-Cole initial data u0 = A f.
InitialDataMut power_initial_data(const Kernel& kernel, const Grid1D& grid, double A);

struct MutationSnapshot {
  double t = 0.0;
  Field n;
  Field u;                            // -eps ln max(n, 1e-300)
  std::vector<unsigned char> floored;  // 1 where n < 1e-300
};

struct MutationRun {
  double eps = 1.0;
  double A = 0.0;
  SimulationRun run;  // n_eps; its snapshots are left empty
  std::vector<MutationSnapshot> snapshots;
};

/// Integrates eps n_t = J_eps*n - n + n(1-n) from n0 = exp(-u0/eps).
/// config.rate is replaced by 1/eps; config.dt must satisfy
/// dt <= eps * max_stable_dt(n0).
MutationRun mutation_run(const Kernel& kernel, const Grid1D& grid, double eps,
                         const SolverConfig& config, const InitialDataMut& data);

MutationSnapshot hopf_cole_snapshot(double t, const Field& n, double eps);

enum class LimitRegion : unsigned char { Positive, Null, Uncertain };
char region_code(LimitRegion region);  // 'A', 'B' or 'U'

/// Positive where u > tol; Null where u < tol at the node and at every node
/// within `erosion` cells; everything else Uncertain.
std::vector<LimitRegion> classify_limit_sets(const Field& u, double tol,
                                             std::size_t erosion = 2);

struct AprioriReport {
  double upper_excess = 0.0;  // max of (u - u0) - t
  double lower_excess = 0.0;  // max of -r t - (u - u0)
  double fd_violation = 0.0;  // max of -A f(|h|) - (u(x+h) - u(x)) on sampled pairs
  double lipschitz = 0.0;     // max |u(x+dx) - u(x)| / dx
  std::size_t pairs = 0;
  std::size_t points = 0;
};

/// A-priori bounds of one snapshot against u0, on nodes at least `margin`
/// from the boundary and not floored. `pairs` node pairs are drawn with a
/// fixed seed for the finite-difference condition.
AprioriReport check_apriori(const Kernel& kernel, const MutationSnapshot& snap, const Field& u0,
                            double A, double r_hat, double margin, std::size_t pairs,
                            std::uint64_t seed = 1);

}  // namespace fatkpp
