#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fatkpp/grid.hpp"
#include "fatkpp/kernel.hpp"
#include "fatkpp/mutation.hpp"

namespace fatkpp {

struct KappaBounds {
  double lower = 0.0;  // \int_0^inf (f/f'(0))^2 e^{-A f/f'(0)} J/Z
  double upper = 0.0;  // \int_0^inf (f/f'(0))^2 e^{+A f/f'(0)} J/Z
};

/// H(p) = \int (e^{sign(h) f(h) p / f'(0)} - 1) J/Z dh + 1, finite for
/// |p| < p_max = f'(0) (1 - 1/mu).
class Hamiltonian {
 public:
  explicit Hamiltonian(const Kernel& kernel);

  const Kernel& kernel() const { return kernel_; }
  double p_max() const { return p_max_; }

  /// Throws Error(GradientOutOfRange) when |p| >= p_max.
  double eval(double p) const;
  /// H'(p) by quadrature of the differentiated integrand.
  double derivative(double p) const;
  /// H'(p) by central differences of eval with step 1e-4 p_max.
  double derivative_fd(double p) const;
  double second_derivative(double p) const;

  KappaBounds kappa_bounds(double A) const;

 private:
  double moment(double p, int power) const;

  Kernel kernel_;
  double p_max_;
};

/// An even, convex Hamiltonian given pointwise, valid for |p| <= range.
struct HamiltonianFunction {
  std::function<double(double)> H;
  std::function<double(double)> dH;
  double range = 0.0;
};

/// Cubic Hermite table of H on [0, range] (H is even), with derivatives
/// from the quadrature of H'.
HamiltonianFunction tabulate(const Hamiltonian& hamiltonian, double range,
                             std::size_t intervals = 2048);

/// 1 + kappa p^2.
HamiltonianFunction quadratic_hamiltonian(double kappa);

struct HJOptions {
  /// Time step; 0 selects 0.9 dx / sigma (shortened to land on snapshots).
  double dt = 0.0;
  double sigma_safety = 1.2;
  /// Viscosity override; 0 derives it from Lip(u0). A positive value below
  /// the derived one is refused, so that comparable solves can share a scheme.
  double sigma = 0.0;
};

struct HJSnapshot {
  double t = 0.0;
  Field u;
};

struct HJSolution {
  std::vector<HJSnapshot> snapshots;
  double sigma = 0.0;  // Lax-Friedrichs viscosity
  double dt = 0.0;
  std::size_t steps = 0;
  double initial_lipschitz = 0.0;
  double max_lipschitz = 0.0;
};

double discrete_lipschitz(const Field& u);

/// Monotone Lax-Friedrichs scheme for min{u_t + H(u_x), u} = 0:
///   u <- max(u - dt (H((p- + p+)/2) - sigma (p+ - p-)/2), 0),
/// sigma = safety * max |H'| over [0, Lip(u0)] (central differences of H).
/// Ghost nodes extrapolate u linearly. Throws Error(CFLViolation) for a
/// requested dt above 0.9 dx / sigma and Error(GradientOutOfRange) when the
/// discrete Lipschitz constant leaves the admissible range.
HJSolution solve_constrained_hj(const HamiltonianFunction& hamiltonian, const Field& u0,
                                const std::vector<double>& snapshot_times,
                                const HJOptions& options = {});

/// Convenience overload: tabulates H up to min(0.999 p_max, 1.25 Lip(u0)).
HJSolution solve_constrained_hj(const Hamiltonian& hamiltonian, const Field& u0,
                                const std::vector<double>& snapshot_times,
                                const HJOptions& options = {});

struct ZeroSetBoundary {
  double left = 0.0;   // leftmost node of the zero run through x = 0
  double right = 0.0;  // rightmost node of that run; NaN if u(0) > 0
};

ZeroSetBoundary zero_set_boundary(const Field& u, double tol = 0.0);

/// max over r in [0,1] (scan of `samples` points) of
/// 2 sqrt(kappa) r t + inv_f(t (1 - r^2) / A).
double example_inclusion_radius(const Kernel& kernel, double kappa, double A, double t,
                                std::size_t samples = 101);

/// Hopf-Lax value max(inf_y (A f(y) + |x - y|^2 / (4 kappa t)) - t, 0) of the
/// quadratic Hamiltonian, by a fine scan over y near x.
double hopf_lax_quadratic(const Kernel& kernel, double A, double kappa, double t, double x);

struct CrossValidationRow {
  double eps = 0.0;
  double error = 0.0;        // sup |u_eps - u| on the compact
  double error_inner = 0.0;  // same, away from the zero-set boundary
};

/// Compares mutation-run potentials with the HJ solution at common snapshot
/// times on |x| <= x_max. Points within `front_band` of the HJ zero-set
/// boundary are left out of error_inner.
std::vector<CrossValidationRow> cross_validate(const std::vector<MutationRun>& runs,
                                               const HJSolution& hj, double x_max,
                                               double front_band);

}  // namespace fatkpp
