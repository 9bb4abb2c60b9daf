#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fatkpp {

enum class Family { SubExponential, Polynomial, LogLinear, PowerShift, Gaussian };

std::string_view to_string(Family family);
std::optional<Family> family_from_string(std::string_view name);

/// Kernel family and its parameters. Only the parameters of the chosen
/// family are read:
///   SubExponential  f = (1+x^2)^{alpha/2} - 1,   alpha in (0,1)
///   Polynomial      f = (1+alpha)/2 ln(1+x^2),   alpha > 0
///   LogLinear       f = beta ln(1+|x|),          beta > 1
///   PowerShift      f = b((1+|x|)^alpha - 1),    b > 0, alpha in (0,1)
///   Gaussian        f = x^2 / (2 sigma^2),       sigma > 0 (thin-tailed control)
struct KernelSpec {
  Family family = Family::Polynomial;
  double alpha = 0.0;
  double beta = 0.0;
  double b = 0.0;
  double sigma = 0.0;

  static KernelSpec sub_exponential(double alpha);
  static KernelSpec polynomial(double alpha);
  static KernelSpec log_linear(double beta);
  static KernelSpec power_shift(double b, double alpha);
  static KernelSpec gaussian(double sigma);
};

/// Every violated parameter constraint, empty when the spec is valid.
std::vector<std::string> check_params(const KernelSpec& spec);

class Kernel;
Kernel build_kernel(const KernelSpec& spec);

/// A validated dispersal kernel with shape J = exp(-f), J(0) = 1, and the
/// probability density J / Z used by the dynamics.
///
/// Immutable after construction and cheap to copy.
class Kernel {
 public:
  const KernelSpec& spec() const { return spec_; }

  /// Normalization mass Z of the shape.
  double mass() const { return mass_; }
  /// liminf x f'(x); +inf for SubExponential, PowerShift and Gaussian.
  double mu() const { return mu_; }
  /// f'' <= 0 beyond this point (also the maximizer of f').
  double x_conc() const { return x_conc_; }
  /// Right derivative of f at 0; zero for the smooth families.
  double fprime0() const { return fprime0_; }
  /// sup |f'|, +inf for the Gaussian.
  double fprime_sup() const { return fprime_sup_; }
  bool thin_tailed() const { return spec_.family == Family::Gaussian; }
  bool mutation_eligible() const;

  double J(double x) const;
  double density(double x) const { return J(x) / mass_; }
  double f(double x) const;
  double f_prime(double x) const;
  double f_second(double x) const;
  double inv_f(double y) const;
  double inv_J(double v) const;

  /// ln f'(inv_f(y)), evaluated without forming inv_f(y) so that it stays
  /// finite where inv_f overflows.
  double log_fprime_at_inv_f(double y) const;

  /// q such that f(h) >= q ln h for every h >= B, or 0 when no such bound is
  /// available at this B.
  double tail_exponent(double B) const;

  /// Upper bound on \int_B^inf f(h)^k exp(-c f(h)) dh; +inf when the bound is
  /// unavailable or the integral may diverge.
  double tail_bound(double B, double c, int f_power) const;

  /// Probability mass of the normalized density outside [-R, R].
  double tail_mass(double R) const;

 private:
  friend Kernel build_kernel(const KernelSpec& spec);
  explicit Kernel(const KernelSpec& spec);

  KernelSpec spec_;
  double mass_ = 1.0;
  double mu_ = 0.0;
  double x_conc_ = 0.0;
  double fprime0_ = 0.0;
  double fprime_sup_ = 0.0;
};

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;  // sampled or analytic quantity behind the verdict
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  double limsup_ratio = 0.0;  // analytic limit of x f'/f
  double mu = 0.0;
  double mass_error = 0.0;  // |\int J/Z - 1| by an independent quadrature route
  bool fat_tailed = false;
  bool mutation_eligible = false;
  double fprime0 = 0.0;

  bool all_passed() const;
  const HypothesisCheck* find(std::string_view name) const;
};

/// Samples x f'/f and x f' on a geometric grid up to 1e8 and combines them
/// with the analytic limits of the family. Failures are reported, not thrown.
HypothesisReport validate_hypotheses(const Kernel& kernel);

/// Inverse of an increasing g: [0, inf) -> [0, inf) with g(0) = 0, by
/// monotone bracketing and safeguarded Newton steps.
double invert_increasing(const std::function<double(double)>& g,
                         const std::function<double(double)>& dg, double y,
                         double rel_tol = 1e-10, int max_iter = 200);

}  // namespace fatkpp
