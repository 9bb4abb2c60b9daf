#include "fatkpp/kernel.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fatkpp/errors.hpp"
#include "fatkpp/quadrature.hpp"

namespace fatkpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sqrt(expm1(z)) without overflow for large z.
double sqrt_expm1(double z) {
  if (z > 700.0) return std::exp(0.5 * z) * std::sqrt(-std::expm1(-z));
  return std::sqrt(std::expm1(z));
}

double half_log_expm1(double z) {
  if (z > 40.0) return 0.5 * z + 0.5 * std::log1p(-std::exp(-z));
  return 0.5 * std::log(std::expm1(z));
}

std::string format_double(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::SubExponential: return "SubExponential";
    case Family::Polynomial: return "Polynomial";
    case Family::LogLinear: return "LogLinear";
    case Family::PowerShift: return "PowerShift";
    case Family::Gaussian: return "Gaussian";
  }
  return "Unknown";
}

std::optional<Family> family_from_string(std::string_view name) {
  for (Family f : {Family::SubExponential, Family::Polynomial, Family::LogLinear,
                   Family::PowerShift, Family::Gaussian}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

KernelSpec KernelSpec::sub_exponential(double alpha) {
  return {.family = Family::SubExponential, .alpha = alpha};
}
KernelSpec KernelSpec::polynomial(double alpha) {
  return {.family = Family::Polynomial, .alpha = alpha};
}
KernelSpec KernelSpec::log_linear(double beta) {
  return {.family = Family::LogLinear, .beta = beta};
}
KernelSpec KernelSpec::power_shift(double b, double alpha) {
  return {.family = Family::PowerShift, .alpha = alpha, .b = b};
}
KernelSpec KernelSpec::gaussian(double sigma) {
  return {.family = Family::Gaussian, .sigma = sigma};
}

std::vector<std::string> check_params(const KernelSpec& spec) {
  std::vector<std::string> errors;
  auto require = [&](bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  };
  switch (spec.family) {
    case Family::SubExponential:
      require(spec.alpha > 0.0 && spec.alpha < 1.0,
              "SubExponential alpha must lie in (0,1), got " + format_double(spec.alpha));
      break;
    case Family::Polynomial:
      require(spec.alpha > 0.0 && std::isfinite(spec.alpha),
              "Polynomial alpha must be > 0, got " + format_double(spec.alpha));
      break;
    case Family::LogLinear:
      require(spec.beta > 1.0 && std::isfinite(spec.beta),
              "LogLinear beta must be > 1, got " + format_double(spec.beta));
      break;
    case Family::PowerShift:
      require(spec.b > 0.0 && std::isfinite(spec.b),
              "PowerShift b must be > 0, got " + format_double(spec.b));
      require(spec.alpha > 0.0 && spec.alpha < 1.0,
              "PowerShift alpha must lie in (0,1), got " + format_double(spec.alpha));
      break;
    case Family::Gaussian:
      require(spec.sigma > 0.0 && std::isfinite(spec.sigma),
              "Gaussian sigma must be > 0, got " + format_double(spec.sigma));
      break;
  }
  return errors;
}

Kernel::Kernel(const KernelSpec& spec) : spec_(spec) {
  const double a = spec.alpha;
  switch (spec.family) {
    case Family::SubExponential:
      mu_ = kInf;
      x_conc_ = 1.0 / std::sqrt(1.0 - a);
      fprime0_ = 0.0;
      break;
    case Family::Polynomial:
      mu_ = 1.0 + a;
      x_conc_ = 1.0;
      fprime0_ = 0.0;
      break;
    case Family::LogLinear:
      mu_ = spec.beta;
      x_conc_ = 0.0;
      fprime0_ = spec.beta;
      break;
    case Family::PowerShift:
      mu_ = kInf;
      x_conc_ = 0.0;
      fprime0_ = spec.b * a;
      break;
    case Family::Gaussian:
      mu_ = kInf;
      x_conc_ = kInf;
      fprime0_ = 0.0;
      break;
  }
  fprime_sup_ = std::isfinite(x_conc_) ? f_prime(x_conc_) : kInf;
}

Kernel build_kernel(const KernelSpec& spec) {
  const auto errors = check_params(spec);
  if (!errors.empty()) {
    std::string message;
    for (const auto& e : errors) message += (message.empty() ? "" : "; ") + e;
    raise(ErrorKind::InvalidParams, message);
  }
  Kernel kernel(spec);
  if (!(kernel.mu() > 1.0)) {
    raise(ErrorKind::NonIntegrableTail, "tail index mu <= 1, J is not integrable");
  }
  const auto half = adaptive_integrate([&](double h) { return kernel.J(h); }, 0.0, kInf,
                                       TailBound([&](double B) { return kernel.tail_bound(B, 1.0, 0); }),
                                       {.abs = 1e-14, .rel = 1e-13});
  kernel.mass_ = 2.0 * half.value;
  return kernel;
}

bool Kernel::mutation_eligible() const {
  return !thin_tailed() && fprime0_ > 0.0 && std::isfinite(fprime0_);
}

double Kernel::J(double x) const { return std::exp(-f(x)); }

double Kernel::f(double x) const {
  const double h = std::abs(x);
  const double a = spec_.alpha;
  switch (spec_.family) {
    case Family::SubExponential: return std::expm1(0.5 * a * std::log1p(h * h));
    case Family::Polynomial: return 0.5 * (1.0 + a) * std::log1p(h * h);
    case Family::LogLinear: return spec_.beta * std::log1p(h);
    case Family::PowerShift: return spec_.b * std::expm1(a * std::log1p(h));
    case Family::Gaussian: return h * h / (2.0 * spec_.sigma * spec_.sigma);
  }
  return 0.0;
}

double Kernel::f_prime(double x) const {
  const double h = std::abs(x);
  const double a = spec_.alpha;
  switch (spec_.family) {
    case Family::SubExponential: return a * h * std::exp((0.5 * a - 1.0) * std::log1p(h * h));
    case Family::Polynomial: return (1.0 + a) * h / (1.0 + h * h);
    case Family::LogLinear: return spec_.beta / (1.0 + h);
    case Family::PowerShift: return spec_.b * a * std::exp((a - 1.0) * std::log1p(h));
    case Family::Gaussian: return h / (spec_.sigma * spec_.sigma);
  }
  return 0.0;
}

double Kernel::f_second(double x) const {
  const double h = std::abs(x);
  const double a = spec_.alpha;
  switch (spec_.family) {
    case Family::SubExponential:
      return a * std::exp((0.5 * a - 2.0) * std::log1p(h * h)) * (1.0 + (a - 1.0) * h * h);
    case Family::Polynomial: {
      const double s = 1.0 + h * h;
      return (1.0 + a) * (1.0 - h * h) / (s * s);
    }
    case Family::LogLinear: return -spec_.beta / ((1.0 + h) * (1.0 + h));
    case Family::PowerShift: return spec_.b * a * (a - 1.0) * std::exp((a - 2.0) * std::log1p(h));
    case Family::Gaussian: return 1.0 / (spec_.sigma * spec_.sigma);
  }
  return 0.0;
}

double Kernel::inv_f(double y) const {
  if (!(y >= 0.0)) raise(ErrorKind::DomainError, "inv_f needs y >= 0, got " + format_double(y));
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return kInf;
  const double a = spec_.alpha;
  switch (spec_.family) {
    case Family::SubExponential: return sqrt_expm1((2.0 / a) * std::log1p(y));
    case Family::Polynomial: return sqrt_expm1(2.0 * y / (1.0 + a));
    case Family::LogLinear: return std::expm1(y / spec_.beta);
    case Family::PowerShift: return std::expm1(std::log1p(y / spec_.b) / a);
    case Family::Gaussian: return spec_.sigma * std::sqrt(2.0 * y);
  }
  return 0.0;
}

double Kernel::inv_J(double v) const {
  if (!(v > 0.0 && v <= 1.0)) {
    raise(ErrorKind::DomainError, "inv_J needs v in (0,1], got " + format_double(v));
  }
  return inv_f(-std::log(v));
}

double Kernel::log_fprime_at_inv_f(double y) const {
  const double a = spec_.alpha;
  switch (spec_.family) {
    case Family::SubExponential: {
      const double z = (2.0 / a) * std::log1p(y);
      return std::log(a) + half_log_expm1(z) + (1.0 - 2.0 / a) * std::log1p(y);
    }
    case Family::Polynomial: {
      const double z = 2.0 * y / (1.0 + a);
      return std::log1p(a) + half_log_expm1(z) - z;
    }
    case Family::LogLinear: return std::log(spec_.beta) - y / spec_.beta;
    case Family::PowerShift:
      return std::log(spec_.b * a) + ((a - 1.0) / a) * std::log1p(y / spec_.b);
    case Family::Gaussian: return std::log(std::sqrt(2.0 * y) / spec_.sigma);
  }
  return 0.0;
}

double Kernel::tail_exponent(double B) const {
  if (!(B > 1.0)) return 0.0;
  switch (spec_.family) {
    case Family::Polynomial: return 1.0 + spec_.alpha;  // f >= (1+alpha) ln h
    case Family::LogLinear: return spec_.beta;          // f >= beta ln h
    case Family::SubExponential:
    case Family::PowerShift:
      // f / ln h is nondecreasing once h f'/f >= 1 / ln h, which holds for
      // h >= exp(2/alpha).
      if (B < std::exp(2.0 / spec_.alpha)) return 0.0;
      return f(B) / std::log(B);
    case Family::Gaussian:
      if (B < std::numbers::e) return 0.0;
      return f(B) / std::log(B);
  }
  return 0.0;
}

double Kernel::tail_bound(double B, double c, int f_power) const {
  const double q = tail_exponent(B);
  if (!(q > 0.0) || !(c > 0.0)) return kInf;
  if (!(c * q > 1.0)) return kInf;
  double prefactor = 1.0;
  double rate = c;
  if (f_power > 0) {
    // f^k e^{-eta f} <= (k / (e eta))^k
    const double eta = 0.5 * (c - 1.0 / q);
    const double k = static_cast<double>(f_power);
    prefactor = std::pow(k / (std::numbers::e * eta), k);
    rate = c - eta;
  }
  const double exponent = rate * q;
  return prefactor * std::exp((1.0 - exponent) * std::log(B)) / (exponent - 1.0);
}

double Kernel::tail_mass(double R) const {
  if (!(R > 0.0)) return 1.0;
  if (std::isinf(R)) return 0.0;
  const auto tail = adaptive_integrate([this](double h) { return J(h); }, R, kInf,
                                       TailBound([this](double B) { return tail_bound(B, 1.0, 0); }),
                                       {.abs = 1e-16, .rel = 1e-9});
  return 2.0 * tail.value / mass_;
}

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck* HypothesisReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

double analytic_limsup_ratio(const KernelSpec& spec) {
  switch (spec.family) {
    case Family::SubExponential: return spec.alpha;
    case Family::Polynomial: return 0.0;
    case Family::LogLinear: return 0.0;
    case Family::PowerShift: return spec.alpha;
    case Family::Gaussian: return 2.0;
  }
  return kInf;
}

// Independent route to \int_0^inf J: double-exponential quadrature.
double mass_by_exp_sinh(const Kernel& kernel) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  const double half =
      integrator.integrate([&](double h) { return kernel.J(h); }, 0.0, kInf, 1e-13, &error);
  return 2.0 * half;
}

}  // namespace

HypothesisReport validate_hypotheses(const Kernel& kernel) {
  HypothesisReport report;
  report.mu = kernel.mu();
  report.limsup_ratio = analytic_limsup_ratio(kernel.spec());
  report.fprime0 = kernel.fprime0();

  std::vector<double> xs;
  for (double e = -3.0; e <= 8.0 + 1e-12; e += 1.0 / 12.0) xs.push_back(std::pow(10.0, e));

  {
    bool ok = kernel.f(0.0) == 0.0 && kernel.J(0.0) == 1.0;
    report.checks.push_back({"shape_normalization", ok, kernel.J(0.0), "J(0) = 1 and f(0) = 0"});
  }
  {
    bool ok = true;
    for (double x : xs) {
      ok = ok && std::isfinite(kernel.f(x)) && kernel.J(x) == kernel.J(-x);
    }
    report.checks.push_back({"symmetric_positive", ok, 0.0, "J(x) = J(-x) and f finite on the sample grid"});
  }
  {
    bool ok = true;
    double prev = kernel.f(0.0);
    for (double x : xs) {
      const double fx = kernel.f(x);
      ok = ok && fx > prev;
      prev = fx;
    }
    report.checks.push_back({"monotone", ok, 0.0, "f strictly increasing on the sample grid"});
  }
  {
    bool ok = std::isfinite(kernel.x_conc());
    double worst = -kInf;
    if (ok) {
      for (double x : xs) {
        if (x < kernel.x_conc()) continue;
        worst = std::max(worst, kernel.f_second(x));
      }
      ok = worst <= 0.0;
    }
    report.checks.push_back({"asymptotic_concavity", ok, worst, "f'' <= 0 beyond x_conc"});
  }
  {
    double sampled = 0.0;
    for (double x : xs) {
      if (x < 1e6) continue;
      sampled = std::max(sampled, x * kernel.f_prime(x) / kernel.f(x));
    }
    const bool ok = report.limsup_ratio < 1.0 && sampled < 1.0;
    report.checks.push_back({"slower_than_exponential", ok, sampled,
                             "limsup x f'/f < 1 (analytic " + format_double(report.limsup_ratio) + ")"});
  }
  {
    const double sampled = 1e8 * kernel.f_prime(1e8);
    const bool ok = kernel.mu() > 1.0 && sampled > 1.0;
    report.checks.push_back({"thinner_than_inverse_x", ok, sampled,
                             "liminf x f' > 1 (mu = " + format_double(kernel.mu()) + ")"});
  }
  {
    report.mass_error = std::abs(mass_by_exp_sinh(kernel) / kernel.mass() - 1.0);
    report.checks.push_back({"normalized", report.mass_error <= 1e-8, report.mass_error,
                             "|\\int J/Z - 1| <= 1e-8"});
  }

  report.fat_tailed = report.all_passed();
  report.mutation_eligible = kernel.mutation_eligible();
  return report;
}

double invert_increasing(const std::function<double(double)>& g,
                         const std::function<double(double)>& dg, double y, double rel_tol,
                         int max_iter) {
  if (!(y >= 0.0)) raise(ErrorKind::DomainError, "invert_increasing needs y >= 0");
  if (y == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) raise(ErrorKind::NoConvergence, "could not bracket the inverse");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double r = g(x) - y;
    if (std::abs(r) <= rel_tol * y) return x;
    if (r > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (hi - lo <= rel_tol * 1e-3 * hi) return x;
    const double slope = dg(x);
    double next = slope > 0.0 ? x - r / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  raise(ErrorKind::NoConvergence, "inverse did not converge within the iteration budget");
}

}  // namespace fatkpp
