#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "fatkpp/kernel.hpp"
#include "fatkpp/quadrature.hpp"

using namespace fatkpp;

namespace {

const std::vector<KernelSpec> kFatTailed{KernelSpec::polynomial(4.0), KernelSpec::sub_exponential(0.5),
                                        KernelSpec::log_linear(2.0), KernelSpec::log_linear(3.0),
                                        KernelSpec::power_shift(1.0, 0.5)};

}  // namespace

TEST_CASE("normalization mass against closed forms") {
  // Polynomial: Z = sqrt(pi) Gamma(alpha/2) / Gamma((1+alpha)/2).
  for (double a : {0.5, 1.0, 4.0}) {
    const double z = std::sqrt(std::numbers::pi) * std::tgamma(a / 2) / std::tgamma((1 + a) / 2);
    CHECK(oracle::rel_err(build_kernel(KernelSpec::polynomial(a)).mass(), z) < 1e-10);
  }
  // LogLinear: Z = 2 / (beta - 1).
  CHECK(oracle::rel_err(build_kernel(KernelSpec::log_linear(2.0)).mass(), 2.0) < 1e-10);
  CHECK(oracle::rel_err(build_kernel(KernelSpec::log_linear(3.0)).mass(), 1.0) < 1e-10);
  // PowerShift b=1, alpha=1/2: w = sqrt(1+x) gives Z = 2 \int_1^inf 2w e^{1-w} dw = 8.
  CHECK(oracle::rel_err(build_kernel(KernelSpec::power_shift(1.0, 0.5)).mass(), 8.0) < 1e-10);
  CHECK(oracle::rel_err(build_kernel(KernelSpec::gaussian(1.5)).mass(), 1.5 * std::sqrt(2 * std::numbers::pi)) < 1e-10);
}

TEST_CASE("normalization mass against Simpson oracles") {
  // Polynomial alpha: x = tan(th) turns the integrand into cos^{alpha-1}.
  for (double a : {3.0, 4.0}) {
    const double z = 2.0 * oracle::simpson([&](double th) { return std::pow(std::cos(th), a - 1.0); }, 0.0,
                                           std::numbers::pi / 2, 20000);
    CHECK(oracle::rel_err(build_kernel(KernelSpec::polynomial(a)).mass(), z) < 1e-9);
  }
  // SubExponential alpha: x = sinh(s) gives exp(1 - cosh(s)^alpha) cosh(s).
  const double a = 0.5;
  const double z = 2.0 * oracle::simpson(
                             [&](double s) { return std::exp(1.0 - std::pow(std::cosh(s), a)) * std::cosh(s); },
                             0.0, 14.0, 400000);
  CHECK(oracle::rel_err(build_kernel(KernelSpec::sub_exponential(a)).mass(), z) < 1e-9);
}

TEST_CASE("f, J and inverses on examples") {
  const Kernel ll = build_kernel(KernelSpec::log_linear(3.0));
  CHECK(ll.f(0.0) == 0.0);
  CHECK(ll.J(0.0) == 1.0);
  CHECK(ll.f(std::exp(1.0) - 1.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ll.inv_f(3.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(ll.inv_J(0.125) == doctest::Approx(1.0).epsilon(1e-12));  // (1+x)^-3 = 1/8
  CHECK(ll.fprime0() == 3.0);
  CHECK(ll.mu() == doctest::Approx(3.0));
  CHECK(ll.mutation_eligible());

  const Kernel poly = build_kernel(KernelSpec::polynomial(4.0));
  // f = 2.5 ln(1+x^2), so inv_f(y) = sqrt(e^{y/2.5} - 1).
  CHECK(poly.inv_f(5.0 * std::log(2.0)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(poly.fprime0() == 0.0);
  CHECK_FALSE(poly.mutation_eligible());
  CHECK(poly.mu() == doctest::Approx(5.0));

  const Kernel ps = build_kernel(KernelSpec::power_shift(1.0, 0.5));
  CHECK(ps.fprime0() == doctest::Approx(0.5));
  CHECK(ps.mutation_eligible());
  CHECK(std::isinf(ps.mu()));

  CHECK_FALSE(build_kernel(KernelSpec::gaussian(1.0)).mutation_eligible());
}

TEST_CASE("tail mass against closed forms") {
  const Kernel ll = build_kernel(KernelSpec::log_linear(3.0));
  for (double R : {0.0, 1.0, 10.0, 1e4}) {
    CHECK(oracle::rel_err(ll.tail_mass(R), std::pow(1.0 + R, -2.0)) < 1e-8);
  }
  const Kernel g = build_kernel(KernelSpec::gaussian(1.0));
  CHECK(oracle::rel_err(g.tail_mass(2.0), std::erfc(2.0 / std::sqrt(2.0))) < 1e-8);
}

TEST_CASE("domain and parameter errors") {
  const Kernel ll = build_kernel(KernelSpec::log_linear(3.0));
  CHECK_KIND(ll.inv_f(-1.0), ErrorKind::DomainError);
  CHECK_KIND(ll.inv_J(0.0), ErrorKind::DomainError);
  CHECK_KIND(ll.inv_J(1.5), ErrorKind::DomainError);
  CHECK_KIND(build_kernel(KernelSpec::sub_exponential(1.5)), ErrorKind::InvalidParams);
  CHECK_KIND(build_kernel(KernelSpec::log_linear(1.0)), ErrorKind::InvalidParams);
  CHECK_KIND(build_kernel(KernelSpec::power_shift(-1.0, 0.5)), ErrorKind::InvalidParams);
  CHECK_KIND(build_kernel(KernelSpec::gaussian(0.0)), ErrorKind::InvalidParams);
  CHECK(check_params(KernelSpec::polynomial(4.0)).empty());
  CHECK(check_params(KernelSpec::power_shift(0.0, 2.0)).size() == 2);
}

TEST_CASE("hypothesis report") {
  for (const auto& spec : kFatTailed) {
    const HypothesisReport r = validate_hypotheses(build_kernel(spec));
    CAPTURE(std::string(to_string(spec.family)));
    CHECK(r.all_passed());
    CHECK(r.fat_tailed);
    CHECK(r.mass_error <= 1e-8);
    CHECK(r.find("normalized") != nullptr);
  }
  const HypothesisReport g = validate_hypotheses(build_kernel(KernelSpec::gaussian(1.0)));
  CHECK_FALSE(g.fat_tailed);
  CHECK_FALSE(g.all_passed());
  CHECK_FALSE(g.mutation_eligible);
}

TEST_CASE("property: f increasing, J even, inverses round trip") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> logx(-4.0, 7.0);
  std::uniform_real_distribution<double> unit(1e-12, 1.0);
  for (const auto& spec : kFatTailed) {
    const Kernel k = build_kernel(spec);
    for (int i = 0; i < 500; ++i) {
      const double a = std::pow(10.0, logx(rng));
      const double b = std::pow(10.0, logx(rng));
      if (a != b) CHECK((k.f(std::min(a, b)) < k.f(std::max(a, b))));
      CHECK(k.J(a) == k.J(-a));
      CHECK(k.f(a) == k.f(-a));
      const double v = unit(rng);
      CHECK(oracle::rel_err(k.J(k.inv_J(v)), v) <= 1e-9);
      CHECK(oracle::rel_err(k.inv_f(k.f(a)), a) <= 1e-9);
    }
  }
}

TEST_CASE("property: f(h)/h tends to f'(0)") {
  for (const auto& spec : {KernelSpec::log_linear(3.0), KernelSpec::power_shift(1.0, 0.5), KernelSpec::log_linear(1.5)}) {
    const Kernel k = build_kernel(spec);
    CHECK(oracle::rel_err(k.f(1e-3) / 1e-3, k.fprime0()) <= 1e-2);
    CHECK(oracle::rel_err(k.f(1e-6) / 1e-6, k.fprime0()) <= 1e-4);
  }
}

TEST_CASE("quadrature examples") {
  CHECK(adaptive_integrate([](double x) { return x * x; }, 0.0, 1.0).value == doctest::Approx(1.0 / 3).epsilon(1e-12));
  const auto r = adaptive_integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY,
                                    TailBound([](double B) { return std::exp(-B); }));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  // A slowly decaying integrand over many decades: \int_0^inf (1+x)^{-2} = 1.
  const auto s = adaptive_integrate([](double x) { return 1.0 / ((1 + x) * (1 + x)); }, 0.0, INFINITY,
                                    TailBound([](double B) { return 1.0 / (1 + B); }));
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.error <= 1e-8);
}

TEST_CASE("invert_increasing") {
  const double x = invert_increasing([](double v) { return v * v * v; }, [](double v) { return 3 * v * v; }, 8.0);
  CHECK(x == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(invert_increasing([](double v) { return v; }, [](double) { return 1.0; }, 0.0) == 0.0);
  CHECK_KIND(invert_increasing([](double v) { return v; }, [](double) { return 1.0; }, -1.0),
             ErrorKind::DomainError);
}
