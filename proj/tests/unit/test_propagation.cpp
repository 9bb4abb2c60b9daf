#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "fatkpp/propagation.hpp"

using namespace fatkpp;

namespace {

const Kernel& poly() {
  static const Kernel k = build_kernel(KernelSpec::polynomial(4.0));
  return k;
}

const Kernel& subexp() {
  static const Kernel k = build_kernel(KernelSpec::sub_exponential(0.5));
  return k;
}

}  // namespace

TEST_CASE("rightmost crossing") {
  const Grid1D g = Grid1D::make(8.0, 16);  // dx = 1
  Field n = Field::zeros(g);
  for (std::size_t i = 0; i < g.N; ++i) n[i] = std::max(0.0, 1.0 - std::abs(g.x(i)) / 4.0);
  CHECK(rightmost_crossing(n, 0.5) == doctest::Approx(2.0));
  CHECK(rightmost_crossing(n, 0.6) == doctest::Approx(1.6));
  CHECK(std::isnan(rightmost_crossing(Field::zeros(g), 0.5)));
  CHECK_KIND(rightmost_crossing(n, 1.0), ErrorKind::InvalidParams);
}

TEST_CASE("phi envelope examples") {
  CHECK(phi_envelope(poly(), 2.0, 0.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  // phi = 1/2 exactly where f(x) = t.
  const double x = poly().inv_f(10.0);
  CHECK(phi_envelope(poly(), 10.0, x) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(phi_envelope(poly(), 10.0, -x) == phi_envelope(poly(), 10.0, x));
  for (double p : {0.3, 4.0, -17.0, 250.0}) {
    const double h = 1e-5 * std::max(1.0, std::abs(p));
    const double fd = (phi_envelope(poly(), 5.0, p + h) - phi_envelope(poly(), 5.0, p - h)) / (2 * h);
    CHECK(phi_envelope_dx(poly(), 5.0, p) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("envelope residual") {
  const Grid1D g = Grid1D::make(2000.0, std::size_t{1} << 16);
  // J*phi = phi for the identity kernel, up to round-off.
  CHECK(envelope_residual(poly(), DiscreteKernel::delta(g), 5.0) <= 1e-14);
  const DiscreteKernel dk = DiscreteKernel::from_kernel(poly(), g);
  const double r5 = envelope_residual(poly(), dk, 5.0);
  const double r30 = envelope_residual(poly(), dk, 30.0);
  CHECK(r30 < r5);
  CHECK(r5 > 0.0);
  const DiscreteKernel ds = DiscreteKernel::from_kernel(subexp(), g);
  CHECK(envelope_residual(subexp(), ds, 30.0) <= 0.1);
}

TEST_CASE("envelope monitor starts at t = 0") {
  const Grid1D g = Grid1D::make(100.0, 1024);
  const DiscreteKernel dk = DiscreteKernel::from_kernel(poly(), g);
  EnvelopeMonitor m(poly(), dk, 1.0, 1.0, dk.radius());
  CHECK_KIND(m.observe(1.0, initial_condition(poly(), g, 1.0)), ErrorKind::InvalidParams);
  m.observe(0.0, initial_condition(poly(), g, 1.0));
  CHECK(m.samples().size() == 1);
  CHECK(m.worst_lo_violation() <= 0.0);
  CHECK_KIND(m.observe(0.0, initial_condition(poly(), g, 1.0)), ErrorKind::InvalidParams);
}

TEST_CASE("theta1 and gamma") {
  CHECK_KIND(theta1(build_kernel(KernelSpec::gaussian(1.0)), 5.0), ErrorKind::InvalidParams);
  CHECK_KIND(theta1(poly(), 5.0, 1.0), ErrorKind::InvalidParams);
  double prev = INFINITY;
  for (double t : {1.0, 5.0, 20.0, 60.0}) {
    const double th = theta1(poly(), t);
    CHECK(th > 0.0);
    CHECK(th <= prev);
    prev = th;
    // Independent form for alpha = 4: f'(x) = 5x/(1+x^2), inv_f(t) = sqrt(e^{t/2.5} - 1).
    const double xt = std::sqrt(std::exp(t / 2.5) - 1.0);
    const double y = xt / 2.0;
    const double g1 = 1.0 / (5.0 * y / (1.0 + y * y));
    CHECK(gamma_loc(poly(), t) == doctest::Approx(std::min(g1, 1.0 / th)).epsilon(1e-9));
  }
}

TEST_CASE("property: |phi_x| <= theta1 phi") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logx(-2.0, 8.0);
  for (const Kernel* k : {&poly(), &subexp()}) {
    for (double t : {2.0, 5.0, 20.0}) {
      const double th = theta1(*k, t);
      for (int i = 0; i < 2000; ++i) {
        const double x = std::pow(10.0, logx(rng));
        CHECK(std::abs(phi_envelope_dx(*k, t, x)) <= th * phi_envelope(*k, t, x) + 1e-10);
      }
    }
  }
}

TEST_CASE("region split") {
  const double x = poly().inv_f(10.0);
  CHECK(classify_region(poly(), 10.0, 0.9 * x) == Region::ShortRange);
  CHECK(classify_region(poly(), 10.0, 1.1 * x) == Region::LongRange);
  CHECK(classify_region(poly(), 10.0, -1.1 * x) == Region::LongRange);
}

TEST_CASE("rescaling map") {
  // f(1) = 2.5 ln 2, so the image at eps = 1/2 solves 2.5 ln(1+y^2) = 5 ln 2.
  const RescalingMap m = dilation(poly(), 0.5);
  CHECK(m.forward(1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(m.forward(-1.0) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-12));
  CHECK(m.inverse(std::sqrt(3.0)) == doctest::Approx(1.0).epsilon(1e-12));
  for (double x : {0.1, 2.0, 30.0}) {
    CHECK(m.inverse(m.forward(x)) == doctest::Approx(x).epsilon(1e-10));
    const double h = 1e-6 * x;
    CHECK(m.forward_jacobian(x) == doctest::Approx((m.forward(x + h) - m.forward(x - h)) / (2 * h)).epsilon(1e-5));
  }
  CHECK(dilation(poly(), 1.0).forward(7.0) == doctest::Approx(7.0));
  CHECK_KIND(dilation(poly(), 0.0), ErrorKind::InvalidParams);
}

TEST_CASE("front tracking on phi fields") {
  const Grid1D g = Grid1D::make(1000.0, std::size_t{1} << 16);
  FrontTrack tr;
  for (double t : {5.0, 10.0, 15.0}) tr.append(poly(), t, phi_field(poly(), g, t));
  REQUIRE(tr.positions.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(tr.positions[i] == doctest::Approx(poly().inv_f(tr.times[i])).epsilon(1e-3));
    CHECK(tr.predicted[i] == doctest::Approx(poly().inv_f(tr.times[i])));
    CHECK(tr.lower[i] == doctest::Approx(poly().inv_J(std::exp(-0.8 * tr.times[i]))));
    CHECK(tr.upper[i] == doctest::Approx(poly().inv_J(std::exp(-2.0 * tr.times[i]))));
  }
}

TEST_CASE("Hopf-Cole slice of the envelope") {
  // n = phi(t/eps, .) gives u_eps = eps ln(1 + e^{(f(x) - t)/eps}), within
  // eps ln 2 of max(f(x) - t, 0).
  const Grid1D g = Grid1D::make(1000.0, std::size_t{1} << 18);
  const double eps = 0.2;
  const double t = 1.0;
  std::vector<double> xs;
  for (int i = 0; i <= 50; ++i) xs.push_back(0.5 + 0.05 * i);
  const auto slice = hopf_cole_slice(subexp(), phi_field(subexp(), g, t / eps), eps, t, xs, 900.0);
  REQUIRE(slice.size() == xs.size());
  for (const auto& s : slice) {
    CHECK(s.u_limit == doctest::Approx(std::max(subexp().f(s.x) - t, 0.0)));
    CHECK(s.abs_err <= eps * std::log(2.0) + 1e-3);
    CHECK_FALSE(s.floored);
  }
  CHECK(hopf_cole_error(slice) <= eps * std::log(2.0) + 1e-3);
  CHECK_KIND(hopf_cole_slice(subexp(), phi_field(subexp(), g, t / eps), eps, t, xs, 5.0), ErrorKind::OutOfDomain);
}
