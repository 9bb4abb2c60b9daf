#include "fatkpp/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "fatkpp/errors.hpp"

namespace fatkpp {
namespace {

constexpr unsigned kMaxDepth = 15;
constexpr double kPanelTol = 1e-13;
constexpr double kMaxTruncation = 1e300;

struct Panel {
  double value;
  double error;
};

Panel integrate_panel(const Integrand& g, double a, double b) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, kMaxDepth, kPanelTol,
                                                                    &error);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite panel integral on [" << a << ", " << b << "]";
    raise(ErrorKind::NoConvergence, msg.str());
  }
  return {value, error};
}

// Breakpoints a, a+1, a+2, a+4, ...; the final panel ends at b.
double next_breakpoint(double a, double current) {
  const double width = std::max(1.0, current - a);
  return a + 2.0 * width;
}

}  // namespace

QuadratureResult adaptive_integrate(const Integrand& g, double a, double b,
                                    const std::optional<TailBound>& tail,
                                    QuadratureTolerance tol) {
  if (!(b >= a)) {
    raise(ErrorKind::DomainError, "adaptive_integrate requires a <= b");
  }
  QuadratureResult result;
  if (a == b) return result;

  const bool infinite = std::isinf(b);
  if (infinite && !tail) {
    raise(ErrorKind::NoConvergence, "an infinite upper limit needs an analytic tail bound");
  }

  auto budget = [&](double value) { return tol.abs + tol.rel * std::abs(value); };

  double lo = a;
  double hi = std::min(b, a + 1.0);
  while (true) {
    const Panel panel = integrate_panel(g, lo, hi);
    result.value += panel.value;
    result.error += panel.error;
    if (!infinite && hi >= b) break;
    if (infinite && lo == a) {
      // The integral is at most value + tail(hi); give up at once if even the
      // last breakpoint cannot bring the remainder under that budget.
      const double last = (*tail)(kMaxTruncation);
      if (!(last <= 0.1 * budget(std::abs(result.value) + (*tail)(hi)))) {
        std::ostringstream msg;
        msg << "tail decays too slowly: bound " << last << " at B = " << kMaxTruncation;
        raise(ErrorKind::NoConvergence, msg.str());
      }
    }
    if (infinite) {
      const double remainder = (*tail)(hi);
      if (remainder <= 0.1 * budget(result.value)) {
        result.error += remainder;
        break;
      }
      if (hi >= kMaxTruncation) {
        std::ostringstream msg;
        msg << "tail bound " << remainder << " still above tolerance at B = " << hi;
        raise(ErrorKind::NoConvergence, msg.str());
      }
    }
    lo = hi;
    hi = std::min(b, next_breakpoint(a, hi));
  }

  if (!(result.error <= budget(result.value))) {
    std::ostringstream msg;
    msg << "error estimate " << result.error << " exceeds tolerance " << budget(result.value);
    raise(ErrorKind::NoConvergence, msg.str());
  }
  return result;
}

}  // namespace fatkpp
