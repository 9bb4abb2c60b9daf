#pragma once

#include <functional>
#include <optional>

namespace fatkpp {

using Integrand = std::function<double(double)>;

/// Maps a truncation point B to an upper bound on the remainder
/// \f$\int_B^\infty |g|\f$. Returns +inf while B is too small for the bound
/// to be valid.
using TailBound = std::function<double(double)>;

struct QuadratureTolerance {
  double abs = 1e-10;
  double rel = 1e-8;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate plus the tail remainder bound
};

/// Adaptive Gauss-Kronrod integration of g over [a, b].
///
/// The interval is cut into panels whose widths double away from `a`, which
/// keeps slowly decaying integrands well resolved over many decades. When
/// `b` is +inf a tail bound is mandatory: panels are added until the bound
/// falls below a tenth of the requested tolerance, and the bound is folded
/// into the reported error.
///
/// Throws Error(NoConvergence) when the requested accuracy is not met.
QuadratureResult adaptive_integrate(const Integrand& g, double a, double b,
                                    const std::optional<TailBound>& tail = std::nullopt,
                                    QuadratureTolerance tol = {});

}  // namespace fatkpp
