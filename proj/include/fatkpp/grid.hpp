#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "fatkpp/kernel.hpp"

namespace fatkpp {

/// Uniform grid x_i = -L + i dx, i = 0..N-1, dx = 2L/N. Node N/2 sits at 0.
struct Grid1D {
  double L = 1.0;
  std::size_t N = 16;

  /// Validating constructor: N a power of two, N >= 16, L > 0.
  static Grid1D make(double L, std::size_t N);

  double dx() const { return 2.0 * L / static_cast<double>(N); }
  double x(std::size_t i) const { return -L + static_cast<double>(i) * dx(); }
  std::size_t center() const { return N / 2; }
  std::vector<double> nodes() const;

  bool operator==(const Grid1D& other) const = default;
};

struct Field {
  Grid1D grid;
  std::vector<double> values;

  static Field zeros(const Grid1D& grid);
  static Field constant(const Grid1D& grid, double value);
  static Field from_function(const Grid1D& grid, const std::function<double(double)>& g);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  /// Linear interpolation between nodes; OutOfDomain outside [x_0, x_{N-1}].
  double interpolate(double x) const;
  bool all_finite() const;
};

/// Symmetric convolution weights w_j, |j| <= M, on a fixed grid. The FFT of
/// the zero-padded weights is computed once and shared between copies.
class DiscreteKernel {
 public:
  /// Samples J(j dx)/Z * dx out to the smallest radius R whose tail mass is
  /// at most tail_tol (capped at 2L), mirrored and renormalized to sum 1.
  static DiscreteKernel from_kernel(const Kernel& kernel, const Grid1D& grid,
                                    double tail_tol = 1e-6);

  /// Same construction from an arbitrary even density evaluated at j dx for
  /// j dx <= radius. `lost_mass` is recorded as the truncated tail mass.
  static DiscreteKernel from_density(const Grid1D& grid,
                                     const std::function<double(double)>& density,
                                     double radius, double lost_mass);

  /// The identity weight (w_0 = 1).
  static DiscreteKernel delta(const Grid1D& grid);

  const Grid1D& grid() const { return grid_; }
  /// Weights w_{-M..M}, with index M at the origin.
  const std::vector<double>& samples() const { return samples_; }
  std::size_t half_width() const { return (samples_.size() - 1) / 2; }
  /// Truncation radius M dx.
  double radius() const { return static_cast<double>(half_width()) * grid_.dx(); }
  /// Continuous mass lost to truncation.
  double tail_mass() const { return tail_mass_; }
  /// Input samples per overlap-add segment (N when one transform covers the field).
  std::size_t segment_length() const;

  struct Plan;  // FFT layout and kernel spectrum

 private:
  DiscreteKernel(const Grid1D& grid, std::vector<double> samples, double tail_mass);

  Grid1D grid_;
  std::vector<double> samples_;
  double tail_mass_ = 0.0;
  std::shared_ptr<const Plan> plan_;

  friend Field convolve(const DiscreteKernel& kernel, const Field& field);
};

/// Linear (non-circular) convolution with zero exterior:
///   out_i = sum_j w_j field_{i-j}.
/// Segmented overlap-add: the round-off in out_i scales with the largest input
/// among the segments that reach i, not with the global maximum. Negative
/// outputs are clamped to 0 when the input is nonnegative.
Field convolve(const DiscreteKernel& kernel, const Field& field);

/// O(N K) reference implementation of convolve (no clamping).
Field convolve_direct(const DiscreteKernel& kernel, const Field& field);

/// Smallest n' >= n of the form 2^a 3^b 5^c 7^d.
std::size_t next_fast_size(std::size_t n);

}  // namespace fatkpp
