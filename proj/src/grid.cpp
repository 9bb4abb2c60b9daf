#include "fatkpp/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <sstream>

#include "fatkpp/errors.hpp"

namespace fatkpp {
namespace {

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double fft_cost(std::size_t n) {
  return static_cast<double>(n) * std::log2(static_cast<double>(n));
}

}  // namespace

Grid1D Grid1D::make(double L, std::size_t N) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    raise(ErrorKind::InvalidParams, "grid half-width L must be positive and finite");
  }
  if (N < 16 || !is_power_of_two(N)) {
    raise(ErrorKind::InvalidParams, "grid size N must be a power of two >= 16");
  }
  return Grid1D{L, N};
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(N);
  for (std::size_t i = 0; i < N; ++i) xs[i] = x(i);
  return xs;
}

Field Field::zeros(const Grid1D& grid) { return constant(grid, 0.0); }

Field Field::constant(const Grid1D& grid, double value) {
  return Field{grid, std::vector<double>(grid.N, value)};
}

Field Field::from_function(const Grid1D& grid, const std::function<double(double)>& g) {
  Field out = zeros(grid);
  for (std::size_t i = 0; i < grid.N; ++i) out.values[i] = g(grid.x(i));
  return out;
}

double Field::interpolate(double x) const {
  const double dx = grid.dx();
  const double s = (x + grid.L) / dx;
  const double last = static_cast<double>(grid.N - 1);
  if (!(s >= 0.0 && s <= last)) {
    std::ostringstream msg;
    msg << "x = " << x << " lies outside the grid";
    raise(ErrorKind::OutOfDomain, msg.str());
  }
  const auto i = std::min(static_cast<std::size_t>(s), grid.N - 2);
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t p2 = 1; p2 < best; p2 *= 2) {
    for (std::size_t p3 = p2; p3 < best; p3 *= 3) {
      for (std::size_t p5 = p3; p5 < best; p5 *= 5) {
        for (std::size_t p7 = p5; p7 < best; p7 *= 7) {
          if (p7 >= n) {
            best = p7;
            break;
          }
        }
      }
    }
    if (p2 >= n) break;
  }
  return best;
}

struct DiscreteKernel::Plan {
  std::size_t size = 0;   // transform length
  std::size_t block = 0;  // input samples per segment
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ComplexBuffer spectrum;  // kernel spectrum scaled by 1/size

  Plan() = default;
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

// Segment length: the cheapest power of two >= 2K, preferring the smallest
// one whose cost is within 25% of the optimum. A single transform over the
// whole padded field is used when that is no more expensive.
std::pair<std::size_t, std::size_t> choose_layout(std::size_t n, std::size_t k) {
  const std::size_t full = next_fast_size(n + k - 1);
  std::vector<std::pair<std::size_t, double>> candidates;
  std::size_t p = 16;
  while (p < 2 * k) p *= 2;
  for (; p < full; p *= 2) {
    const std::size_t block = p - k + 1;
    const std::size_t segments = (n + block - 1) / block;
    candidates.emplace_back(p, static_cast<double>(segments) * fft_cost(p));
  }
  const double full_cost = fft_cost(full);
  double best = full_cost;
  for (const auto& [size, cost] : candidates) best = std::min(best, cost);
  for (const auto& [size, cost] : candidates) {
    if (cost <= 1.25 * best && cost < 1.25 * full_cost) return {size, size - k + 1};
  }
  return {full, n};
}

}  // namespace

DiscreteKernel::DiscreteKernel(const Grid1D& grid, std::vector<double> samples, double tail_mass)
    : grid_(grid), samples_(std::move(samples)), tail_mass_(tail_mass) {
  const std::size_t k = samples_.size();
  auto plan = std::make_shared<Plan>();
  std::tie(plan->size, plan->block) = choose_layout(grid_.N, k);
  const std::size_t size = plan->size;
  const std::size_t bins = size / 2 + 1;

  RealBuffer real = alloc_real(size);
  plan->spectrum = alloc_complex(bins);
  {
    std::lock_guard lock(planner_mutex());
    plan->forward = fftw_plan_dft_r2c_1d(static_cast<int>(size), real.get(),
                                         plan->spectrum.get(), FFTW_ESTIMATE);
    plan->backward = fftw_plan_dft_c2r_1d(static_cast<int>(size), plan->spectrum.get(),
                                          real.get(), FFTW_ESTIMATE);
  }
  if (!plan->forward || !plan->backward) raise(ErrorKind::NoConvergence, "FFTW planning failed");

  std::fill(real.get(), real.get() + size, 0.0);
  std::copy(samples_.begin(), samples_.end(), real.get());
  fftw_execute_dft_r2c(plan->forward, real.get(), plan->spectrum.get());
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < bins; ++i) {
    plan->spectrum[i][0] *= scale;
    plan->spectrum[i][1] *= scale;
  }
  plan_ = std::move(plan);
}

namespace {

std::vector<double> mirror_and_normalize(std::vector<double> half) {
  const std::size_t m = half.size() - 1;
  std::vector<double> full(2 * m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    full[m + j] = half[j];
    full[m - j] = half[j];
  }
  // Sum from the smallest terms inward so the normalization is as exact as
  // double arithmetic allows.
  double sum = full[m];
  double tail = 0.0;
  for (std::size_t j = m; j >= 1; --j) tail += 2.0 * half[j];
  sum += tail;
  if (!(sum > 0.0)) raise(ErrorKind::InvalidParams, "discrete kernel has no mass");
  for (double& w : full) w /= sum;
  return full;
}

}  // namespace

DiscreteKernel DiscreteKernel::from_kernel(const Kernel& kernel, const Grid1D& grid,
                                           double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
    raise(ErrorKind::InvalidParams, "tail_tol must lie in (0,1)");
  }
  const double cap = 2.0 * grid.L;
  double radius = cap;
  if (kernel.tail_mass(cap) <= tail_tol) {
    double lo = 0.0;
    double hi = cap;
    while (hi - lo > 1e-6 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (kernel.tail_mass(mid) <= tail_tol) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    radius = hi;
  }
  const double dx = grid.dx();
  const auto m = std::min(static_cast<std::size_t>(std::ceil(radius / dx)), grid.N);
  std::vector<double> half(m + 1);
  for (std::size_t j = 0; j <= m; ++j) half[j] = kernel.density(static_cast<double>(j) * dx) * dx;
  return DiscreteKernel(grid, mirror_and_normalize(std::move(half)),
                        kernel.tail_mass(static_cast<double>(m) * dx));
}

DiscreteKernel DiscreteKernel::from_density(const Grid1D& grid,
                                            const std::function<double(double)>& density,
                                            double radius, double lost_mass) {
  if (!(radius >= 0.0)) raise(ErrorKind::InvalidParams, "kernel radius must be >= 0");
  const double dx = grid.dx();
  const auto m =
      std::min(static_cast<std::size_t>(std::ceil(std::min(radius, 2.0 * grid.L) / dx)), grid.N);
  std::vector<double> half(m + 1);
  for (std::size_t j = 0; j <= m; ++j) half[j] = density(static_cast<double>(j) * dx) * dx;
  return DiscreteKernel(grid, mirror_and_normalize(std::move(half)), lost_mass);
}

std::size_t DiscreteKernel::segment_length() const { return plan_->block; }

DiscreteKernel DiscreteKernel::delta(const Grid1D& grid) {
  return DiscreteKernel(grid, {1.0}, 0.0);
}

Field convolve(const DiscreteKernel& kernel, const Field& field) {
  if (!(kernel.grid() == field.grid) || field.values.size() != field.grid.N) {
    raise(ErrorKind::GridMismatch, "kernel and field live on different grids");
  }
  const auto& plan = *kernel.plan_;
  const std::size_t n = field.grid.N;
  const std::size_t m = kernel.half_width();
  const std::size_t size = plan.size;
  const std::size_t bins = size / 2 + 1;

  Field out = Field::zeros(field.grid);
  RealBuffer real = alloc_real(size);
  ComplexBuffer spec = alloc_complex(bins);
  bool nonnegative = true;

  for (std::size_t start = 0; start < n; start += plan.block) {
    const std::size_t len = std::min(plan.block, n - start);
    std::fill(real.get(), real.get() + size, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < len; ++i) {
      const double v = field.values[start + i];
      real[i] = v;
      any = any || v != 0.0;
      nonnegative = nonnegative && v >= 0.0;
    }
    if (!any) continue;
    fftw_execute_dft_r2c(plan.forward, real.get(), spec.get());
    for (std::size_t i = 0; i < bins; ++i) {
      const double a = spec[i][0];
      const double b = spec[i][1];
      const double c = plan.spectrum[i][0];
      const double d = plan.spectrum[i][1];
      spec[i][0] = a * c - b * d;
      spec[i][1] = a * d + b * c;
    }
    fftw_execute_dft_c2r(plan.backward, spec.get(), real.get());
    // Linear index q of the segment output maps to out[start + q - m].
    const std::size_t produced = len + 2 * m;
    for (std::size_t q = 0; q < produced; ++q) {
      const std::ptrdiff_t target = static_cast<std::ptrdiff_t>(start + q) -
                                    static_cast<std::ptrdiff_t>(m);
      if (target < 0) continue;
      if (target >= static_cast<std::ptrdiff_t>(n)) break;
      out.values[static_cast<std::size_t>(target)] += real[q];
    }
  }
  if (nonnegative) {
    for (double& v : out.values) v = std::max(v, 0.0);
  }
  return out;
}

Field convolve_direct(const DiscreteKernel& kernel, const Field& field) {
  if (!(kernel.grid() == field.grid)) {
    raise(ErrorKind::GridMismatch, "kernel and field live on different grids");
  }
  const auto n = static_cast<std::ptrdiff_t>(field.grid.N);
  const auto m = static_cast<std::ptrdiff_t>(kernel.half_width());
  const auto& w = kernel.samples();
  Field out = Field::zeros(field.grid);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = -m; j <= m; ++j) {
      const std::ptrdiff_t src = i - j;
      if (src < 0 || src >= n) continue;
      acc += w[static_cast<std::size_t>(j + m)] * field.values[static_cast<std::size_t>(src)];
    }
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace fatkpp
