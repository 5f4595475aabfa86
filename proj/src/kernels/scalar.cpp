#include <algorithm>
#include <cmath>

#include "kr5/kernels.hpp"

namespace kr5::kernels {

namespace {

void squared_magnitude_scalar(const double* re, const double* im, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = re[i] * re[i];
    const double b = im[i] * im[i];
    out[i] = a + b;
  }
}

void add_assign_scalar(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void accumulate_moments_scalar(const double* x, double* sum, double* sumsq, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    sum[i] += x[i];
    const double sq = x[i] * x[i];
    sumsq[i] += sq;
  }
}

void finalize_moments_scalar(const double* sum, const double* sumsq, double count, double* mean,
                             double* stderr_out, std::size_t n) {
  const double dof = count - 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = sum[i] / count;
    const double t = sum[i] * m;
    double v = (sumsq[i] - t) / dof;
    v = v > 0.0 ? v : 0.0;
    mean[i] = m;
    stderr_out[i] = std::sqrt(v / count);
  }
}

void ou_recurrence_scalar(double* path, const double* z, std::size_t steps, double decay,
                          double scale) {
  for (std::size_t j = 0; j < steps; ++j) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double a = path[4 * j + l] * decay;
      const double b = scale * z[4 * j + l];
      path[4 * (j + 1) + l] = a + b;
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar,           squared_magnitude_scalar,
                                 add_assign_scalar,     accumulate_moments_scalar,
                                 finalize_moments_scalar, ou_recurrence_scalar};
  return table;
}

}  // namespace kr5::kernels
