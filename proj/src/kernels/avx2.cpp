#include "kr5/kernels.hpp"

#if defined(KR5_HAVE_AVX2)

#include <immintrin.h>

namespace kr5::kernels {

namespace {

void squared_magnitude_avx2(const double* re, const double* im, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(m, m)));
  }
  for (; i < n; ++i) {
    const double a = re[i] * re[i];
    const double b = im[i] * im[i];
    out[i] = a + b;
  }
}

void add_assign_avx2(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
  for (; i < n; ++i) dst[i] += src[i];
}

void accumulate_moments_avx2(const double* x, double* sum, double* sumsq, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(sum + i, _mm256_add_pd(_mm256_loadu_pd(sum + i), v));
    _mm256_storeu_pd(sumsq + i, _mm256_add_pd(_mm256_loadu_pd(sumsq + i), _mm256_mul_pd(v, v)));
  }
  for (; i < n; ++i) {
    sum[i] += x[i];
    const double sq = x[i] * x[i];
    sumsq[i] += sq;
  }
}

void finalize_moments_avx2(const double* sum, const double* sumsq, double count, double* mean,
                           double* stderr_out, std::size_t n) {
  const double dof = count - 1.0;
  const __m256d vcount = _mm256_set1_pd(count);
  const __m256d vdof = _mm256_set1_pd(dof);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_loadu_pd(sum + i);
    const __m256d m = _mm256_div_pd(s, vcount);
    const __m256d t = _mm256_mul_pd(s, m);
    __m256d v = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(sumsq + i), t), vdof);
    // v > 0 ? v : 0, matching the scalar select
    v = _mm256_and_pd(v, _mm256_cmp_pd(v, zero, _CMP_GT_OQ));
    _mm256_storeu_pd(mean + i, m);
    _mm256_storeu_pd(stderr_out + i, _mm256_sqrt_pd(_mm256_div_pd(v, vcount)));
  }
  for (; i < n; ++i) {
    const double m = sum[i] / count;
    const double t = sum[i] * m;
    double v = (sumsq[i] - t) / dof;
    v = v > 0.0 ? v : 0.0;
    mean[i] = m;
    stderr_out[i] = __builtin_sqrt(v / count);
  }
}

void ou_recurrence_avx2(double* path, const double* z, std::size_t steps, double decay,
                        double scale) {
  const __m256d vd = _mm256_set1_pd(decay);
  const __m256d vs = _mm256_set1_pd(scale);
  __m256d x = _mm256_loadu_pd(path);
  for (std::size_t j = 0; j < steps; ++j) {
    const __m256d a = _mm256_mul_pd(x, vd);
    const __m256d b = _mm256_mul_pd(vs, _mm256_loadu_pd(z + 4 * j));
    x = _mm256_add_pd(a, b);
    _mm256_storeu_pd(path + 4 * (j + 1), x);
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::Avx2,            squared_magnitude_avx2,
                                 add_assign_avx2,      accumulate_moments_avx2,
                                 finalize_moments_avx2, ou_recurrence_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

}  // namespace kr5::kernels

#else

namespace kr5::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace kr5::kernels

#endif
