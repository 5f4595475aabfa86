#pragma once

// Elementwise kernels on the hot data-parallel loops: population series,
// ensemble moment reduction and the four-lane OU recurrence. Each kernel has
// a scalar reference and an AVX2 variant; the variant is picked once at
// startup. Every kernel is a sequence of correctly-rounded IEEE operations in
// a fixed order with no fused multiply-add, so all variants agree bitwise.

#include <cstddef>
#include <span>

namespace kr5::kernels {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);

struct KernelTable {
  Isa isa;
  /// out[i] = re[i]^2 + im[i]^2
  void (*squared_magnitude)(const double* re, const double* im, double* out, std::size_t n);
  /// dst[i] += src[i]
  void (*add_assign)(double* dst, const double* src, std::size_t n);
  /// sum[i] += x[i]; sumsq[i] += x[i]^2
  void (*accumulate_moments)(const double* x, double* sum, double* sumsq, std::size_t n);
  /// mean = sum/count; stderr = sqrt(max(0, (sumsq - sum*mean)/(count-1)) / count); count > 1
  void (*finalize_moments)(const double* sum, const double* sumsq, double count, double* mean,
                           double* stderr_out, std::size_t n);
  /// Four interleaved lanes: path[4(j+1)+l] = path[4j+l]*decay + scale*z[4j+l], j < steps.
  void (*ou_recurrence)(double* path, const double* z, std::size_t steps, double decay,
                        double scale);
};

const KernelTable& scalar_table();
/// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_table();

/// The table in use: AVX2 when available unless KR5_SIMD=scalar is set.
const KernelTable& active();

void squared_magnitude(std::span<const double> re, std::span<const double> im,
                       std::span<double> out);
void add_assign(std::span<double> dst, std::span<const double> src);
void accumulate_moments(std::span<const double> x, std::span<double> sum,
                        std::span<double> sumsq);
void finalize_moments(std::span<const double> sum, std::span<const double> sumsq, double count,
                      std::span<double> mean, std::span<double> stderr_out);
void ou_recurrence(std::span<double> path, std::span<const double> z, double decay, double scale);

}  // namespace kr5::kernels
