#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "kr5/kernels.hpp"

namespace kr5::kernels {

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("KR5_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
  if (const KernelTable* t = avx2_table()) return *t;
  return scalar_table();
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

void squared_magnitude(std::span<const double> re, std::span<const double> im,
                       std::span<double> out) {
  require(re.size() == im.size() && out.size() == re.size(), "squared_magnitude: size mismatch");
  active().squared_magnitude(re.data(), im.data(), out.data(), out.size());
}

void add_assign(std::span<double> dst, std::span<const double> src) {
  require(dst.size() == src.size(), "add_assign: size mismatch");
  active().add_assign(dst.data(), src.data(), dst.size());
}

void accumulate_moments(std::span<const double> x, std::span<double> sum,
                        std::span<double> sumsq) {
  require(sum.size() == x.size() && sumsq.size() == x.size(), "accumulate_moments: size mismatch");
  active().accumulate_moments(x.data(), sum.data(), sumsq.data(), x.size());
}

void finalize_moments(std::span<const double> sum, std::span<const double> sumsq, double count,
                      std::span<double> mean, std::span<double> stderr_out) {
  require(sumsq.size() == sum.size() && mean.size() == sum.size() &&
              stderr_out.size() == sum.size(),
          "finalize_moments: size mismatch");
  require(count > 1.0, "finalize_moments: count must exceed 1");
  active().finalize_moments(sum.data(), sumsq.data(), count, mean.data(), stderr_out.data(),
                            sum.size());
}

void ou_recurrence(std::span<double> path, std::span<const double> z, double decay, double scale) {
  require(path.size() % 4 == 0 && path.size() >= 4, "ou_recurrence: path must hold 4 lanes");
  const std::size_t steps = path.size() / 4 - 1;
  require(z.size() >= 4 * steps, "ou_recurrence: too few normal draws");
  active().ou_recurrence(path.data(), z.data(), steps, decay, scale);
}

}  // namespace kr5::kernels
