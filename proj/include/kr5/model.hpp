#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "kr5/types.hpp"

namespace kr5 {

/// Gaussian envelope exp[-prefactor * ((xi - center) / width)^2], xi = t/T.
struct Envelope {
  double center = 0.0;
  double width = 1.0;
  double prefactor = 1.0;

  double operator()(double xi) const {
    const double u = (xi - center) / width;
    return std::exp(-prefactor * u * u);
  }
};

struct Pulse {
  double peak = 0.0;  // peak Rabi frequency times T
  Envelope envelope;

  double operator()(double xi) const { return peak * envelope(xi); }
};

inline constexpr Envelope kPumpEnvelope{1.0, 1.0, 1.0};
inline constexpr Envelope kStokesEnvelope{0.0, 1.0, 1.0};
inline constexpr Envelope kBranchEnvelope{0.5, 1.0, 0.5};

/// The five laser couplings: pump 1-2, Stokes 2-3 and 2-4, branch 3-5 and 4-5.
struct PulseSet {
  Pulse pump{0.0, kPumpEnvelope};
  Pulse stokes3{0.0, kStokesEnvelope};
  Pulse stokes4{0.0, kStokesEnvelope};
  Pulse branch3{0.0, kBranchEnvelope};
  Pulse branch4{0.0, kBranchEnvelope};

  /// Peaks with the standard counter-intuitive envelopes.
  static PulseSet standard(double p, double s3, double s4, double b3, double b4);

  double max_peak() const;
  /// B1 = peak_B4^2 / peak_B3^2, the dark-state branching ratio.
  BranchingRatio dark_branching() const;
  void validate() const;
};

/// Instantaneous Rabi frequencies (times T) at one xi.
struct RabiValues {
  double p = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;

  double sum_of_squares() const { return p * p + s3 * s3 + s4 * s4 + b3 * b3 + b4 * b4; }
  double omega_sb() const { return s3 * b4 - s4 * b3; }
  /// S3*B3 + S4*B4; zero means the branch state decouples from every |lambda_k>.
  double stokes_branch_overlap() const { return s3 * b3 + s4 * b4; }
};

RabiValues envelopes(double xi, const PulseSet& pulses);
double omega_sb(double xi, const PulseSet& pulses);

struct Window {
  double start = -5.0;
  double end = 6.0;
  double length() const { return end - start; }
};

struct DephasingParams {
  double delta = 0.0;  // Delta*T
  double tau = 0.02;   // tau/T
  int realizations = 1000;
  std::uint64_t master_seed = 0;
  /// Noise grid spacing as a fraction of tau.
  double refresh_fraction = 0.1;
};

struct SimConfig {
  double gamma = 0.0;  // Gamma*T on the branch state
  std::array<double, 2> product_decay{0.0, 0.0};  // gamma3*T, gamma4*T
  Window window;
  double tolerance = 1e-9;
  double max_step = 0.05;
  int output_samples = 2000;
  DephasingParams dephasing;

  /// Throws ValidationError naming the first violated invariant.
  void validate(const PulseSet& pulses) const;
};

/// Constant anti-Hermitian diagonal: -i*gamma3, -i*gamma4, -i*Gamma on levels 3, 4, 5.
StateVector decay_diagonal(const SimConfig& config);

/// Full H(xi) in units of 1/T. `dephasing` is either empty or five real level shifts.
Matrix5c assemble_hamiltonian(double xi, const PulseSet& pulses, const SimConfig& config,
                              std::span<const double> dephasing = {});

/// The real-symmetric, zero-diagonal part H_r.
Matrix5d resonant_hamiltonian(const RabiValues& r);

/// y' = -i * H_r(r) * y, the coupling part of the Schroedinger equation.
inline void apply_couplings(const RabiValues& r, const StateVector& y, StateVector& dy) {
  const Complex mi{0.0, -1.0};
  dy[0] = mi * (r.p * y[1]);
  dy[1] = mi * (r.p * y[0] + r.s3 * y[2] + r.s4 * y[3]);
  dy[2] = mi * (r.s3 * y[1] + r.b3 * y[4]);
  dy[3] = mi * (r.s4 * y[1] + r.b4 * y[4]);
  dy[4] = mi * (r.b3 * y[2] + r.b4 * y[3]);
}

}  // namespace kr5
