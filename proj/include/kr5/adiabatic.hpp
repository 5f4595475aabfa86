#pragma once

// Reduced dynamics in the {|lambda_1>, |lambda_2'>} subspace for strong
// measurement, and the interference formula for the final branching ratio.

#include <vector>

#include "kr5/model.hpp"
#include "kr5/spectrum.hpp"

namespace kr5 {

/// Nonadiabatic coupling between |lambda_1> and |lambda_2'> per unit xi:
///   -2 P Omega_SB (S3 B3 + S4 B4) / (N_1 N_2').
/// In the gauge of the closed-form vectors this equals <d lambda_1/dxi | lambda_2'>.
double coupling_o21(const RabiValues& r, double gamma);
double coupling_o21(double xi, const PulseSet& pulses, double gamma);

struct TwoLevelState {
  double xi = 0.0;
  Complex c1{1.0, 0.0};
  Complex c2{0.0, 0.0};
};

struct TwoLevelOptions {
  double tolerance = 1e-9;
  double max_step = 0.05;
  int samples = 2000;
  /// false drops the -i lambda_2' term (pure rotation, norm conserving).
  bool absorption = true;
};

struct TwoLevelResult {
  TwoLevelState final;
  std::vector<TwoLevelState> series;
  std::size_t steps = 0;
};

/// Integrates dC1/dxi = O21 C2, dC2/dxi = -i lambda_2' C2 - O21 C1 from C1 = 1, C2 = 0.
TwoLevelResult integrate_two_level(const PulseSet& pulses, double gamma, const Window& window,
                                   const TwoLevelOptions& options = {});

/// Interference formula for B from final C1, C2 and the peak branch amplitudes.
/// Infinite when only the denominator vanishes, indeterminate for 0/0.
BranchingRatio branching_ratio_theory(Complex c1, Complex c2, const PulseSet& pulses);

enum class Regime { Adiabatic, Intermediate, Zeno };

const char* to_string(Regime r);

/// Adiabatic if (Omega T)^2 > ratio*Gamma T, Zeno if (Omega T)^2 < Gamma T / ratio,
/// with Omega the largest peak amplitude.
Regime classify_regime(const PulseSet& pulses, double gamma, double ratio = 10.0);

}  // namespace kr5
