#pragma once

// Eigensystems of the five-level Hamiltonian: closed forms for H_r, the
// strong- and weak-measurement perturbative spectra, and a dense numeric
// oracle used to validate them.

#include "kr5/model.hpp"

namespace kr5 {

using Vector5d = Eigen::Matrix<double, kLevels, 1>;

enum class Provenance { AnalyticHr, StrongPerturbative, WeakPerturbative, NumericOracle };

const char* to_string(Provenance p);

struct EigenSystem {
  std::array<Complex, kLevels> values{};
  std::array<Vector5c, kLevels> vectors{};
  Provenance provenance = Provenance::NumericOracle;
  /// max_k |H v_k - lambda_k v_k| for the governing H.
  double residual = 0.0;
};

/// |lambda_1>: [Omega_SB, 0, -P*B4, P*B3, 0] normalized. Throws DegenerateInput if it vanishes.
Vector5d null_eigenvector(const RabiValues& r);
Vector5d null_eigenvector(double xi, const PulseSet& pulses);

/// One nonzero eigenpair of H_r.
struct HrMode {
  double lambda = 0.0;
  double lambda_sq = 0.0;
  Vector5d vector = Vector5d::Zero();
  /// N_k, the norm of the unnormalized closed-form vector (NaN on numeric fallback).
  double norm = 0.0;
  /// |<5|lambda_k>|^2 of the normalized vector.
  double branch_weight = 0.0;
};

/// Modes are ordered (smaller lambda^2 branch, -), (smaller, +), (larger, -), (larger, +).
struct HrSpectrum {
  std::array<HrMode, 4> modes{};
  Vector5d null_vector = Vector5d::Zero();
  double lambda_sq_small = 0.0;
  double lambda_sq_large = 0.0;
  double discriminant = 0.0;
  /// Branches collide or a closed-form vector vanished; modes come from the numeric oracle.
  bool degenerate = false;
  Provenance provenance = Provenance::AnalyticHr;

  EigenSystem as_eigensystem() const;
};

HrSpectrum hr_spectrum(const RabiValues& r);
HrSpectrum hr_spectrum(double xi, const PulseSet& pulses);

/// Strong-measurement pair (lambda_2', |lambda_2'>) for Gamma >> Omega.
struct StrongPair {
  Complex lambda;
  Vector5c vector = Vector5c::Zero();
  double norm = 0.0;  // N_2'
  bool in_regime = true;
};

StrongPair strong_limit_pair(const RabiValues& r, double gamma);
StrongPair strong_limit_pair(double xi, const PulseSet& pulses, double gamma);

struct WeakSpectrum {
  std::array<Complex, 4> values{};  // same order as HrSpectrum::modes
  bool degenerate = false;
  bool in_regime = true;
};

/// First-order shift of the four nonzero H_r eigenvalues by -i*Gamma on |5>.
WeakSpectrum weak_limit_spectrum(double xi, const PulseSet& pulses, double gamma);

/// Deviation of the branching ratio carried by mode `mode` (0..3) from B1.
double branching_deviation(double xi, const PulseSet& pulses, int mode);

/// Dense eigendecomposition of an arbitrary complex 5x5 matrix.
EigenSystem numeric_oracle(const Matrix5c& h);

}  // namespace kr5
