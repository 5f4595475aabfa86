#include "kr5/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace kr5 {

namespace {

constexpr double kDegenerateDiscriminant = 1e-12;
constexpr double kVanishingVector = 1e-10;

double residual_of(const Matrix5c& h, const Complex& value, const Vector5c& v) {
  return (h * v - value * v).norm();
}

// Numeric fallback for H_r when the closed-form vectors are unusable.
void fill_from_oracle(const RabiValues& r, HrSpectrum& out) {
  Eigen::SelfAdjointEigenSolver<Matrix5d> solver(resonant_hamiltonian(r));
  const auto& w = solver.eigenvalues();
  const auto& v = solver.eigenvectors();
  // Ascending: -sqrt(large), -sqrt(small), 0, +sqrt(small), +sqrt(large).
  const int slot[4] = {1, 3, 0, 4};
  for (int m = 0; m < 4; ++m) {
    HrMode& mode = out.modes[m];
    mode.lambda = w(slot[m]);
    mode.lambda_sq = mode.lambda * mode.lambda;
    mode.vector = v.col(slot[m]);
    mode.norm = std::numeric_limits<double>::quiet_NaN();
    mode.branch_weight = mode.vector(4) * mode.vector(4);
  }
  out.provenance = Provenance::NumericOracle;
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::AnalyticHr:
      return "analytic-Hr";
    case Provenance::StrongPerturbative:
      return "strong-perturbative";
    case Provenance::WeakPerturbative:
      return "weak-perturbative";
    case Provenance::NumericOracle:
      break;
  }
  return "numeric-oracle";
}

Vector5d null_eigenvector(const RabiValues& r) {
  Vector5d v;
  v << r.omega_sb(), 0.0, -r.p * r.b4, r.p * r.b3, 0.0;
  const double n = v.norm();
  if (!(n > 0.0))
    throw DegenerateInput("null eigenvector undefined: Omega_SB and Omega_P*(B3, B4) all vanish");
  return v / n;
}

Vector5d null_eigenvector(double xi, const PulseSet& pulses) {
  return null_eigenvector(envelopes(xi, pulses));
}

HrSpectrum hr_spectrum(const RabiValues& r) {
  HrSpectrum out;
  const double m2 = r.sum_of_squares();
  const double sb = r.omega_sb();
  const double q = sb * sb + r.p * r.p * (r.b3 * r.b3 + r.b4 * r.b4);
  double disc = m2 * m2 - 4.0 * q;
  out.discriminant = disc;
  if (disc < kDegenerateDiscriminant * m2 * m2) {
    out.degenerate = true;
    disc = std::max(disc, 0.0);
  }
  const double root = std::sqrt(disc);
  out.lambda_sq_large = 0.5 * (m2 + root);
  // Product of the branches is q; avoids cancellation in (m2 - root).
  out.lambda_sq_small = out.lambda_sq_large > 0.0 ? q / out.lambda_sq_large : 0.0;

  try {
    out.null_vector = null_eigenvector(r);
  } catch (const DegenerateInput&) {
    out.degenerate = true;
  }

  const double overlap = r.stokes_branch_overlap();
  const double b_sq = r.b3 * r.b3 + r.b4 * r.b4;
  const double scale = m2 * std::sqrt(m2);
  const double branches[2] = {out.lambda_sq_small, out.lambda_sq_large};
  for (int m = 0; m < 4; ++m) {
    HrMode& mode = out.modes[m];
    mode.lambda_sq = branches[m / 2];
    mode.lambda = (m % 2 == 0 ? -1.0 : 1.0) * std::sqrt(mode.lambda_sq);
    const double l = mode.lambda;
    const double l2 = mode.lambda_sq;
    Vector5d v;
    v << r.p * (l2 - b_sq), l * (l2 - b_sq), r.s3 * l2 - r.b4 * sb, r.s4 * l2 + r.b3 * sb,
        l * overlap;
    mode.norm = v.norm();
    if (!(mode.norm > kVanishingVector * scale)) {
      out.degenerate = true;
      break;
    }
    mode.vector = v / mode.norm;
    mode.branch_weight = l2 * overlap * overlap / (mode.norm * mode.norm);
  }

  if (out.degenerate) {
    fill_from_oracle(r, out);
    if (out.null_vector.isZero()) {
      Eigen::SelfAdjointEigenSolver<Matrix5d> solver(resonant_hamiltonian(r));
      out.null_vector = solver.eigenvectors().col(2);
    }
  }
  return out;
}

HrSpectrum hr_spectrum(double xi, const PulseSet& pulses) {
  return hr_spectrum(envelopes(xi, pulses));
}

EigenSystem HrSpectrum::as_eigensystem() const {
  EigenSystem es;
  es.provenance = provenance;
  es.values[0] = 0.0;
  es.vectors[0] = null_vector.cast<Complex>();
  for (int m = 0; m < 4; ++m) {
    es.values[m + 1] = modes[m].lambda;
    es.vectors[m + 1] = modes[m].vector.cast<Complex>();
  }
  return es;
}

StrongPair strong_limit_pair(const RabiValues& r, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("strong-measurement pair requires gamma > 0");
  const double sb = r.omega_sb();
  const double k = r.p * r.p * (r.b3 * r.b3 + r.b4 * r.b4) + sb * sb;
  Vector5c v;
  v << r.p * (r.s4 * r.b4 + r.s3 * r.b3), 0.0,
      r.s3 * r.s4 * r.b4 - r.b3 * (r.p * r.p + r.s4 * r.s4),
      r.s3 * r.s4 * r.b3 - r.b4 * (r.p * r.p + r.s3 * r.s3), Complex(0.0, k / gamma);
  StrongPair out;
  out.norm = v.norm();
  if (!(out.norm > 0.0)) throw DegenerateInput("strong-measurement eigenvector vanishes");
  out.vector = v / out.norm;
  out.lambda = Complex(0.0, -k * k / (gamma * out.norm * out.norm));
  const double peak = std::max({r.p, r.s3, r.s4, r.b3, r.b4});
  out.in_regime = gamma >= 10.0 * peak;
  return out;
}

StrongPair strong_limit_pair(double xi, const PulseSet& pulses, double gamma) {
  StrongPair out = strong_limit_pair(envelopes(xi, pulses), gamma);
  out.in_regime = gamma >= 10.0 * pulses.max_peak();
  return out;
}

WeakSpectrum weak_limit_spectrum(double xi, const PulseSet& pulses, double gamma) {
  const HrSpectrum hr = hr_spectrum(xi, pulses);
  WeakSpectrum out;
  out.degenerate = hr.degenerate;
  out.in_regime = 10.0 * gamma <= pulses.max_peak();
  for (int m = 0; m < 4; ++m) {
    // branch_weight = lambda_k^2 (B3 S3 + B4 S4)^2 / N_k^2
    out.values[m] = Complex(hr.modes[m].lambda, -gamma * hr.modes[m].branch_weight);
  }
  return out;
}

double branching_deviation(double xi, const PulseSet& pulses, int mode) {
  if (mode < 0 || mode > 3) throw ValidationError("mode index must be in [0, 3]");
  const RabiValues r = envelopes(xi, pulses);
  if (r.b3 == 0.0) throw SingularDenominator("branching deviation: Omega_B3 vanishes");
  const HrSpectrum hr = hr_spectrum(r);
  const double l2 = hr.modes[mode].lambda_sq;
  const double sb = r.omega_sb();
  const double den = l2 * r.s4 + r.b3 * sb;
  // Cancellation down to rounding means the closed-form mode does not exist
  // (e.g. the branch pair decouples when S3 B3 + S4 B4 = 0).
  if (std::abs(den) <= 1e-10 * (std::abs(l2 * r.s4) + std::abs(r.b3 * sb)))
    throw SingularDenominator("branching deviation: lambda_k^2*Omega_S4 + Omega_B3*Omega_SB vanishes");
  const double num = l2 * r.s3 - r.b4 * sb;
  return (num * num) / (den * den) - (r.b4 * r.b4) / (r.b3 * r.b3);
}

EigenSystem numeric_oracle(const Matrix5c& h) {
  if (!h.allFinite()) throw Error("numeric oracle: matrix has non-finite entries");
  Eigen::ComplexEigenSolver<Matrix5c> solver(h, true);
  if (solver.info() != Eigen::Success) throw Error("numeric oracle: eigensolver did not converge");
  EigenSystem es;
  es.provenance = Provenance::NumericOracle;
  for (int k = 0; k < kLevels; ++k) {
    es.values[k] = solver.eigenvalues()(k);
    Vector5c v = solver.eigenvectors().col(k);
    es.vectors[k] = v / v.norm();
    es.residual = std::max(es.residual, residual_of(h, es.values[k], es.vectors[k]));
  }
  const double scale = h.norm();
  if (es.residual > 1e-10 * scale) {
    std::ostringstream os;
    os << "numeric oracle: residual " << es.residual << " exceeds 1e-10*|H| = " << 1e-10 * scale;
    throw Error(os.str());
  }
  return es;
}

}  // namespace kr5
