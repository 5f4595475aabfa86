#include "kr5/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kr5 {

double BranchingRatio::as_double() const {
  switch (kind) {
    case Kind::Finite:
      return value;
    case Kind::Infinite:
      return std::numeric_limits<double>::infinity();
    case Kind::Indeterminate:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string BranchingRatio::to_string() const {
  switch (kind) {
    case Kind::Finite: {
      std::ostringstream os;
      os.precision(12);
      os << value;
      return os.str();
    }
    case Kind::Infinite:
      return "inf";
    case Kind::Indeterminate:
      break;
  }
  return "indeterminate";
}

PulseSet PulseSet::standard(double p, double s3, double s4, double b3, double b4) {
  PulseSet ps;
  ps.pump.peak = p;
  ps.stokes3.peak = s3;
  ps.stokes4.peak = s4;
  ps.branch3.peak = b3;
  ps.branch4.peak = b4;
  return ps;
}

double PulseSet::max_peak() const {
  return std::max({pump.peak, stokes3.peak, stokes4.peak, branch3.peak, branch4.peak});
}

BranchingRatio PulseSet::dark_branching() const {
  const double num = branch4.peak * branch4.peak;
  const double den = branch3.peak * branch3.peak;
  if (den == 0.0) return num == 0.0 ? BranchingRatio::indeterminate() : BranchingRatio::infinite();
  return BranchingRatio::finite(num / den);
}

void PulseSet::validate() const {
  const std::pair<const char*, const Pulse*> all[] = {
      {"pump", &pump}, {"stokes3", &stokes3}, {"stokes4", &stokes4},
      {"branch3", &branch3}, {"branch4", &branch4}};
  for (const auto& [name, pulse] : all) {
    if (!(pulse->peak >= 0.0) || !std::isfinite(pulse->peak))
      throw ValidationError(std::string(name) + " peak must be >= 0");
    if (!(pulse->envelope.width > 0.0))
      throw ValidationError(std::string(name) + " envelope width must be > 0");
    if (!(pulse->envelope.prefactor > 0.0))
      throw ValidationError(std::string(name) + " envelope prefactor must be > 0");
  }
}

RabiValues envelopes(double xi, const PulseSet& pulses) {
  return {pulses.pump(xi), pulses.stokes3(xi), pulses.stokes4(xi), pulses.branch3(xi),
          pulses.branch4(xi)};
}

double omega_sb(double xi, const PulseSet& pulses) { return envelopes(xi, pulses).omega_sb(); }

void SimConfig::validate(const PulseSet& pulses) const {
  pulses.validate();
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be >= 0");
  if (!(product_decay[0] >= 0.0) || !(product_decay[1] >= 0.0))
    throw ValidationError("product_decay rates must be >= 0");
  if (!(window.start < window.end)) throw ValidationError("window start must be < window end");
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
  if (!(max_step > 0.0)) throw ValidationError("max_step must be > 0");
  if (output_samples < 2) throw ValidationError("output_samples must be >= 2");
  if (!(dephasing.delta >= 0.0)) throw ValidationError("dephasing delta must be >= 0");
  if (!(dephasing.tau >= 0.0)) throw ValidationError("dephasing tau must be >= 0");
  if (dephasing.realizations < 1) throw ValidationError("dephasing realizations must be >= 1");
  if (!(dephasing.refresh_fraction > 0.0) || dephasing.refresh_fraction > 1.0)
    throw ValidationError("dephasing refresh_fraction must be in (0, 1]");

  const std::pair<const char*, const Pulse*> all[] = {
      {"pump", &pulses.pump}, {"stokes3", &pulses.stokes3}, {"stokes4", &pulses.stokes4},
      {"branch3", &pulses.branch3}, {"branch4", &pulses.branch4}};
  for (const auto& [name, pulse] : all) {
    for (double edge : {window.start, window.end}) {
      if (pulse->envelope(edge) >= 1e-6)
        throw ValidationError(std::string(name) +
                              " envelope must be below 1e-6 of peak at both window endpoints");
    }
  }
}

StateVector decay_diagonal(const SimConfig& config) {
  StateVector d{};
  d[2] = Complex(0.0, -config.product_decay[0]);
  d[3] = Complex(0.0, -config.product_decay[1]);
  d[4] = Complex(0.0, -config.gamma);
  return d;
}

Matrix5d resonant_hamiltonian(const RabiValues& r) {
  Matrix5d h = Matrix5d::Zero();
  h(0, 1) = h(1, 0) = r.p;
  h(1, 2) = h(2, 1) = r.s3;
  h(1, 3) = h(3, 1) = r.s4;
  h(2, 4) = h(4, 2) = r.b3;
  h(3, 4) = h(4, 3) = r.b4;
  return h;
}

Matrix5c assemble_hamiltonian(double xi, const PulseSet& pulses, const SimConfig& config,
                              std::span<const double> dephasing) {
  if (!dephasing.empty() && dephasing.size() != kLevels)
    throw ValidationError("dephasing diagonal must have exactly 5 entries");
  Matrix5c h = resonant_hamiltonian(envelopes(xi, pulses)).cast<Complex>();
  const StateVector d = decay_diagonal(config);
  for (int k = 0; k < kLevels; ++k) {
    h(k, k) += d[k];
    if (!dephasing.empty()) h(k, k) += dephasing[k];
  }
  return h;
}

}  // namespace kr5
