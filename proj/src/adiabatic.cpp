#include "kr5/adiabatic.hpp"

#include <cmath>

#include "kr5/integrator.hpp"

namespace kr5 {

namespace {

struct ReducedCoefficients {
  double o21;
  Complex lambda2;
};

ReducedCoefficients reduced_coefficients(const RabiValues& r, double gamma) {
  const double sb = r.omega_sb();
  const double n1 = std::sqrt(sb * sb + r.p * r.p * (r.b3 * r.b3 + r.b4 * r.b4));
  const StrongPair pair = strong_limit_pair(r, gamma);
  if (!(n1 > 0.0)) throw DegenerateInput("O21: normalization N1 vanishes");
  const double o21 = -2.0 * r.p * sb * r.stokes_branch_overlap() / (n1 * pair.norm);
  return {o21, pair.lambda};
}

}  // namespace

double coupling_o21(const RabiValues& r, double gamma) {
  return reduced_coefficients(r, gamma).o21;
}

double coupling_o21(double xi, const PulseSet& pulses, double gamma) {
  return coupling_o21(envelopes(xi, pulses), gamma);
}

TwoLevelResult integrate_two_level(const PulseSet& pulses, double gamma, const Window& window,
                                   const TwoLevelOptions& options) {
  if (!(gamma > 0.0)) throw ValidationError("two-level reduction requires gamma > 0");
  if (!(window.start < window.end)) throw ValidationError("window start must be < window end");
  if (options.samples < 2) throw ValidationError("samples must be >= 2");

  using State = LawsonDopri5<2>::State;
  const bool absorb = options.absorption;
  auto rhs = [&](double xi, const State& y, State& dy) {
    const ReducedCoefficients rc = reduced_coefficients(envelopes(xi, pulses), gamma);
    dy[0] = rc.o21 * y[1];
    dy[1] = -rc.o21 * y[0];
    if (absorb) dy[1] += Complex(0.0, -1.0) * rc.lambda2 * y[1];
  };

  LawsonDopri5<2> integrator;
  StepControl ctl;
  ctl.rtol = options.tolerance;
  ctl.atol = 1e-2 * options.tolerance;
  ctl.max_step = options.max_step;
  ctl.h = std::min(options.max_step, 0.1 / std::max(1.0, pulses.max_peak()));

  const auto samples = static_cast<std::size_t>(options.samples);
  const double dx = window.length() / static_cast<double>(samples - 1);
  TwoLevelResult out;
  out.series.reserve(samples);
  State y{Complex(1.0), Complex(0.0)};
  out.series.push_back({window.start, y[0], y[1]});
  double xi = window.start;
  for (std::size_t n = 1; n < samples; ++n) {
    const double next = n == samples - 1 ? window.end : window.start + static_cast<double>(n) * dx;
    integrator.advance(rhs, xi, next, y, ctl);
    xi = next;
    out.series.push_back({xi, y[0], y[1]});
  }
  out.final = out.series.back();
  out.steps = ctl.accepted;
  return out;
}

BranchingRatio branching_ratio_theory(Complex c1, Complex c2, const PulseSet& pulses) {
  const double b3 = pulses.branch3.peak;
  const double b4 = pulses.branch4.peak;
  const double a1 = std::norm(c1);
  const double a2 = std::norm(c2);
  const double cross = 2.0 * (c1 * std::conj(c2)).real();
  const double num = a1 * b4 * b4 + a2 * b3 * b3 + cross * b3 * b4;
  const double den = a1 * b3 * b3 + a2 * b4 * b4 - cross * b3 * b4;
  const double scale = (a1 + a2) * (b3 * b3 + b4 * b4);
  const double eps = 1e-15 * scale;
  const bool num_zero = std::abs(num) <= eps;
  const bool den_zero = std::abs(den) <= eps;
  if (den_zero) return num_zero ? BranchingRatio::indeterminate() : BranchingRatio::infinite();
  return BranchingRatio::finite(std::max(0.0, num / den));
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Adiabatic:
      return "adiabatic";
    case Regime::Zeno:
      return "zeno";
    case Regime::Intermediate:
      break;
  }
  return "intermediate";
}

Regime classify_regime(const PulseSet& pulses, double gamma, double ratio) {
  const double om = pulses.max_peak();
  const double om2 = om * om;
  if (om2 > ratio * gamma) return Regime::Adiabatic;
  if (om2 < gamma / ratio) return Regime::Zeno;
  return Regime::Intermediate;
}

}  // namespace kr5
