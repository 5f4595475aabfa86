#pragma once

// Adaptive Dormand-Prince 5(4) with an exact integrating factor for a
// constant diagonal generator (Lawson scheme):
//
//   y' = -i D y + f(xi, y),   D = diag(d_k) complex, constant on a segment.
//
// With u = exp(i D s) y the stiff diagonal drops out and the embedded pair
// integrates the remaining coupling. D = 0 reduces to plain DOPRI5.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "kr5/types.hpp"

namespace kr5 {

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-11;
  double max_step = 0.05;
  /// Current trial step magnitude; carried across segments.
  double h = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

namespace detail {

struct Dopri5Tableau {
  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double b[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                  -2187.0 / 6784, 11.0 / 84, 0.0};
  // b - b_hat
  static constexpr double e[7] = {35.0 / 384 - 5179.0 / 57600,
                                  0.0,
                                  500.0 / 1113 - 7571.0 / 16695,
                                  125.0 / 192 - 393.0 / 640,
                                  -2187.0 / 6784 + 92097.0 / 339200,
                                  11.0 / 84 - 187.0 / 2100,
                                  -1.0 / 40};
};

}  // namespace detail

template <std::size_t N>
class LawsonDopri5 {
 public:
  using State = std::array<Complex, N>;

  explicit LawsonDopri5(const State& diag = State{}) { set_diagonal(diag); }

  void set_diagonal(const State& diag) {
    diag_ = diag;
    has_diag_ = std::any_of(diag.begin(), diag.end(), [](const Complex& d) { return d != 0.0; });
  }

  /// Advances y from xi0 to xi1 (either direction), landing exactly on xi1.
  template <class F>
  void advance(F&& f, double xi0, double xi1, State& y, StepControl& ctl) const {
    const double span = xi1 - xi0;
    if (span == 0.0) return;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    double xi = xi0;
    if (!(ctl.h > 0.0)) ctl.h = std::min(ctl.max_step, std::abs(span));
    while (dir * (xi1 - xi) > 0.0) {
      double h = std::min({ctl.h, ctl.max_step});
      bool last = false;
      if (h >= dir * (xi1 - xi)) {
        h = dir * (xi1 - xi);
        last = true;
      }
      const double min_step = 1e-14 * std::max(1.0, std::abs(xi));
      if (h < min_step) throw IntegrationError(describe("step size underflow", xi), xi);

      State y_new;
      const double err = step(f, xi, dir * h, y, y_new, ctl.rtol, ctl.atol);
      if (!std::isfinite(err)) {
        if (!all_finite(y)) throw IntegrationError(describe("non-finite state", xi), xi);
        ctl.h = 0.2 * h;
        ++ctl.rejected;
        continue;
      }
      const double factor =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        if (!all_finite(y_new)) throw IntegrationError(describe("non-finite state", xi), xi);
        y = y_new;
        xi = last ? xi1 : xi + dir * h;
        ++ctl.accepted;
        // A clipped final step says nothing about the natural step size.
        if (!last || factor < 1.0) ctl.h = h * factor;
      } else {
        ctl.h = h * std::max(factor, 0.2);
        ++ctl.rejected;
      }
    }
  }

  /// One trial step of size h; returns the scaled error norm (NaN if the
  /// stage values are not finite).
  ///
  /// Stage inputs are formed directly in the original variables,
  ///   Y_s = E(c_s) y0 + h sum_j a_sj E(c_s - c_j) k_j,   E(c) = exp(-i D c h),
  /// so only decaying propagators appear even when |D h| is huge.
  template <class F>
  double step(F&& f, double xi, double h, const State& y0, State& y1, double rtol,
              double atol) const {
    using T = detail::Dopri5Tableau;
    std::array<State, 7> k;
    // prop[s][j] = E(c_s - c_j); prop[s][s] unused, column 0 doubles as E(c_s).
    std::array<std::array<State, 7>, 7> prop;
    if (has_diag_) {
      for (int s = 1; s < 7; ++s)
        for (int j = 0; j < s; ++j)
          for (std::size_t n = 0; n < N; ++n)
            prop[s][j][n] = diag_[n] == 0.0
                                ? Complex(1.0)
                                : std::exp(Complex(0.0, -1.0) * diag_[n] * ((T::c[s] - T::c[j]) * h));
    }
    State ys;
    f(xi, y0, k[0]);
    for (int s = 1; s < 7; ++s) {
      for (std::size_t n = 0; n < N; ++n) {
        Complex acc = has_diag_ ? prop[s][0][n] * y0[n] : y0[n];
        for (int j = 0; j < s; ++j)
          acc += h * T::a[s][j] * (has_diag_ ? prop[s][j][n] * k[j][n] : k[j][n]);
        ys[n] = acc;
      }
      f(xi + T::c[s] * h, ys, k[s]);
    }
    // The last stage sits at the 5th-order solution (c = 1, a[6] = b).
    y1 = ys;
    double err = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      Complex e = h * T::e[6] * k[6][n];
      for (int j = 0; j < 6; ++j) e += h * T::e[j] * (has_diag_ ? prop[6][j][n] * k[j][n] : k[j][n]);
      const double sc = atol + rtol * std::max(std::abs(y0[n]), std::abs(y1[n]));
      const double r = std::abs(e) / sc;
      if (std::isnan(r)) return r;
      err = std::max(err, r);
    }
    return err;
  }

 private:
  static bool all_finite(const State& y) {
    return std::all_of(y.begin(), y.end(), [](const Complex& c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  static std::string describe(const char* what, double xi) {
    std::ostringstream os;
    os << what << " at xi = " << xi;
    return os.str();
  }

  State diag_{};
  bool has_diag_ = false;
};

}  // namespace kr5
