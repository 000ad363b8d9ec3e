#pragma once

// Independent reference computations used only by the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

namespace fluxnet::oracle {

/// Small deterministic generator for test inputs.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }

 private:
  std::uint64_t state_;
};

/// Value at x = 0, t = 1 of the entropy solution of w_t + (w^2/2)_x = 0 with
/// Riemann data (w_left, w_right), from the Lax-Oleinik (Hopf-Lax) formula
/// w(x,t) = (x - y*)/t, y* = argmin_y [ (x - y)^2 / (2t) + W0(y) ],
/// W0(y) = w_left * y for y < 0, w_right * y for y >= 0.
/// The minimization is done piecewise on each half line and then refined by a
/// dense scan to stay independent of any closed-form flux formula.
inline double lax_oleinik_origin(double w_left, double w_right) {
  auto objective = [&](double y) { return 0.5 * y * y + (y < 0.0 ? w_left * y : w_right * y); };
  // Candidate minimizers: stationary points of each piece (clamped) and y = 0.
  double best_y = 0.0;
  double best = objective(0.0);
  const double y_left = std::min(-w_left, 0.0);
  const double y_right = std::max(-w_right, 0.0);
  for (double y : {y_left, y_right}) {
    const double v = objective(y);
    if (v < best) {
      best = v;
      best_y = y;
    }
  }
  // Dense scan cross-check on [-10, 10].
  const int n = 20001;
  for (int i = 0; i < n; ++i) {
    const double y = -10.0 + 20.0 * i / (n - 1);
    const double v = objective(y);
    if (v < best - 1e-12) {
      best = v;
      best_y = y;
    }
  }
  return -best_y;
}

/// Godunov flux of a * u^2 / 2 with Riemann data (u_plus, u_minus), a != 0.
/// w = a u solves Burgers, and a u^2 / 2 = w^2 / (2a).
inline double scaled_burgers_flux_oracle(double a, double u_plus, double u_minus) {
  if (a == 0.0) return 0.0;
  const double w = lax_oleinik_origin(a * u_plus, a * u_minus);
  return w * w / (2.0 * a);
}

/// SWE depth function phi(h) = f_L(h) + f_R(h) + u_R - u_L, written out independently.
inline double swe_phi(double h, double h_l, double u_l, double h_r, double u_r, double g) {
  auto f = [g](double hh, double hk) {
    if (hh <= hk) return 2.0 * (std::sqrt(g * hh) - std::sqrt(g * hk));
    return (hh - hk) * std::sqrt(0.5 * g * (hh + hk) / (hh * hk));
  };
  return f(h, h_l) + f(h, h_r) + (u_r - u_l);
}

/// Bracketing bisection for the star depth (wet, non-dry-generating data).
inline double swe_star_bisection(double h_l, double u_l, double h_r, double u_r, double g) {
  double lo = 0.0;
  double hi = std::max(h_l, h_r) + 1.0;
  while (swe_phi(hi, h_l, u_l, h_r, u_r, g) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (swe_phi(mid, h_l, u_l, h_r, u_r, g) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

/// Central finite difference of a scalar function.
inline double central_difference(const std::function<double(double)>& f, double x, double eps) {
  return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

}  // namespace fluxnet::oracle
