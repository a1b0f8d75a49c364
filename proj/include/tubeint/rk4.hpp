#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "tubeint/error.hpp"

namespace tubeint {

template <std::size_t N>
using State = std::array<double, N>;

/// Increment x(t + h) - x(t) of one classical fourth-order Runge-Kutta step.
template <std::size_t N, class Rhs>
State<N> rk4_increment(Rhs& f, double t, const State<N>& x, double h) {
  const double half = 0.5 * h;
  State<N> tmp;

  const State<N> k1 = f(t, x);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + half * k1[i];
  const State<N> k2 = f(t + half, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + half * k2[i];
  const State<N> k3 = f(t + half, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * k3[i];
  const State<N> k4 = f(t + h, tmp);

  State<N> dx;
  for (std::size_t i = 0; i < N; ++i) dx[i] = (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return dx;
}

/// One classical fourth-order Runge-Kutta step of x' = f(t, x).
template <std::size_t N, class Rhs>
State<N> rk4_step(Rhs& f, double t, const State<N>& x, double h) {
  const State<N> dx = rk4_increment(f, t, x, h);
  State<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + dx[i];
  return out;
}

/// Number of fixed steps of size h covering [t0, t_end]; the span must be an
/// integer multiple of h to 1e-9 relative.
inline std::size_t step_count(double t0, double t_end, double h) {
  require_finite(h, "h");
  require_finite(t0, "t_start");
  require_finite(t_end, "t_end");
  if (!(h > 0.0)) throw Error(ErrorKind::NonPositive, "step size h must be > 0");
  if (!(t_end > t0)) throw Error(ErrorKind::InvalidArgument, "t_end must exceed t_start");
  const double span = t_end - t0;
  const double n = std::round(span / h);
  if (n < 1.0 || std::abs(n * h - span) > 1e-9 * span)
    throw Error(ErrorKind::InvalidArgument,
                "integration span " + std::to_string(span) + " is not a multiple of h");
  return static_cast<std::size_t>(n);
}

/// Runs n_steps RK4 steps from (t0, x0). The observer is called as
/// observer(k, t_k, x_k) for k = 0..n_steps and may return false to stop.
/// Step times are t0 + k*h and state updates use compensated summation.
/// Returns steps taken.
template <std::size_t N, class Rhs, class Observer>
std::size_t rk4_run(Rhs& f, double t0, State<N> x, double h, std::size_t n_steps,
                    Observer&& observer) {
  if (!observer(std::size_t{0}, t0, x)) return 0;
  State<N> carry{};
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const State<N> dx = rk4_increment(f, t, x, h);
    for (std::size_t i = 0; i < N; ++i) {
      const double y = dx[i] - carry[i];
      const double s = x[i] + y;
      carry[i] = (s - x[i]) - y;
      x[i] = s;
    }
    const double t_next = t0 + static_cast<double>(k + 1) * h;
    for (double v : x)
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "state overflow", t_next);
    if (!observer(k + 1, t_next, x)) return k + 1;
  }
  return n_steps;
}

}  // namespace tubeint
