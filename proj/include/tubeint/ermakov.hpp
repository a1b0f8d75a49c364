#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "tubeint/error.hpp"
#include "tubeint/integrate.hpp"
#include "tubeint/model.hpp"
#include "tubeint/rk4.hpp"
#include "tubeint/spline.hpp"

namespace tubeint {

/// Iterates l_{n+1} = 4 l_n (1 - l_n); returns l_0 .. l_{n-1}.
inline std::vector<double> logistic_sequence(double l0, std::size_t n) {
  if (!(l0 >= 0.0 && l0 <= 1.0)) throw Error(ErrorKind::OutOfRange, "l0 must lie in [0, 1]");
  std::vector<double> out;
  out.reserve(n);
  double l = l0;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(l);
    l = 4.0 * l * (1.0 - l);
  }
  return out;
}

/// Knots f(n ts) = f0 + df (2 l_n - 1).
struct LogisticDriver {
  double l0 = 0.37;
  double ts = 1.0;
  double f0 = 1.0;
  double df = 0.3;

  std::vector<double> knots(std::size_t n) const {
    std::vector<double> out = logistic_sequence(l0, n);
    for (double& v : out) v = f0 + df * (2.0 * v - 1.0);
    return out;
  }
};

inline void validate_driver(const LogisticDriver& d) {
  require_finite(d.ts, "ts");
  require_finite(d.f0, "f0");
  require_finite(d.df, "df");
  if (!(d.ts > 0.0)) throw Error(ErrorKind::NonPositive, "ts must be > 0");
  if (!(d.f0 > 0.0)) throw Error(ErrorKind::NonPositive, "f0 must be > 0");
  if (!(d.df >= 0.0 && d.df < d.f0)) throw Error(ErrorKind::OutOfRange, "df must lie in [0, f0)");
  if (!(d.l0 >= 0.0 && d.l0 <= 1.0)) throw Error(ErrorKind::OutOfRange, "l0 must lie in [0, 1]");
}

/// Spline-interpolated driver f(t) covering [0, t_max] plus one spare interval.
struct DriverFunction {
  LogisticDriver driver;
  std::vector<double> knot_values;
  NaturalCubicSpline spline;
  double min_value = 0.0;

  double operator()(double t) const { return spline(t); }
};

inline DriverFunction build_driver(const LogisticDriver& d, double t_max) {
  validate_driver(d);
  require_finite(t_max, "t_max");
  if (!(t_max > 0.0)) throw Error(ErrorKind::NonPositive, "t_max must be > 0");
  const auto n = static_cast<std::size_t>(std::ceil(t_max / d.ts - 1e-12)) + 2;
  std::vector<double> knots = d.knots(n);
  NaturalCubicSpline spline(0.0, d.ts, knots);
  const double lo = spline.minimum();
  if (!(lo > 0.0)) {
    // locate the first offending interval for the error report
    double where = 0.0;
    for (std::size_t i = 0; i < spline.intervals(); ++i) {
      const double a = d.ts * static_cast<double>(i);
      bool hit = false;
      for (int j = 0; j <= 64 && !hit; ++j) {
        const double t = a + d.ts * j / 64.0;
        if (spline(t) <= 0.0) {
          where = t;
          hit = true;
        }
      }
      if (hit) break;
    }
    throw Error(ErrorKind::NonPositiveF, "spline overshoot makes f <= 0; reduce df", where);
  }
  return {d, std::move(knots), std::move(spline), lo};
}

struct ErmakovState {
  double t = 0.0;
  double z = 0.0;
  double p = 0.0;
  double w = 0.0;
  double dw = 0.0;
};

/// Lewis invariant 1/2 ((z/w)^2 + (w p - w' z)^2).
inline double lewis_invariant(double z, double p, double w, double dw) {
  if (!(w > 0.0)) throw Error(ErrorKind::NonPositiveW, "w must be > 0");
  const double a = z / w;
  const double b = w * p - dw * z;
  return 0.5 * (a * a + b * b);
}

inline double lewis_invariant(const ErmakovState& s) { return lewis_invariant(s.z, s.p, s.w, s.dw); }

/// Equilibrium Pinney amplitude f^(-1/4) for a frozen coefficient.
inline double equilibrium_w(double f) {
  if (!(f > 0.0)) throw Error(ErrorKind::NonPositiveF, "f must be > 0");
  return 1.0 / std::sqrt(std::sqrt(f));
}

/// z'' = -f z and w'' = -f w + w^-3 in lockstep.
inline Trajectory<ErmakovState> integrate_ermakov(const Coefficient& f, double z0, double p0,
                                                  double w0, double dw0,
                                                  const IntegrationConfig& cfg) {
  require_finite(z0, "z0");
  require_finite(p0, "p0");
  require_finite(w0, "w0");
  require_finite(dw0, "dw0");
  if (!(w0 > 0.0)) throw Error(ErrorKind::NonPositive, "w0 must be > 0");
  const std::size_t n = detail::checked_steps(cfg);
  auto traj = detail::start_trajectory<ErmakovState>(cfg, n);
  double min_w = std::numeric_limits<double>::infinity();
  auto rhs = [&](double t, const State<4>& x) -> State<4> {
    const double w = x[2];
    min_w = std::min(min_w, w);
    if (!(w > 0.0)) throw Error(ErrorKind::PositivityViolationW, "w <= 0 at an RK4 stage", t);
    const double ft = f(t);
    const double w2 = w * w;
    return {x[1], -ft * x[0], x[3], -ft * w + 1.0 / (w2 * w)};
  };
  traj.stats.steps_taken = rk4_run(rhs, cfg.t_start, State<4>{z0, p0, w0, dw0}, cfg.h, n,
      [&](std::size_t k, double t, const State<4>& x) {
        if (k % cfg.record_every == 0) traj.samples.push_back({t, x[0], x[1], x[2], x[3]});
        return true;
      });
  traj.stats.min_stage_positive = min_w;
  return traj;
}

/// Runs the logistic-driver experiment; w0 defaults to f(0)^(-1/4).
inline Trajectory<ErmakovState> integrate_ermakov(const DriverFunction& f, double z0, double p0,
                                                  std::optional<double> w0, double dw0,
                                                  const IntegrationConfig& cfg) {
  if (cfg.t_end > f.spline.t_end())
    throw Error(ErrorKind::OutOfRange, "driver does not cover the integration range", cfg.t_end);
  const double w_start = w0 ? *w0 : equilibrium_w(f(cfg.t_start));
  const Coefficient coef = [&f](double t) { return f(t); };
  return integrate_ermakov(coef, z0, p0, w_start, dw0, cfg);
}

}  // namespace tubeint
