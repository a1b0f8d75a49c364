#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "tubeint/error.hpp"
#include "tubeint/model.hpp"
#include "tubeint/rk4.hpp"

namespace tubeint {

struct IntegrationConfig {
  double h = 1e-3;
  double t_start = 0.0;
  double t_end = 1.0;
  double escape_z = 1e6;
  std::size_t record_every = 1;
};

/// Coefficient function g(t) for the z-oscillator.
using Coefficient = std::function<double(double)>;

namespace detail {

inline std::size_t checked_steps(const IntegrationConfig& cfg) {
  if (cfg.record_every < 1) throw Error(ErrorKind::InvalidArgument, "record_every must be >= 1");
  if (!(cfg.escape_z > 0.0)) throw Error(ErrorKind::NonPositive, "escape_z must be > 0");
  const std::size_t n = step_count(cfg.t_start, cfg.t_end, cfg.h);
  if (n % cfg.record_every != 0)
    throw Error(ErrorKind::InvalidArgument,
                "step count must be a multiple of record_every so the last sample lands on t_end");
  return n;
}

template <class Sample>
Trajectory<Sample> start_trajectory(const IntegrationConfig& cfg, std::size_t n_steps) {
  Trajectory<Sample> traj;
  traj.t0 = cfg.t_start;
  traj.h = cfg.h * static_cast<double>(cfg.record_every);
  traj.stats.step = cfg.h;
  traj.stats.record_every = cfg.record_every;
  traj.samples.reserve(n_steps / cfg.record_every + 1);
  return traj;
}

inline double inv_pow_5_2(double y) { return 1.0 / (y * y * std::sqrt(y)); }

/// (y, y', y'', J) in tau. Every stage must see y > 0.
struct YRhs {
  const SystemParams& params;
  double time_scale = 1.0;  // d/dt = time_scale * d/dtau
  double min_y = std::numeric_limits<double>::infinity();

  State<4> operator()(double t, const State<4>& x) {
    const double tau = time_scale * t;
    const double y = x[0];
    min_y = std::min(min_y, y);
    if (!(y > 0.0)) throw Error(ErrorKind::PositivityViolation, "y <= 0 at an RK4 stage", tau);
    const double u = inv_pow_5_2(y);
    const double s = time_scale;
    return {s * x[1], s * x[2], s * (-4.0 * x[1] + params.forcing(tau) * u),
            s * u * params.drive_shape(tau)};
  }
};

}  // namespace detail

/// Integrates y''' + 4y' = F(tau) y^(-5/2) together with J' = y^(-5/2) cos(tau - phi)
/// from tau = cfg.t_start with (y0, yp0, ypp0, 0). cfg times are in tau.
inline Trajectory<YState> integrate_y(const SystemParams& params, const IntegrationConfig& cfg) {
  const std::size_t n = detail::checked_steps(cfg);
  auto traj = detail::start_trajectory<YState>(cfg, n);
  detail::YRhs rhs{params};
  const State<4> x0{params.y0, params.yp0, params.ypp0, 0.0};
  traj.stats.steps_taken = rk4_run(rhs, cfg.t_start, x0, cfg.h, n,
      [&](std::size_t k, double tau, const State<4>& x) {
        if (k % cfg.record_every == 0) traj.samples.push_back({tau, x[0], x[1], x[2], x[3]});
        return true;
      });
  traj.stats.min_stage_positive = rhs.min_y;
  return traj;
}

/// z'' + omega^2 z + g(t) z^2 = 0. Stops early (stats.escaped) once |z| > escape_z;
/// the trajectory then holds the samples recorded before the escape.
inline Trajectory<ZState> integrate_z(const Coefficient& g, double z0, double p0, double omega,
                                      const IntegrationConfig& cfg) {
  require_finite(z0, "z0");
  require_finite(p0, "p0");
  const std::size_t n = detail::checked_steps(cfg);
  auto traj = detail::start_trajectory<ZState>(cfg, n);
  const double w2 = omega * omega;
  auto rhs = [&](double t, const State<2>& x) -> State<2> {
    return {x[1], -w2 * x[0] - g(t) * x[0] * x[0]};
  };
  traj.stats.steps_taken = rk4_run(rhs, cfg.t_start, State<2>{z0, p0}, cfg.h, n,
      [&](std::size_t k, double t, const State<2>& x) {
        if (std::abs(x[0]) > cfg.escape_z) {
          traj.stats.escaped = true;
          traj.stats.escape_time = t;
          return false;
        }
        if (k % cfg.record_every == 0) traj.samples.push_back({t, x[0], x[1]});
        return true;
      });
  return traj;
}

/// Throws Escape if the run left the potential well.
template <class Sample>
const Trajectory<Sample>& require_complete(const Trajectory<Sample>& traj) {
  if (traj.stats.escaped)
    throw Error(ErrorKind::Escape, "|z| exceeded the escape threshold", traj.stats.escape_time);
  return traj;
}

/// Lockstep integration of (y, y', y'', J, z, p) in physical time t with
/// g(t) = y(omega t)^(-5/2), so the exact invariant can be evaluated from
/// simultaneous state. cfg times are in t.
inline Trajectory<CoupledState> integrate_coupled(const SystemParams& params, double z0, double p0,
                                                  const IntegrationConfig& cfg) {
  require_finite(z0, "z0");
  require_finite(p0, "p0");
  const std::size_t n = detail::checked_steps(cfg);
  auto traj = detail::start_trajectory<CoupledState>(cfg, n);
  detail::YRhs yrhs{params, params.omega};
  const double w2 = params.omega * params.omega;
  auto rhs = [&](double t, const State<6>& x) -> State<6> {
    const State<4> dy = yrhs(t, State<4>{x[0], x[1], x[2], x[3]});
    const double g = detail::inv_pow_5_2(x[0]);
    return {dy[0], dy[1], dy[2], dy[3], x[5], -w2 * x[4] - g * x[4] * x[4]};
  };
  const State<6> x0{params.y0, params.yp0, params.ypp0, 0.0, z0, p0};
  traj.stats.steps_taken = rk4_run(rhs, cfg.t_start, x0, cfg.h, n,
      [&](std::size_t k, double t, const State<6>& x) {
        if (std::abs(x[4]) > cfg.escape_z) {
          traj.stats.escaped = true;
          traj.stats.escape_time = t;
          return false;
        }
        if (k % cfg.record_every == 0)
          traj.samples.push_back({{params.omega * t, x[0], x[1], x[2], x[3]}, {t, x[4], x[5]}});
        return true;
      });
  traj.stats.min_stage_positive = yrhs.min_y;
  return traj;
}

/// Richardson estimate log2(|x_h - x_{h/2}| / |x_{h/2} - x_{h/4}|) using the
/// max-norm over the compared components at t_end.
struct ConvergenceEstimate {
  std::optional<double> order;  ///< empty when both differences are below the exactness floor
  bool exact = false;
  double diff_coarse = 0.0;
  double diff_fine = 0.0;
};

inline constexpr double kExactnessFloor = 1e-13;

/// final_state(h) must return the compared components at t_end.
template <class FinalState>
ConvergenceEstimate richardson_order(FinalState&& final_state, double h) {
  const std::vector<double> a = final_state(h);
  const std::vector<double> b = final_state(h / 2.0);
  const std::vector<double> c = final_state(h / 4.0);
  ConvergenceEstimate est;
  for (std::size_t i = 0; i < a.size(); ++i) {
    est.diff_coarse = std::max(est.diff_coarse, std::abs(a[i] - b[i]));
    est.diff_fine = std::max(est.diff_fine, std::abs(b[i] - c[i]));
  }
  if (est.diff_coarse < kExactnessFloor && est.diff_fine < kExactnessFloor) {
    est.exact = true;
    return est;
  }
  est.order = std::log2(est.diff_coarse / est.diff_fine);
  return est;
}

/// Order of the y-system on (y, y', y''); J is a quadrature of the same
/// stages and is excluded so that the unforced case reports Exact.
inline ConvergenceEstimate convergence_order_y(const SystemParams& params, double h, double t_end) {
  return richardson_order(
      [&](double step) {
        IntegrationConfig cfg;
        cfg.h = step;
        cfg.t_end = t_end;
        cfg.record_every = step_count(0.0, t_end, step);
        const YState s = integrate_y(params, cfg).back();
        return std::vector<double>{s.y, s.dy, s.ddy};
      },
      h);
}

inline ConvergenceEstimate convergence_order_z(const Coefficient& g, double z0, double p0,
                                               double omega, double h, double t_end) {
  return richardson_order(
      [&](double step) {
        IntegrationConfig cfg;
        cfg.h = step;
        cfg.t_end = t_end;
        cfg.record_every = step_count(0.0, t_end, step);
        const auto traj = integrate_z(g, z0, p0, omega, cfg);
        const ZState& s = require_complete(traj).back();
        return std::vector<double>{s.z, s.p};
      },
      h);
}

inline ConvergenceEstimate convergence_order_coupled(const SystemParams& params, double z0,
                                                     double p0, double h, double t_end) {
  return richardson_order(
      [&](double step) {
        IntegrationConfig cfg;
        cfg.h = step;
        cfg.t_end = t_end;
        cfg.record_every = step_count(0.0, t_end, step);
        const auto traj = integrate_coupled(params, z0, p0, cfg);
        const CoupledState& s = require_complete(traj).back();
        return std::vector<double>{s.y.y, s.y.dy, s.y.ddy, s.z.z, s.z.p};
      },
      h);
}

}  // namespace tubeint
