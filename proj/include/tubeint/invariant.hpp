#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tubeint/error.hpp"
#include "tubeint/integrate.hpp"
#include "tubeint/model.hpp"
#include "tubeint/perturb.hpp"

namespace tubeint {

/// Quadratic invariant
///   I = a2 p^2 - a2' z p + a1 p + (w^2 a2 + a2''/2) z^2 - a1' z + (2/3) a2 g z^3
/// with a1 = (c1 cos wt + c2 sin wt)/2 and a2 = alpha2(t) = y(w t).
inline double invariant_exact(const YState& ys, const ZState& zs, const SystemParams& p) {
  if (!(ys.y > 0.0)) throw Error(ErrorKind::NonPositiveY, "alpha2 must be > 0", zs.t);
  const double w = p.omega;
  const double wt = w * zs.t;
  const double a1 = 0.5 * (p.c1 * std::cos(wt) + p.c2 * std::sin(wt));
  const double da1 = 0.5 * w * (-p.c1 * std::sin(wt) + p.c2 * std::cos(wt));
  const double a2 = ys.y;
  const double da2 = w * ys.dy;
  const double dda2 = w * w * ys.ddy;
  const double z = zs.z;
  const double v = zs.p;
  const double a6 = (2.0 / 3.0) / (a2 * std::sqrt(a2));
  return a2 * v * v - da2 * z * v + a1 * v + (w * w * a2 + 0.5 * dda2) * z * z - da1 * z +
         a6 * z * z * z;
}

inline double invariant_exact(const CoupledState& s, const SystemParams& p) {
  return invariant_exact(s.y, s.z, p);
}

/// I = a1 z + a2 p + a3 z^2 + a4 z p + a5 p^2 + a6 z^3 with perturbative coefficients.
struct InvariantCoeffs {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  double a5 = 0.0;
  double a6 = 0.0;
  double a31 = 0.0;  ///< series part of a3 (= alpha2''/2)
  double a32 = 0.0;  ///< exponent: a3 = a31 + y0 exp(a32)

  double evaluate(double z, double p) const {
    return a1 * z + a2 * p + a3 * z * z + a4 * z * p + a5 * p * p + a6 * z * z * z;
  }
};

namespace detail {

// alpha2''/2 truncated in eps.
inline double half_alpha2_dd_series(double t, double eps, double y0, int order) {
  const double s1 = std::sin(t), s2 = std::sin(2 * t), s3 = std::sin(3 * t), s4 = std::sin(4 * t),
               s5 = std::sin(5 * t);
  const double c1 = std::cos(t), c2 = std::cos(2 * t), c3 = std::cos(3 * t);
  double out = eps / (6.0 * std::pow(y0, 2.5)) * (2.0 * s2 - s1);
  if (order >= 2) {
    const double k = eps * eps / std::pow(y0, 6.0);
    out += k / 144.0 * (-9.0 * c3 + 4.0 * c2 + 5.0 * c1);
    // secular part of (alpha2''/2) at eps^2
    out += -5.0 / 48.0 * k * t * s2;
  }
  if (order >= 3) {
    out += eps * eps * eps / (6912.0 * std::pow(y0, 9.5)) *
           (-25.0 * s5 + 120.0 * s4 - 531.0 * s3 + 644.0 * s2 - 230.0 * s1 + 135.0 * t * c3 +
            120.0 * t * c2 - 75.0 * t * c1);
  }
  return out;
}

// -alpha2' truncated in eps.
inline double minus_alpha2_d_series(double t, double eps, double y0, int order) {
  const double s1 = std::sin(t), s2 = std::sin(2 * t), s3 = std::sin(3 * t);
  const double c1 = std::cos(t), c2 = std::cos(2 * t), c3 = std::cos(3 * t), c4 = std::cos(4 * t),
               c5 = std::cos(5 * t);
  double out = -eps / (3.0 * std::pow(y0, 2.5)) * (c1 - c2);
  if (order >= 2) {
    out -= eps * eps / (288.0 * std::pow(y0, 6.0)) *
           (-12.0 * s3 - 7.0 * s2 + 20.0 * s1 + 30.0 * t * c2);
  }
  if (order >= 3) {
    out -= eps * eps * eps / (3456.0 * std::pow(y0, 9.5)) *
           (5.0 * c5 - 30.0 * c4 + 192.0 * c3 - 292.0 * c2 + 155.0 * c1 + 45.0 * t * s3 +
            60.0 * t * s2 - 75.0 * t * s1 - 30.0);
  }
  return out;
}

}  // namespace detail

/// Perturbative coefficients for omega = 1, c2 = 0 (so tau = t and c1 = eps).
inline InvariantCoeffs invariant_coeffs(double t, const SystemParams& p, int order) {
  if (p.omega != 1.0)
    throw Error(ErrorKind::UnsupportedOmega, "perturbative invariant coefficients need omega = 1");
  detail::check_order(order);
  const double eps = p.series_drive();
  const double y0 = p.y0;
  const SeriesEval s = series_eval(t, eps, y0, order);

  InvariantCoeffs c;
  c.a1 = 0.5 * eps * std::sin(t);  // -alpha1'
  c.a2 = 0.5 * eps * std::cos(t);  //  alpha1
  c.a31 = detail::half_alpha2_dd_series(t, eps, y0, order);
  c.a32 = s.rho;
  c.a5 = s.y_comp;
  c.a3 = c.a31 + c.a5;
  c.a4 = detail::minus_alpha2_d_series(t, eps, y0, order);
  c.a6 = (2.0 / 3.0) / (c.a5 * std::sqrt(c.a5));
  return c;
}

struct InvariantSample {
  double t = 0.0;
  double value = 0.0;
  double drift_pct = 0.0;  ///< 100 |I(t) - I(0)| / |I(0)| (absolute when the guard tripped)
};

struct DriftResult {
  Trajectory<InvariantSample> series;
  double max_drift_pct = 0.0;
  double final_drift_pct = 0.0;
  /// |I(0)| < 1e-12: drift_pct holds 100 |I(t) - I(0)| instead of a relative value.
  bool absolute = false;
};

inline constexpr double kDriftGuard = 1e-12;

/// Drift statistics of a sampled invariant; values[k] is I at t0 + k*h.
inline DriftResult drift_from_values(std::span<const double> values, double t0, double h,
                                     const IntegrationStats& stats = {}) {
  if (values.empty()) throw Error(ErrorKind::InsufficientSamples, "no invariant samples");
  DriftResult out;
  out.series.t0 = t0;
  out.series.h = h;
  out.series.stats = stats;
  const double i0 = values.front();
  out.absolute = std::abs(i0) < kDriftGuard;
  const double norm = out.absolute ? 1.0 : std::abs(i0);
  out.series.samples.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double d = 100.0 * std::abs(values[k] - i0) / norm;
    out.series.samples.push_back({t0 + static_cast<double>(k) * h, values[k], d});
    out.max_drift_pct = std::max(out.max_drift_pct, d);
  }
  out.final_drift_pct = out.series.samples.back().drift_pct;
  return out;
}

/// z integrated with g = alpha2_series^(-5/2) at the given order; the
/// perturbative invariant is evaluated at every recorded sample.
inline DriftResult drift_experiment(const SystemParams& p, double z0, double p0,
                                    const IntegrationConfig& cfg, int order) {
  if (p.omega != 1.0)
    throw Error(ErrorKind::UnsupportedOmega, "perturbative drift experiment needs omega = 1");
  detail::check_order(order);
  const Coefficient g = [&p, order](double t) { return g_of_t(t, p, order); };
  const auto traj = integrate_z(g, z0, p0, p.omega, cfg);
  require_complete(traj);
  std::vector<double> values;
  values.reserve(traj.size());
  for (const ZState& s : traj.samples)
    values.push_back(invariant_coeffs(s.t, p, order).evaluate(s.z, s.p));
  return drift_from_values(values, traj.t0, traj.h, traj.stats);
}

/// Same experiment with the exact invariant on the coupled (y, z) integration.
inline DriftResult exact_drift_experiment(const SystemParams& p, double z0, double p0,
                                          const IntegrationConfig& cfg) {
  const auto traj = integrate_coupled(p, z0, p0, cfg);
  require_complete(traj);
  std::vector<double> values;
  values.reserve(traj.size());
  for (const CoupledState& s : traj.samples) values.push_back(invariant_exact(s, p));
  return drift_from_values(values, traj.t0, traj.h, traj.stats);
}

struct TubePoint {
  double z = 0.0;
  double p = 0.0;
  double t = 0.0;
};

/// One trajectory on the level set I = K of the exact invariant.
struct TubeFilament {
  double z0 = 0.0;
  double p0 = 0.0;
  double level = 0.0;          ///< K = I(z0, p0, 0)
  double max_rel_drift = 0.0;  ///< max |I - K| / |K| along the samples
  double min_alpha2 = 0.0;
  std::vector<TubePoint> points;
  std::vector<double> alpha2;  ///< alpha2 at the same samples
  double spacing = 0.0;
};

/// Filaments for every (z0, p0) in the grid product, integrated with the
/// coupled system so each carries its own K.
inline std::vector<TubeFilament> tube_surface_samples(const SystemParams& p,
                                                      std::span<const double> z0_grid,
                                                      std::span<const double> p0_grid,
                                                      const IntegrationConfig& cfg) {
  if (z0_grid.empty() || p0_grid.empty())
    throw Error(ErrorKind::InvalidArgument, "initial-condition grids must be nonempty");
  std::vector<TubeFilament> out;
  out.reserve(z0_grid.size() * p0_grid.size());
  for (double z0 : z0_grid) {
    for (double p0 : p0_grid) {
      const auto traj = integrate_coupled(p, z0, p0, cfg);
      require_complete(traj);
      TubeFilament f;
      f.z0 = z0;
      f.p0 = p0;
      f.spacing = traj.h;
      f.level = invariant_exact(traj.samples.front(), p);
      f.min_alpha2 = traj.stats.min_stage_positive;
      const double norm = std::abs(f.level) < kDriftGuard ? 1.0 : std::abs(f.level);
      f.points.reserve(traj.size());
      f.alpha2.reserve(traj.size());
      for (const CoupledState& s : traj.samples) {
        f.points.push_back({s.z.z, s.z.p, s.z.t});
        f.alpha2.push_back(s.y.y);
        f.max_rel_drift =
            std::max(f.max_rel_drift, std::abs(invariant_exact(s, p) - f.level) / norm);
      }
      out.push_back(std::move(f));
    }
  }
  return out;
}

/// Stroboscopic samples t = n * period of a filament; period must be a
/// multiple of the sample spacing.
inline std::vector<TubePoint> section_samples(const TubeFilament& f, double period) {
  if (!(period > 0.0) || !(f.spacing > 0.0))
    throw Error(ErrorKind::InvalidArgument, "section period and spacing must be > 0");
  const double ratio = period / f.spacing;
  const double stride = std::round(ratio);
  if (stride < 1.0 || std::abs(stride - ratio) > 1e-6 * ratio)
    throw Error(ErrorKind::InvalidArgument, "section period is not a multiple of the sample spacing");
  std::vector<TubePoint> out;
  const auto step = static_cast<std::size_t>(stride);
  for (std::size_t k = 0; k < f.points.size(); k += step) out.push_back(f.points[k]);
  return out;
}

}  // namespace tubeint
