#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tubeint/error.hpp"

namespace tubeint {

/// Model constants for z'' + w^2 z + g(t) z^2 = 0 with g = alpha2^(-5/2).
///
/// The alpha2 equation is carried in rescaled time tau = omega t as
///   y''' + 4 y' = (c1 cos tau + c2 sin tau) / omega^3 * y^(-5/2),
/// which for c2 = 0 is the canonical form y''' + 4 y' = eps cos(tau) y^(-5/2).
struct SystemParams {
  double omega = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double epsilon = 0.0;  ///< sqrt(c1^2 + c2^2) / omega^3
  double y0 = 1.0;
  double yp0 = 0.0;
  double ypp0 = 0.0;

  double amplitude() const { return std::hypot(c1, c2); }

  /// Forcing coefficient of y^(-5/2) in the tau-equation.
  double forcing(double tau) const {
    return (c1 * std::cos(tau) + c2 * std::sin(tau)) / (omega * omega * omega);
  }

  /// Unit-amplitude drive cos(tau - phi); reduces to cos(tau) for c2 = 0 or
  /// zero forcing. The Volterra integral is taken against this shape so that
  /// y'' + 4y = ypp0 + 4 y0 + eps * J holds for any phase.
  double drive_shape(double tau) const {
    const double c = amplitude();
    if (c == 0.0) return std::cos(tau);
    return (c1 * std::cos(tau) + c2 * std::sin(tau)) / c;
  }

  /// Signed cos(tau) amplitude used by the perturbation series (requires c2 = 0).
  double series_drive() const {
    if (c2 != 0.0)
      throw Error(ErrorKind::InvalidArgument,
                  "perturbation series assume c2 = 0 (shift time by the drive phase)");
    return c1 / (omega * omega * omega);
  }

  double eps_eff() const { return epsilon * std::pow(y0, -3.5); }

  /// y'(0) = y''(0) = 0 and a pure cosine drive.
  bool in_tested_regime() const { return yp0 == 0.0 && ypp0 == 0.0 && c2 == 0.0; }

  bool operator==(const SystemParams&) const = default;
};

/// User-facing parameter input: any subset of (epsilon, c1, c2) may be given.
struct RawParams {
  double omega = 1.0;
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<double> epsilon;
  double y0 = 1.0;
  double yp0 = 0.0;
  double ypp0 = 0.0;
};

namespace detail {

inline constexpr double kEpsilonRelTol = 1e-12;

inline bool epsilon_agrees(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= kEpsilonRelTol * scale;
}

inline void check_common(double omega, double y0, double yp0, double ypp0) {
  require_finite(omega, "omega");
  require_finite(y0, "y0");
  require_finite(yp0, "yp0");
  require_finite(ypp0, "ypp0");
  if (!(omega > 0.0)) throw Error(ErrorKind::NonPositive, "omega must be > 0");
  if (!(y0 > 0.0)) throw Error(ErrorKind::NonPositive, "y0 must be > 0");
}

}  // namespace detail

inline SystemParams validate_params(const RawParams& raw) {
  detail::check_common(raw.omega, raw.y0, raw.yp0, raw.ypp0);
  SystemParams p;
  p.omega = raw.omega;
  p.y0 = raw.y0;
  p.yp0 = raw.yp0;
  p.ypp0 = raw.ypp0;
  const double w3 = raw.omega * raw.omega * raw.omega;

  if (raw.c1 || raw.c2) {
    p.c1 = raw.c1.value_or(0.0);
    p.c2 = raw.c2.value_or(0.0);
    require_finite(p.c1, "c1");
    require_finite(p.c2, "c2");
    p.epsilon = p.amplitude() / w3;
    if (raw.epsilon) {
      require_finite(*raw.epsilon, "epsilon");
      if (!detail::epsilon_agrees(*raw.epsilon, p.epsilon))
        throw Error(ErrorKind::InconsistentEpsilon,
                    "epsilon=" + std::to_string(*raw.epsilon) +
                        " but sqrt(c1^2+c2^2)/omega^3=" + std::to_string(p.epsilon));
    }
  } else if (raw.epsilon) {
    require_finite(*raw.epsilon, "epsilon");
    if (*raw.epsilon < 0.0)
      throw Error(ErrorKind::InvalidArgument,
                  "epsilon is an amplitude and must be >= 0; give c1 < 0 to reverse the drive");
    p.epsilon = *raw.epsilon;
    p.c1 = p.epsilon * w3;
    p.c2 = 0.0;
  }
  return p;
}

/// Checks an already-assembled record; returns it unchanged when valid.
inline SystemParams validate_params(const SystemParams& p) {
  detail::check_common(p.omega, p.y0, p.yp0, p.ypp0);
  require_finite(p.c1, "c1");
  require_finite(p.c2, "c2");
  require_finite(p.epsilon, "epsilon");
  const double expected = p.amplitude() / (p.omega * p.omega * p.omega);
  if (!detail::epsilon_agrees(p.epsilon, expected))
    throw Error(ErrorKind::InconsistentEpsilon, "epsilon does not match sqrt(c1^2+c2^2)/omega^3");
  return p;
}

/// Shorthand for the canonical cos-driven record (c2 = 0).
inline SystemParams make_params(double epsilon, double y0, double omega = 1.0) {
  RawParams raw;
  raw.omega = omega;
  raw.epsilon = epsilon;
  raw.y0 = y0;
  return validate_params(raw);
}

inline double tau_of_t(double t, const SystemParams& p) { return p.omega * t; }
inline double t_of_tau(double tau, const SystemParams& p) { return tau / p.omega; }

struct YState {
  double tau = 0.0;
  double y = 0.0;
  double dy = 0.0;
  double ddy = 0.0;
  double volterra = 0.0;  ///< J(tau) = int_0^tau y^(-5/2) cos s ds
};

struct ZState {
  double t = 0.0;
  double z = 0.0;
  double p = 0.0;
};

struct CoupledState {
  YState y;
  ZState z;
};

/// Step metadata attached to every trajectory.
struct IntegrationStats {
  double step = 0.0;
  std::size_t record_every = 1;
  std::size_t steps_taken = 0;
  /// Smallest value of the positivity-constrained component (y or w) seen at
  /// any RK4 stage; +inf when the system has no such component.
  double min_stage_positive = std::numeric_limits<double>::infinity();
  bool escaped = false;
  std::optional<double> escape_time;
};

/// Samples at t0 + k*h (h is the sample spacing: step * record_every).
template <class Sample>
struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<Sample> samples;
  IntegrationStats stats;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * h; }
  const Sample& operator[](std::size_t k) const { return samples[k]; }
  const Sample& back() const { return samples.back(); }
  bool complete() const { return !stats.escaped && samples.size() >= 2; }
};

}  // namespace tubeint
