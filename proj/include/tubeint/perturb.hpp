#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "tubeint/error.hpp"
#include "tubeint/model.hpp"
#include "tubeint/trig_series.hpp"

namespace tubeint {

// Perturbation series for y''' + 4y' = eps cos(tau) y^(-5/2), y(0) = y0,
// y'(0) = y''(0) = 0, written as y = y0 exp(eps rho1 + eps^2 rho2 + eps^3 rho3).
// Each rho_n scales as y0^(-7n/2) times a y0-independent profile, so the
// expansion is really in eps_eff = eps y0^(-7/2).

namespace detail {

inline void check_order(int order) {
  if (order < 1 || order > 3)
    throw Error(ErrorKind::InvalidArgument, "truncation order must be 1, 2 or 3");
}

inline void check_y0(double y0) {
  if (!(y0 > 0.0)) throw Error(ErrorKind::NonPositive, "y0 must be > 0");
}

// y0 = 1 profiles and their tau-derivatives.
inline double unit_rho1(double t) { return std::sin(t) / 3.0 - std::sin(2 * t) / 6.0; }
inline double unit_drho1(double t) { return std::cos(t) / 3.0 - std::cos(2 * t) / 3.0; }

inline double unit_rho2(double t) {
  return -5.0 / 288.0 - std::cos(t) / 24.0 + 19.0 / 288.0 * std::cos(2 * t) -
         std::cos(3 * t) / 72.0 + std::cos(4 * t) / 144.0 + 5.0 / 96.0 * t * std::sin(2 * t);
}
inline double unit_drho2(double t) {
  return std::sin(t) / 24.0 - 19.0 / 144.0 * std::sin(2 * t) + std::sin(3 * t) / 24.0 -
         std::sin(4 * t) / 36.0 + 5.0 / 96.0 * std::sin(2 * t) + 5.0 / 48.0 * t * std::cos(2 * t);
}

inline double unit_rho3(double t) {
  const double secular = -45.0 / 4.0 + 135.0 / 4.0 * std::cos(t) - 45.0 / 2.0 * std::cos(2 * t) +
                         45.0 / 4.0 * std::cos(3 * t) - 45.0 / 4.0 * std::cos(4 * t);
  const double harmonic = 159.0 / 2.0 * std::sin(t) - 327.0 / 4.0 * std::sin(2 * t) +
                          73.0 / 4.0 * std::sin(3 * t) + 69.0 / 8.0 * std::sin(4 * t) -
                          9.0 / 4.0 * std::sin(5 * t) + std::sin(6 * t);
  return (t * secular + harmonic) / 2592.0;
}
inline double unit_drho3(double t) {
  const double secular = -45.0 / 4.0 + 135.0 / 4.0 * std::cos(t) - 45.0 / 2.0 * std::cos(2 * t) +
                         45.0 / 4.0 * std::cos(3 * t) - 45.0 / 4.0 * std::cos(4 * t);
  const double d_secular = -135.0 / 4.0 * std::sin(t) + 45.0 * std::sin(2 * t) -
                           135.0 / 4.0 * std::sin(3 * t) + 45.0 * std::sin(4 * t);
  const double d_harmonic = 159.0 / 2.0 * std::cos(t) - 327.0 / 2.0 * std::cos(2 * t) +
                            219.0 / 4.0 * std::cos(3 * t) + 69.0 / 2.0 * std::cos(4 * t) -
                            45.0 / 4.0 * std::cos(5 * t) + 6.0 * std::cos(6 * t);
  return (secular + t * d_secular + d_harmonic) / 2592.0;
}

}  // namespace detail

inline double rho1(double tau, double y0) {
  detail::check_y0(y0);
  return std::pow(y0, -3.5) * detail::unit_rho1(tau);
}
inline double rho2(double tau, double y0) {
  detail::check_y0(y0);
  return std::pow(y0, -7.0) * detail::unit_rho2(tau);
}
inline double rho3(double tau, double y0) {
  detail::check_y0(y0);
  return std::pow(y0, -10.5) * detail::unit_rho3(tau);
}

/// y0 = 1 profile of rho_n (n = 1, 2, 3) as a trigonometric series.
inline const TrigSeries& rho_series(int n) {
  static const std::array<TrigSeries, 3> series = [] {
    TrigSeries r1 = TrigSeries::sin_term(1.0 / 3.0, 1) + TrigSeries::sin_term(-1.0 / 6.0, 2);

    TrigSeries r2 = TrigSeries::constant(-5.0 / 288.0);
    r2.add(0, 1, -1.0 / 24.0, 0.0)
        .add(0, 2, 19.0 / 288.0, 0.0)
        .add(0, 3, -1.0 / 72.0, 0.0)
        .add(0, 4, 1.0 / 144.0, 0.0)
        .add(1, 2, 0.0, 5.0 / 96.0);

    TrigSeries r3;
    r3.add(1, 0, -45.0 / 4.0, 0.0)
        .add(1, 1, 135.0 / 4.0, 0.0)
        .add(1, 2, -45.0 / 2.0, 0.0)
        .add(1, 3, 45.0 / 4.0, 0.0)
        .add(1, 4, -45.0 / 4.0, 0.0)
        .add(0, 1, 0.0, 159.0 / 2.0)
        .add(0, 2, 0.0, -327.0 / 4.0)
        .add(0, 3, 0.0, 73.0 / 4.0)
        .add(0, 4, 0.0, 69.0 / 8.0)
        .add(0, 5, 0.0, -9.0 / 4.0)
        .add(0, 6, 0.0, 1.0);
    r3 *= 1.0 / 2592.0;
    return std::array<TrigSeries, 3>{r1, r2, r3};
  }();
  if (n < 1 || n > 3) throw Error(ErrorKind::InvalidArgument, "rho index must be 1, 2 or 3");
  return series[static_cast<std::size_t>(n - 1)];
}

/// sigma = sum_{n <= order} eps^n rho_n as a series in tau (y0 scaling applied).
inline TrigSeries sigma_series(double eps, double y0, int order) {
  detail::check_order(order);
  detail::check_y0(y0);
  const double ee = eps * std::pow(y0, -3.5);
  TrigSeries out;
  double scale = 1.0;
  for (int n = 1; n <= order; ++n) {
    scale *= ee;
    out += rho_series(n) * scale;
  }
  return out;
}

struct SeriesEval {
  double tau = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double rho3 = 0.0;
  double drho1 = 0.0;
  double drho2 = 0.0;
  double drho3 = 0.0;
  double rho = 0.0;     ///< eps rho1 + eps^2 rho2 + eps^3 rho3 (up to the order)
  double drho = 0.0;    ///< its tau-derivative
  double y_comp = 0.0;  ///< y0 exp(rho)
};

inline SeriesEval series_eval(double tau, double eps, double y0, int order) {
  detail::check_order(order);
  detail::check_y0(y0);
  const double a = std::pow(y0, -3.5);
  SeriesEval s;
  s.tau = tau;
  s.rho1 = a * detail::unit_rho1(tau);
  s.drho1 = a * detail::unit_drho1(tau);
  s.rho2 = a * a * detail::unit_rho2(tau);
  s.drho2 = a * a * detail::unit_drho2(tau);
  s.rho3 = a * a * a * detail::unit_rho3(tau);
  s.drho3 = a * a * a * detail::unit_drho3(tau);
  s.rho = eps * s.rho1;
  s.drho = eps * s.drho1;
  if (order >= 2) {
    s.rho += eps * eps * s.rho2;
    s.drho += eps * eps * s.drho2;
  }
  if (order >= 3) {
    s.rho += eps * eps * eps * s.rho3;
    s.drho += eps * eps * eps * s.drho3;
  }
  s.y_comp = y0 * std::exp(s.rho);
  return s;
}

inline SeriesEval series_eval(double tau, const SystemParams& p, int order) {
  return series_eval(tau, p.series_drive(), p.y0, order);
}

inline double y_composite(double tau, double eps, double y0, int order) {
  return series_eval(tau, eps, y0, order).y_comp;
}
inline double y_composite(double tau, const SystemParams& p, int order) {
  return series_eval(tau, p, order).y_comp;
}

/// g(t) = alpha2(t)^(-5/2) with alpha2(t) = y_composite(omega t).
inline double g_of_t(double t, const SystemParams& p, int order) {
  const double y = y_composite(p.omega * t, p, order);
  return 1.0 / (y * y * std::sqrt(y));
}

namespace detail {

// Order-by-order integrands of J = int_0^tau y^(-5/2) cos s ds after factoring
// y0^(-5/2): exp(-5 sigma/2) cos s expanded in eps_eff, integrated term by term.
inline const std::array<TrigSeries, 3>& volterra_series() {
  static const std::array<TrigSeries, 3> q = [] {
    const TrigSeries cos1 = TrigSeries::cos_term(1.0, 1);
    const TrigSeries& r1 = rho_series(1);
    const TrigSeries& r2 = rho_series(2);
    const TrigSeries p0 = TrigSeries::constant(1.0);
    const TrigSeries p1 = r1 * -2.5;
    const TrigSeries p2 = r2 * -2.5 + (r1 * r1) * (25.0 / 8.0);
    return std::array<TrigSeries, 3>{(p0 * cos1).integral(), (p1 * cos1).integral(),
                                     (p2 * cos1).integral()};
  }();
  return q;
}

}  // namespace detail

/// Series for J(tau) consistent with truncation order: eps J carries eps^1..eps^order.
inline TrigSeries volterra_series(double eps, double y0, int order) {
  detail::check_order(order);
  detail::check_y0(y0);
  const double ee = eps * std::pow(y0, -3.5);
  TrigSeries out;
  double scale = std::pow(y0, -2.5);
  for (int k = 0; k < order; ++k) {
    out += detail::volterra_series()[static_cast<std::size_t>(k)] * scale;
    scale *= ee;
  }
  return out;
}

struct Alpha2Derivatives {
  double alpha2 = 0.0;
  double d1 = 0.0;        ///< d alpha2 / d tau
  double d2 = 0.0;        ///< d^2 alpha2 / d tau^2 via the Volterra identity
  double volterra = 0.0;  ///< series value of J(tau)
};

/// alpha2' from the logarithmic derivative alpha2 * rho'; alpha2'' from
/// alpha2'' = 4 (y0 - alpha2) + eps J with J integrated term by term, so no
/// truncated expression is differentiated twice. Derivatives are in tau.
inline Alpha2Derivatives alpha2_derivatives(double tau, double eps, double y0, int order) {
  const SeriesEval s = series_eval(tau, eps, y0, order);
  Alpha2Derivatives out;
  out.alpha2 = s.y_comp;
  out.d1 = s.y_comp * s.drho;
  out.volterra = volterra_series(eps, y0, order).evaluate(tau);
  out.d2 = 4.0 * (y0 - s.y_comp) + eps * out.volterra;
  return out;
}

inline Alpha2Derivatives alpha2_derivatives(double tau, const SystemParams& p, int order) {
  return alpha2_derivatives(tau, p.series_drive(), p.y0, order);
}

/// R = y''' + 4y' - eps cos(tau) y^(-5/2) on the composite, with exact
/// derivatives of the exponent series. Build once, evaluate at many tau.
class SeriesResidual {
 public:
  SeriesResidual(double eps, double y0, int order)
      : eps_(eps), y0_(y0), sigma_(sigma_series(eps, y0, order)) {
    d1_ = sigma_.derivative();
    d2_ = d1_.derivative();
    d3_ = d2_.derivative();
  }

  double operator()(double tau) const {
    const double s1 = d1_.evaluate(tau);
    const double s2 = d2_.evaluate(tau);
    const double s3 = d3_.evaluate(tau);
    const double y = y0_ * std::exp(sigma_.evaluate(tau));
    const double yp = y * s1;
    const double yppp = y * (s3 + 3.0 * s1 * s2 + s1 * s1 * s1);
    return yppp + 4.0 * yp - eps_ * std::cos(tau) / (y * y * std::sqrt(y));
  }

 private:
  double eps_;
  double y0_;
  TrigSeries sigma_, d1_, d2_, d3_;
};

inline double series_residual(double tau, double eps, double y0, int order) {
  return SeriesResidual(eps, y0, order)(tau);
}

struct ValidityWindow {
  double tau_star = std::numeric_limits<double>::infinity();
  double eps_eff = 0.0;
};

/// tau* = 96 y0^6 / (5 eps^2), eps_eff = eps y0^(-7/2).
inline ValidityWindow validity(const SystemParams& p) {
  ValidityWindow w;
  w.eps_eff = p.eps_eff();
  if (p.epsilon != 0.0) w.tau_star = 96.0 * std::pow(p.y0, 6) / (5.0 * p.epsilon * p.epsilon);
  return w;
}

/// Coefficient of the secular tau sin(2 tau) term in y: (5/96) eps^2 y0^(-6).
inline double secular_coefficient(double eps, double y0) {
  return 5.0 / 96.0 * eps * eps * std::pow(y0, -6.0);
}

}  // namespace tubeint
