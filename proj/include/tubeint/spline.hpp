#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tubeint/error.hpp"

namespace tubeint {

/// Natural cubic spline on the uniform grid t_n = t0 + n * dt.
class NaturalCubicSpline {
 public:
  struct Piece {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  ///< a + b u + c u^2 + d u^3, u = t - t_n
  };

  NaturalCubicSpline(double t0, double dt, std::span<const double> knots) : t0_(t0), dt_(dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::NonPositive, "knot spacing must be > 0");
    if (knots.size() < 2) throw Error(ErrorKind::InsufficientSamples, "spline needs at least 2 knots");
    for (double v : knots) require_finite(v, "knot value");
    build(knots);
  }

  double t_begin() const { return t0_; }
  double t_end() const { return t0_ + dt_ * static_cast<double>(pieces_.size()); }
  std::size_t intervals() const { return pieces_.size(); }
  const std::vector<Piece>& pieces() const { return pieces_; }

  double operator()(double t) const { return eval(t, 0); }
  double derivative(double t, int order = 1) const { return eval(t, order); }

  /// Left and right limits of value, first and second derivative at interior knot n.
  struct KnotJump {
    double value = 0.0, first = 0.0, second = 0.0;
  };
  KnotJump jump(std::size_t n) const {
    if (n == 0 || n >= pieces_.size()) throw Error(ErrorKind::OutOfRange, "not an interior knot");
    const Piece& l = pieces_[n - 1];
    const Piece& r = pieces_[n];
    const double h = dt_;
    return {l.a + h * (l.b + h * (l.c + h * l.d)) - r.a,
            l.b + h * (2.0 * l.c + 3.0 * h * l.d) - r.b,
            2.0 * l.c + 6.0 * h * l.d - 2.0 * r.c};
  }

  /// Exact minimum over [t0, t_end]: each piece is checked at its ends and
  /// at the real roots of its derivative.
  double minimum() const {
    double m = pieces_.front().a;
    for (const Piece& p : pieces_) {
      auto consider = [&](double u) {
        if (u >= 0.0 && u <= dt_) m = std::min(m, p.a + u * (p.b + u * (p.c + u * p.d)));
      };
      consider(0.0);
      consider(dt_);
      // b + 2c u + 3d u^2 = 0
      const double qa = 3.0 * p.d, qb = 2.0 * p.c, qc = p.b;
      if (std::abs(qa) < 1e-300) {
        if (qb != 0.0) consider(-qc / qb);
      } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
          const double r = std::sqrt(disc);
          consider((-qb + r) / (2.0 * qa));
          consider((-qb - r) / (2.0 * qa));
        }
      }
    }
    return m;
  }

 private:
  void build(std::span<const double> y) {
    const std::size_t n = y.size() - 1;
    // Second derivatives M_i with M_0 = M_n = 0; tridiagonal (1, 4, 1) system.
    std::vector<double> m(n + 1, 0.0);
    if (n >= 2) {
      const std::size_t k = n - 1;
      std::vector<double> diag(k, 4.0), rhs(k);
      for (std::size_t i = 0; i < k; ++i)
        rhs[i] = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (dt_ * dt_);
      for (std::size_t i = 1; i < k; ++i) {
        const double w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
      }
      m[k] = rhs[k - 1] / diag[k - 1];
      for (std::size_t i = k - 1; i-- > 0;) m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    pieces_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Piece& p = pieces_[i];
      p.a = y[i];
      p.b = (y[i + 1] - y[i]) / dt_ - dt_ * (2.0 * m[i] + m[i + 1]) / 6.0;
      p.c = 0.5 * m[i];
      p.d = (m[i + 1] - m[i]) / (6.0 * dt_);
    }
  }

  double eval(double t, int order) const {
    if (!(t >= t0_ - 1e-12 * dt_ && t <= t_end() + 1e-12 * dt_))
      throw Error(ErrorKind::OutOfRange, "spline evaluated outside its knot range", t);
    auto idx = static_cast<std::size_t>(std::floor((t - t0_) / dt_));
    if (idx >= pieces_.size()) idx = pieces_.size() - 1;
    const Piece& p = pieces_[idx];
    const double u = t - (t0_ + dt_ * static_cast<double>(idx));
    switch (order) {
      case 0: return p.a + u * (p.b + u * (p.c + u * p.d));
      case 1: return p.b + u * (2.0 * p.c + 3.0 * u * p.d);
      case 2: return 2.0 * p.c + 6.0 * u * p.d;
      case 3: return 6.0 * p.d;
      default: return 0.0;
    }
  }

  double t0_;
  double dt_;
  std::vector<Piece> pieces_;
};

}  // namespace tubeint
