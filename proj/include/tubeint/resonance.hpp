#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "tubeint/error.hpp"
#include "tubeint/model.hpp"
#include "tubeint/perturb.hpp"

namespace tubeint {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr std::size_t kMinPointsPerWindow = 1000;
inline constexpr int kMaxHarmonic = 8;

/// Fourier coefficients of one window tau in [2 pi k, 2 pi (k+1)].
/// c[0] is the window mean; c[n], s[n] for n >= 1 (s[0] is unused and 0).
struct HarmonicWindow {
  int k = 0;
  std::vector<double> c;
  std::vector<double> s;
};

/// Uniform samples of a scalar signal on tau = t0 + i*h.
struct SampledSignal {
  double t0 = 0.0;
  double h = 0.0;
  std::span<const double> values;
};

namespace detail {

struct WindowIndex {
  std::size_t first = 0;
  std::size_t points = 0;  // intervals per window
};

inline std::size_t aligned_index(double value, double h, const char* what) {
  const double r = value / h;
  const double n = std::round(r);
  if (n < 0.0 || std::abs(n - r) > 1e-6 * std::max(1.0, std::abs(r)))
    throw Error(ErrorKind::InsufficientSamples,
                std::string(what) + " does not fall on the sample grid (use h = 2 pi / M)");
  return static_cast<std::size_t>(n);
}

inline WindowIndex locate_window(const SampledSignal& sig, int k, double period = kTwoPi) {
  if (!(sig.h > 0.0)) throw Error(ErrorKind::InsufficientSamples, "sample spacing must be > 0");
  if (k < 0) throw Error(ErrorKind::InsufficientSamples, "window index must be >= 0");
  WindowIndex w;
  w.points = aligned_index(period, sig.h, "window length");
  if (w.points < kMinPointsPerWindow)
    throw Error(ErrorKind::InsufficientSamples, "fewer than 1000 points per window");
  w.first = aligned_index(period * k - sig.t0, sig.h, "window start");
  if (w.first + w.points >= sig.values.size())
    throw Error(ErrorKind::InsufficientSamples, "trajectory does not cover the window");
  return w;
}

// (1/pi) * trapezoid integral of v(tau) * basis(n tau) over one window.
template <class Basis>
double window_projection(const SampledSignal& sig, const WindowIndex& w, int n, Basis basis) {
  double sum = 0.0;
  for (std::size_t i = 0; i <= w.points; ++i) {
    const std::size_t j = w.first + i;
    const double tau = sig.t0 + static_cast<double>(j) * sig.h;
    const double weight = (i == 0 || i == w.points) ? 0.5 : 1.0;
    sum += weight * sig.values[j] * basis(n * tau);
  }
  return sum * sig.h / std::numbers::pi;
}

inline std::vector<double> y_values(const Trajectory<YState>& traj) {
  std::vector<double> v;
  v.reserve(traj.size());
  for (const YState& s : traj.samples) v.push_back(s.y);
  return v;
}

}  // namespace detail

inline HarmonicWindow project_harmonics(const SampledSignal& sig, int k, int max_harmonic) {
  if (max_harmonic < 0 || max_harmonic > kMaxHarmonic)
    throw Error(ErrorKind::InvalidArgument, "harmonic count must be in [0, 8]");
  const detail::WindowIndex w = detail::locate_window(sig, k);
  HarmonicWindow out;
  out.k = k;
  out.c.assign(static_cast<std::size_t>(max_harmonic) + 1, 0.0);
  out.s.assign(static_cast<std::size_t>(max_harmonic) + 1, 0.0);
  auto cos_fn = [](double x) { return std::cos(x); };
  auto sin_fn = [](double x) { return std::sin(x); };
  out.c[0] = 0.5 * detail::window_projection(sig, w, 0, cos_fn);
  for (int n = 1; n <= max_harmonic; ++n) {
    out.c[static_cast<std::size_t>(n)] = detail::window_projection(sig, w, n, cos_fn);
    out.s[static_cast<std::size_t>(n)] = detail::window_projection(sig, w, n, sin_fn);
  }
  return out;
}

inline HarmonicWindow project_harmonics(const Trajectory<YState>& traj, int k, int max_harmonic) {
  const std::vector<double> v = detail::y_values(traj);
  return project_harmonics(SampledSignal{traj.t0, traj.h, v}, k, max_harmonic);
}

/// Number of complete 2 pi windows covered by a trajectory starting at tau = 0.
inline int complete_windows(double t0, double h, std::size_t n_samples) {
  const double span = h * static_cast<double>(n_samples - 1) + t0;
  return static_cast<int>(std::floor(span / kTwoPi + 1e-9));
}

struct SecularFit {
  int harmonic = 2;
  double slope = 0.0;  ///< d s_n / d tau across windows (signed)
  double intercept = 0.0;
  double r2 = 0.0;
  double predicted = 0.0;  ///< (5/96) eps^2 y0^-6 for n = 2
  int windows = 0;
  bool within_validity = true;  ///< fitted range ends before 0.2 tau*
  std::vector<double> centers;
  std::vector<double> amplitudes;
};

/// Per-window sin(n tau) coefficient of y - y0 - eps y0 rho1, fitted
/// linearly against window centre. Uses windows [first, first + count).
inline SecularFit secular_slope(const Trajectory<YState>& traj, const SystemParams& p,
                                int harmonic = 2, int first = 0, int count = -1) {
  const double eps = p.series_drive();
  const double y0 = p.y0;
  const int available = complete_windows(traj.t0, traj.h, traj.size());
  if (count < 0) count = available - first;
  if (count < 5 || first < 0 || first + count > available)
    throw Error(ErrorKind::InsufficientWindows, "secular fit needs at least 5 complete windows");

  std::vector<double> residual;
  residual.reserve(traj.size());
  for (const YState& s : traj.samples)
    residual.push_back(s.y - y0 - eps * y0 * rho1(s.tau, y0));
  const SampledSignal sig{traj.t0, traj.h, residual};

  SecularFit fit;
  fit.harmonic = harmonic;
  fit.windows = count;
  fit.predicted = harmonic == 2 ? secular_coefficient(eps, y0) : 0.0;
  for (int k = first; k < first + count; ++k) {
    const HarmonicWindow w = project_harmonics(sig, k, harmonic);
    fit.centers.push_back(kTwoPi * (k + 0.5));
    fit.amplitudes.push_back(w.s[static_cast<std::size_t>(harmonic)]);
  }

  const auto n = static_cast<double>(count);
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < count; ++i) {
    mx += fit.centers[static_cast<std::size_t>(i)];
    my += fit.amplitudes[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < count; ++i) {
    const double dx = fit.centers[static_cast<std::size_t>(i)] - mx;
    const double dy = fit.amplitudes[static_cast<std::size_t>(i)] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.within_validity = kTwoPi * (first + count) <= 0.2 * validity(p).tau_star;
  return fit;
}

struct ThirdHarmonic {
  double measured = 0.0;   ///< sin(3 tau) coefficient of the residual
  double predicted = 0.0;  ///< (7/864) eps^3 y0^(-19/2), canonical sign
  int window = 0;
};

/// Measures the sin(3 tau) content of y - y0 (1 + eps rho1) over one window.
/// The residual's O(eps^2) part is orthogonal to sin(3 tau) on a full window.
inline ThirdHarmonic third_harmonic_check(const SystemParams& p, const Trajectory<YState>& traj,
                                          int window = 0) {
  const double eps = p.series_drive();
  const double y0 = p.y0;
  std::vector<double> residual(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const YState& s = traj.samples[i];
    residual[i] = s.y - y0 * (1.0 + eps * rho1(s.tau, y0));
  }
  ThirdHarmonic out;
  out.window = window;
  out.measured = project_harmonics(SampledSignal{traj.t0, traj.h, residual}, window, 3).s[3];
  out.predicted = 7.0 / 864.0 * eps * eps * eps * std::pow(y0, -9.5);
  return out;
}

struct DefectWindow {
  int k = 0;
  double tau_start = 0.0;
  double defect = 0.0;  ///< max_{tau in window} max_component |x(tau + period) - x(tau)|
};

/// Periodicity defect per period-window over any number of components
/// sampled on a common grid.
inline std::vector<DefectWindow> periodicity_defect(std::span<const std::span<const double>> components,
                                                    double t0, double h, double period = kTwoPi) {
  if (components.empty()) throw Error(ErrorKind::InsufficientSamples, "no components");
  const std::size_t n = components.front().size();
  const std::size_t m = detail::aligned_index(period, h, "period");
  if (m == 0 || n < 2 * m + 1)
    throw Error(ErrorKind::InsufficientSamples, "trajectory must cover at least two periods");
  std::vector<DefectWindow> out;
  const std::size_t shifts = n - m;  // valid i with i + m < n
  for (std::size_t start = 0; start + m <= shifts; start += m) {
    DefectWindow d;
    d.k = static_cast<int>(start / m);
    d.tau_start = t0 + static_cast<double>(start) * h;
    for (std::size_t i = start; i < start + m; ++i)
      for (const auto& comp : components) d.defect = std::max(d.defect, std::abs(comp[i + m] - comp[i]));
    out.push_back(d);
  }
  return out;
}

inline std::vector<DefectWindow> periodicity_defect(const Trajectory<YState>& traj,
                                                    double period = kTwoPi) {
  std::vector<double> y, dy, ddy;
  y.reserve(traj.size());
  dy.reserve(traj.size());
  ddy.reserve(traj.size());
  for (const YState& s : traj.samples) {
    y.push_back(s.y);
    dy.push_back(s.dy);
    ddy.push_back(s.ddy);
  }
  const std::span<const double> comps[] = {y, dy, ddy};
  return periodicity_defect(comps, traj.t0, traj.h, period);
}

/// A trigonometric series with integer frequencies is exactly 2 pi-periodic
/// iff it has no secular (tau^k, k >= 1) terms.
inline bool exactly_periodic(const TrigSeries& series) { return series.secular_degree() == 0; }

/// Step size giving `points` samples per 2 pi window.
inline double window_step(std::size_t points) { return kTwoPi / static_cast<double>(points); }

}  // namespace tubeint
