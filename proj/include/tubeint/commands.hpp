#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tubeint/csv.hpp"
#include "tubeint/ermakov.hpp"
#include "tubeint/error.hpp"
#include "tubeint/integrate.hpp"
#include "tubeint/invariant.hpp"
#include "tubeint/model.hpp"
#include "tubeint/perturb.hpp"
#include "tubeint/resonance.hpp"

namespace tubeint {

inline constexpr std::string_view kVersion = "1.0.0";

struct SimulateYOptions {
  SystemParams params = make_params(0.1, 1.0);
  double h = 1e-3;
  double tau_max = 500.0;
  std::size_t record_every = 100;
};

enum class DriftMode { Exact, Perturbative };

struct DriftOptions {
  SystemParams params = make_params(0.05, 1.1);
  DriftMode mode = DriftMode::Perturbative;
  int order = 3;
  double z0 = 0.2;
  double p0 = 0.0;
  double h = 1e-3;
  double t_max = 500.0;
  std::size_t record_every = 100;
  double escape_z = 1e6;
};

struct FourierOptions {
  SystemParams params = make_params(0.1, 1.0);
  double tau_max = 300.0;
  std::size_t points_per_window = 1000;
  int harmonics = 3;
};

struct ErmakovOptions {
  LogisticDriver driver;
  double z0 = 1.0;
  double p0 = 0.0;
  std::optional<double> w0;
  double dw0 = 0.0;
  double h = 1e-3;
  double t_max = 200.0;
  std::size_t record_every = 100;
};

struct TubeOptions {
  SystemParams params = make_params(0.05, 1.1);
  std::vector<double> z0 = {0.1, 0.2, 0.3};
  std::vector<double> p0 = {0.0};
  std::size_t points_per_period = 1000;
  int periods = 20;
  std::size_t record_every = 10;
};

namespace detail {

inline void params_meta(CsvWriter& w, const SystemParams& p) {
  w.meta("omega", p.omega)
      .meta("c1", p.c1)
      .meta("c2", p.c2)
      .meta("epsilon", p.epsilon)
      .meta("y0", p.y0)
      .meta("yp0", p.yp0)
      .meta("ypp0", p.ypp0);
}

inline CsvWriter start_csv(std::string_view command) {
  CsvWriter w;
  w.meta("command", command).meta("version", kVersion);
  return w;
}

inline IntegrationConfig make_config(double h, double t_end, std::size_t record_every) {
  IntegrationConfig cfg;
  cfg.h = h;
  cfg.t_end = t_end;
  cfg.record_every = record_every;
  return cfg;
}

}  // namespace detail

/// Columns tau, y_numeric, y_series_o1..o3, abs_err_o3, rel_err_o3.
inline std::string run_simulate_y(const SimulateYOptions& o) {
  const SystemParams p = validate_params(o.params);
  const double eps = p.series_drive();
  const auto traj = integrate_y(p, detail::make_config(o.h, o.tau_max, o.record_every));

  CsvWriter w = detail::start_csv("simulate-y");
  detail::params_meta(w, p);
  w.meta("h", o.h).meta("record_every", format_double(static_cast<double>(o.record_every)));
  w.meta("tau_star", validity(p).tau_star).meta("eps_eff", p.eps_eff());
  w.meta("min_y_stage", traj.stats.min_stage_positive);
  w.header({"tau", "y_numeric", "y_series_o1", "y_series_o2", "y_series_o3", "abs_err_o3",
            "rel_err_o3"});
  for (const YState& s : traj.samples) {
    const double o1 = y_composite(s.tau, eps, p.y0, 1);
    const double o2 = y_composite(s.tau, eps, p.y0, 2);
    const double o3 = y_composite(s.tau, eps, p.y0, 3);
    const double err = std::abs(s.y - o3);
    w.row({s.tau, s.y, o1, o2, o3, err, err / std::abs(s.y)});
  }
  return w.str();
}

inline DriftResult run_drift(const DriftOptions& o) {
  const SystemParams p = validate_params(o.params);
  IntegrationConfig cfg = detail::make_config(o.h, o.t_max, o.record_every);
  cfg.escape_z = o.escape_z;
  return o.mode == DriftMode::Exact ? exact_drift_experiment(p, o.z0, o.p0, cfg)
                                    : drift_experiment(p, o.z0, o.p0, cfg, o.order);
}

/// Columns t, I_value, drift_pct; drift summary in the metadata.
inline std::string run_invariant_drift(const DriftOptions& o) {
  const DriftResult r = run_drift(o);
  CsvWriter w = detail::start_csv("invariant-drift");
  detail::params_meta(w, o.params);
  w.meta("mode", o.mode == DriftMode::Exact ? "exact" : "perturbative");
  if (o.mode == DriftMode::Perturbative)
    w.meta("order", format_double(static_cast<double>(o.order)));
  w.meta("z0", o.z0).meta("p0", o.p0).meta("h", o.h);
  w.meta("record_every", format_double(static_cast<double>(o.record_every)));
  w.meta("drift_normalisation", r.absolute ? "absolute" : "relative");
  w.meta("max_drift_pct", r.max_drift_pct).meta("final_drift_pct", r.final_drift_pct);
  w.header({"t", "I_value", "drift_pct"});
  for (const InvariantSample& s : r.series.samples) w.row({s.t, s.value, s.drift_pct});
  return w.str();
}

/// One row per 2 pi window: mean, (c_n, s_n) of y, the sin(2 tau) amplitude
/// of the first-order residual, and the detrended sin(3 tau) amplitude with
/// its prediction. The fitted secular slope is reported in the metadata.
inline std::string run_fourier(const FourierOptions& o) {
  const SystemParams p = validate_params(o.params);
  const double eps = p.series_drive();
  if (o.points_per_window < kMinPointsPerWindow)
    throw Error(ErrorKind::InsufficientSamples, "points per window must be >= 1000");
  const int windows = static_cast<int>(std::floor(o.tau_max / kTwoPi + 1e-9));
  if (windows < 5)
    throw Error(ErrorKind::InsufficientWindows, "tau_max must cover at least 5 windows");
  IntegrationConfig cfg;
  cfg.h = window_step(o.points_per_window);
  cfg.t_end = kTwoPi * windows;
  cfg.record_every = 1;
  const auto traj = integrate_y(p, cfg);
  const std::vector<double> y = detail::y_values(traj);
  const SampledSignal sig{traj.t0, traj.h, y};
  const SecularFit fit = secular_slope(traj, p, 2);

  CsvWriter w = detail::start_csv("fourier");
  detail::params_meta(w, p);
  w.meta("points_per_window", format_double(static_cast<double>(o.points_per_window)));
  w.meta("windows", format_double(windows));
  w.meta("s1_predicted", eps * std::pow(p.y0, -2.5) / 3.0);
  w.meta("secular_slope", fit.slope)
      .meta("secular_slope_predicted", fit.predicted)
      .meta("secular_r2", fit.r2)
      .meta("within_validity", fit.within_validity ? "true" : "false");

  std::vector<std::string> cols = {"window", "tau_center", "mean"};
  for (int n = 1; n <= o.harmonics; ++n) {
    cols.push_back("c" + std::to_string(n));
    cols.push_back("s" + std::to_string(n));
  }
  cols.insert(cols.end(), {"s2_residual", "s3_residual", "s3_predicted"});
  w.header(cols);
  for (int k = 0; k < windows; ++k) {
    const HarmonicWindow hw = project_harmonics(sig, k, o.harmonics);
    const ThirdHarmonic th = third_harmonic_check(p, traj, k);
    std::vector<double> row = {static_cast<double>(k), kTwoPi * (k + 0.5), hw.c[0]};
    for (int n = 1; n <= o.harmonics; ++n) {
      row.push_back(hw.c[static_cast<std::size_t>(n)]);
      row.push_back(hw.s[static_cast<std::size_t>(n)]);
    }
    row.insert(row.end(), {fit.amplitudes[static_cast<std::size_t>(k)], th.measured, th.predicted});
    w.row(row);
  }
  return w.str();
}

/// Columns t, f, z, p, w, I, drift_pct.
inline std::string run_ermakov(const ErmakovOptions& o) {
  const DriverFunction f = build_driver(o.driver, o.t_max);
  const auto traj =
      integrate_ermakov(f, o.z0, o.p0, o.w0, o.dw0, detail::make_config(o.h, o.t_max, o.record_every));
  const double i0 = lewis_invariant(traj.samples.front());
  const double norm = std::abs(i0) < kDriftGuard ? 1.0 : std::abs(i0);

  CsvWriter w = detail::start_csv("ermakov");
  w.meta("l0", o.driver.l0).meta("ts", o.driver.ts).meta("f0", o.driver.f0).meta("df", o.driver.df);
  w.meta("z0", o.z0).meta("p0", o.p0).meta("w0", traj.samples.front().w).meta("dw0", o.dw0);
  w.meta("h", o.h).meta("record_every", format_double(static_cast<double>(o.record_every)));
  w.meta("f_min", f.min_value).meta("min_w_stage", traj.stats.min_stage_positive);
  std::vector<double> rows_i;
  double max_drift = 0.0;
  for (const ErmakovState& s : traj.samples) {
    rows_i.push_back(lewis_invariant(s));
    max_drift = std::max(max_drift, std::abs(rows_i.back() - i0) / norm);
  }
  w.meta("max_rel_drift", max_drift);
  w.header({"t", "f", "z", "p", "w", "I", "drift_pct"});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const ErmakovState& s = traj.samples[k];
    w.row({s.t, f(s.t), s.z, s.p, s.w, rows_i[k], 100.0 * std::abs(rows_i[k] - i0) / norm});
  }
  return w.str();
}

/// Filaments of the exact-invariant level sets: columns filament, z0, p0,
/// t, z, p, alpha2, I_level.
inline std::string run_tube(const TubeOptions& o) {
  const SystemParams p = validate_params(o.params);
  if (o.periods < 1) throw Error(ErrorKind::InvalidArgument, "periods must be >= 1");
  IntegrationConfig cfg;
  cfg.h = window_step(o.points_per_period) / p.omega;
  cfg.t_end = kTwoPi / p.omega * o.periods;
  cfg.record_every = o.record_every;
  const auto filaments = tube_surface_samples(p, o.z0, o.p0, cfg);

  CsvWriter w = detail::start_csv("tube");
  detail::params_meta(w, p);
  w.meta("periods", format_double(o.periods));
  w.meta("points_per_period", format_double(static_cast<double>(o.points_per_period)));
  w.meta("record_every", format_double(static_cast<double>(o.record_every)));
  double worst = 0.0;
  for (const TubeFilament& f : filaments) worst = std::max(worst, f.max_rel_drift);
  w.meta("max_rel_drift", worst);
  w.header({"filament", "z0", "p0", "t", "z", "p", "alpha2", "I_level"});
  for (std::size_t i = 0; i < filaments.size(); ++i) {
    const TubeFilament& f = filaments[i];
    for (std::size_t k = 0; k < f.points.size(); ++k) {
      const TubePoint& q = f.points[k];
      w.row({static_cast<double>(i), f.z0, f.p0, q.t, q.z, q.p, f.alpha2[k], f.level});
    }
  }
  return w.str();
}

/// Gnuplot script for a CSV emitted by one of the commands above.
inline std::string plot_script(std::string_view csv_text, std::string_view csv_path,
                               std::string_view image_path = "") {
  const CsvTable table = parse_csv(csv_text);
  const std::string command = table.meta_value("command");
  if (command.empty() || table.columns.empty())
    throw Error(ErrorKind::MissingInput, "input is not a tubeint CSV");
  const std::string data = "'" + std::string(csv_path) + "'";
  std::string s;
  s += "set datafile separator ','\n";
  s += "set datafile commentschars '#'\n";
  s += "set datafile columnheaders\n";
  s += "set grid\n";
  if (!image_path.empty()) {
    s += "set terminal pngcairo size 1200,800\n";
    s += "set output '" + std::string(image_path) + "'\n";
  }
  if (command == "simulate-y") {
    s += "set xlabel 'tau'\nset ylabel 'y'\n";
    s += "plot " + data + " using 'tau':'y_numeric' with lines lc rgb 'red' title 'numeric', \\\n";
    s += "     " + data + " using 'tau':'y_series_o3' with lines lc rgb 'dark-green' title 'series (order 3)'\n";
  } else if (command == "invariant-drift") {
    s += "set xlabel 't'\nset ylabel 'drift (%)'\nunset key\n";
    s += "plot " + data + " using 't':'drift_pct' with lines lc rgb 'blue'\n";
  } else if (command == "ermakov") {
    s += "set multiplot layout 2,2\n";
    for (const char* col : {"f", "z", "w", "I"}) {
      s += "set xlabel 't'\nset ylabel '" + std::string(col) + "'\nunset key\n";
      s += "plot " + data + " using 't':'" + col + "' with lines\n";
    }
    s += "unset multiplot\n";
  } else if (command == "fourier") {
    s += "set xlabel 'tau'\nset ylabel 'amplitude'\n";
    s += "plot " + data + " using 'tau_center':'s1' with linespoints title 's1', \\\n";
    s += "     " + data + " using 'tau_center':'s2_residual' with linespoints title 's2 (residual)', \\\n";
    s += "     " + data + " using 'tau_center':'s3_residual' with linespoints title 's3'\n";
  } else if (command == "tube") {
    s += "set xlabel 'z'\nset ylabel 'p'\nset zlabel 't'\nunset key\n";
    s += "splot " + data + " using 'z':'p':'t':'filament' with lines lc variable\n";
  } else {
    throw Error(ErrorKind::MissingInput, "no plot layout for command '" + command + "'");
  }
  if (!image_path.empty()) s += "unset output\n";
  return s;
}

}  // namespace tubeint
