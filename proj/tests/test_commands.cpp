#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "tubeint/commands.hpp"

using namespace tubeint;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::MissingInput;
}

double meta_number(const CsvTable& t, const std::string& key) { return std::stod(t.meta_value(key)); }

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Csv, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 5e-324}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(500.0), "500");
}

TEST(Csv, WriteAndParse) {
  CsvWriter w;
  w.meta("command", "x").meta("eps", 0.05).header({"a", "b"}).row({1.0, 0.25}).row({-3.0, 1e-20});
  EXPECT_EQ(w.str(), "# command x\n# eps 0.05\na,b\n1,0.25\n-3,1e-20\n");
  const CsvTable t = parse_csv(w.str());
  EXPECT_EQ(t.meta_value("command"), "x");
  EXPECT_EQ(t.column("b"), 1);
  EXPECT_EQ(t.column("zz"), -1);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][1], 1e-20);
}

TEST(SimulateY, UnforcedIsFlat) {
  SimulateYOptions o;
  o.params = make_params(0.0, 1.0);
  o.tau_max = 10.0;
  const CsvTable t = parse_csv(run_simulate_y(o));
  ASSERT_EQ(t.columns, (std::vector<std::string>{"tau", "y_numeric", "y_series_o1", "y_series_o2",
                                                 "y_series_o3", "abs_err_o3", "rel_err_o3"}));
  ASSERT_EQ(t.rows.size(), 101u);
  for (const auto& r : t.rows) {
    for (int c = 1; c <= 4; ++c) EXPECT_EQ(r[static_cast<std::size_t>(c)], 1.0);
    EXPECT_EQ(r[5], 0.0);
    EXPECT_EQ(r[6], 0.0);
  }
}

TEST(SimulateY, Deterministic) {
  SimulateYOptions o;
  o.tau_max = 20.0;
  EXPECT_EQ(run_simulate_y(o), run_simulate_y(o));
  const CsvTable t = parse_csv(run_simulate_y(o));
  EXPECT_EQ(t.meta_value("command"), "simulate-y");
  EXPECT_EQ(t.meta_value("version"), std::string(kVersion));
  EXPECT_EQ(meta_number(t, "tau_star"), 1920.0);
}

TEST(SimulateY, SeriesNeedsCosineDrive) {
  SimulateYOptions o;
  RawParams r;
  r.c2 = 0.1;
  o.params = validate_params(r);
  EXPECT_EQ(kind_of([&] { run_simulate_y(o); }), ErrorKind::InvalidArgument);
}

TEST(InvariantDrift, ExactModeAtSmallY0) {
  DriftOptions o;
  o.mode = DriftMode::Exact;
  o.params = make_params(0.05, 0.8);
  const CsvTable t = parse_csv(run_invariant_drift(o));
  EXPECT_EQ(t.meta_value("mode"), "exact");
  EXPECT_LT(meta_number(t, "max_drift_pct"), 1e-4);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "I_value", "drift_pct"}));
  EXPECT_EQ(t.rows.size(), 5001u);
}

TEST(InvariantDrift, UnforcedPerturbative) {
  DriftOptions o;
  o.params = make_params(0.0, 1.1);
  o.t_max = 100.0;
  const CsvTable t = parse_csv(run_invariant_drift(o));
  EXPECT_LT(meta_number(t, "max_drift_pct"), 1e-10);
  EXPECT_EQ(t.meta_value("order"), "3");
}

TEST(InvariantDrift, EscapeIsNumericalError) {
  DriftOptions o;
  o.params = make_params(0.05, 0.3);
  o.t_max = 50.0;
  try {
    run_invariant_drift(o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Escape);
    EXPECT_TRUE(is_numerical(e.kind()));
  }
}

TEST(Fourier, DefaultsReportSlopeAndThirdHarmonic) {
  const CsvTable t = parse_csv(run_fourier(FourierOptions{}));
  const double slope = meta_number(t, "secular_slope");
  EXPECT_NEAR(slope, 5.21e-4, 0.1 * 5.21e-4);
  EXPECT_GE(t.column("s3_residual"), 0);
  EXPECT_GE(t.column("s3_predicted"), 0);
  EXPECT_EQ(t.rows.size(), 47u);
  EXPECT_NEAR(t.rows[0][static_cast<std::size_t>(t.column("s1"))], 0.1 / 3.0, 3e-4);
}

TEST(Fourier, UnforcedHasNoHarmonics) {
  FourierOptions o;
  o.params = make_params(0.0, 1.0);
  o.tau_max = 40.0;
  const CsvTable t = parse_csv(run_fourier(o));
  for (const auto& r : t.rows)
    for (const char* col : {"c1", "s1", "c2", "s2", "c3", "s3", "s2_residual", "s3_residual"})
      EXPECT_LT(std::abs(r[static_cast<std::size_t>(t.column(col))]), 1e-10) << col;
}

TEST(Fourier, Rejections) {
  FourierOptions o;
  o.tau_max = 20.0;
  EXPECT_EQ(kind_of([&] { run_fourier(o); }), ErrorKind::InsufficientWindows);
  o.tau_max = 300.0;
  o.points_per_window = 999;
  EXPECT_EQ(kind_of([&] { run_fourier(o); }), ErrorKind::InsufficientSamples);
}

TEST(ErmakovCommand, DefaultsConserve) {
  const CsvTable t = parse_csv(run_ermakov(ErmakovOptions{}));
  EXPECT_LT(meta_number(t, "max_rel_drift"), 1e-6);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "f", "z", "p", "w", "I", "drift_pct"}));
  EXPECT_EQ(t.rows.size(), 2001u);
}

TEST(ErmakovCommand, ConstantAndFixedPointDrivers) {
  ErmakovOptions o;
  o.driver.df = 0.0;
  o.t_max = 20.0;
  CsvTable t = parse_csv(run_ermakov(o));
  for (const auto& r : t.rows) {
    EXPECT_EQ(r[1], 1.0);
    EXPECT_NEAR(r[4], 1.0, 1e-13);
  }
  o.driver.df = 0.3;
  o.driver.l0 = 0.5;
  t = parse_csv(run_ermakov(o));
  // knots sit on the fixed point; the natural spline's ringing from the
  // first two knots decays geometrically between them
  for (const auto& r : t.rows) {
    if (r[0] >= 2.0 && std::abs(r[0] - std::round(r[0])) < 1e-9) {
      EXPECT_DOUBLE_EQ(r[1], 0.7);
    }
    if (r[0] >= 20.0) {
      EXPECT_NEAR(r[1], 0.7, 1e-9);
    }
  }
}

TEST(TubeCommand, Filaments) {
  TubeOptions o;
  o.periods = 2;
  const CsvTable t = parse_csv(run_tube(o));
  EXPECT_LT(meta_number(t, "max_rel_drift"), 1e-6);
  EXPECT_EQ(t.rows.size(), 3u * 201u);
}

TEST(PlotScript, Layouts) {
  SimulateYOptions s;
  s.tau_max = 1.0;
  const std::string sim = plot_script(run_simulate_y(s), "sim.csv");
  EXPECT_NE(sim.find("'y_numeric'"), std::string::npos);
  EXPECT_NE(sim.find("'y_series_o3'"), std::string::npos);
  EXPECT_EQ(count(sim, "with lines"), 2u);

  DriftOptions d;
  d.t_max = 1.0;
  const std::string drift = plot_script(run_invariant_drift(d), "drift.csv");
  EXPECT_NE(drift.find("'drift_pct'"), std::string::npos);
  EXPECT_EQ(count(drift, "with lines"), 1u);

  ErmakovOptions e;
  e.t_max = 1.0;
  const std::string erm = plot_script(run_ermakov(e), "erm.csv", "erm.png");
  EXPECT_NE(erm.find("layout 2,2"), std::string::npos);
  for (const char* col : {"'f'", "'z'", "'w'", "'I'"}) EXPECT_NE(erm.find(col), std::string::npos) << col;
  EXPECT_NE(erm.find("erm.png"), std::string::npos);
  EXPECT_EQ(plot_script(run_ermakov(e), "erm.csv"), plot_script(run_ermakov(e), "erm.csv"));
}

TEST(PlotScript, RejectsForeignInput) {
  EXPECT_EQ(kind_of([] { plot_script("a,b\n1,2\n", "x.csv"); }), ErrorKind::MissingInput);
  EXPECT_EQ(kind_of([] { plot_script("# command other\na\n1\n", "x.csv"); }), ErrorKind::MissingInput);
}
