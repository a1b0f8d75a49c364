#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "tubeint/tubeint.hpp"

namespace {

constexpr const char* kExperiments = R"(Experiments:
  tubeint simulate-y --y0 1 --eps 0.1 --tau-max 500           series vs RK4, well inside tau*
  tubeint simulate-y --y0 0.7 --eps 0.1 --tau-max 500         series breakdown beyond tau*
  tubeint invariant-drift --mode perturbative --eps 0.05 --y0 1.2   (repeat for y0 = 1.1, 0.9, 0.8)
  tubeint invariant-drift --mode exact --eps 0.05 --y0 0.8    exact invariant, integrator drift only
  tubeint fourier --eps 0.1 --y0 1 --tau-max 300               s1, secular s2 slope, s3
  tubeint fourier --eps 0.2 --y0 1                             third-harmonic amplitude
  tubeint ermakov                                              logistic driver, Lewis invariant
  tubeint tube --eps 0.05 --y0 1.1                             invariant tube filaments
  tubeint gplot --input run.csv --output run.gp                plot script for any CSV above

Every subcommand accepts --config FILE with `key = value` lines; flags override the file.
TUBEINT_SEED is reserved and ignored; the logistic seed is --l0.
Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.)";

struct ParamFlags {
  double omega = 1.0;
  std::optional<double> eps;
  std::optional<double> c1;
  std::optional<double> c2;
  double y0 = 1.0;
  double yp0 = 0.0;
  double ypp0 = 0.0;

  void attach(CLI::App* app, double default_eps, double default_y0) {
    default_eps_ = default_eps;
    y0 = default_y0;
    app->add_option("--omega", omega, "Angular frequency omega")->capture_default_str();
    app->add_option("--eps", eps, "Drive amplitude epsilon = sqrt(c1^2+c2^2)/omega^3 (default " +
                                      tubeint::format_double(default_eps) + ")");
    app->add_option("--c1", c1, "cos(omega t) drive coefficient");
    app->add_option("--c2", c2, "sin(omega t) drive coefficient");
    app->add_option("--y0", y0, "Initial alpha2 value")->capture_default_str();
    app->add_option("--yp0", yp0, "Initial alpha2' (tau units)")->capture_default_str();
    app->add_option("--ypp0", ypp0, "Initial alpha2'' (tau units)")->capture_default_str();
  }

  tubeint::SystemParams resolve() const {
    tubeint::RawParams raw;
    raw.omega = omega;
    raw.c1 = c1;
    raw.c2 = c2;
    raw.epsilon = eps;
    if (!eps && !c1 && !c2) raw.epsilon = default_eps_;
    raw.y0 = y0;
    raw.yp0 = yp0;
    raw.ypp0 = ypp0;
    return tubeint::validate_params(raw);
  }

 private:
  double default_eps_ = 0.0;
};

void add_config(CLI::App* app) {
  app->add_option("--config", "Read `key = value` defaults from a file; flags override it");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && (out.front() == '"' || out.front() == '\'') && out.back() == out.front())
    out = out.substr(1, out.size() - 2);
  return out;
}

// Expands `--config FILE` into `--key value` arguments placed before the
// command-line flags. Keys also given on the command line are skipped.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  std::size_t sub = 0;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (sub == 0 && !args[i].starts_with("-")) sub = i;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty() || sub == 0) return args;
  std::ifstream f(path);
  if (!f) throw tubeint::Error(tubeint::ErrorKind::MissingInput, "cannot read config " + path);
  auto given = [&](const std::string& key) {
    for (std::size_t i = sub + 1; i < args.size(); ++i)
      if (args[i] == "--" + key || args[i].starts_with("--" + key + "=")) return true;
    return false;
  };
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw tubeint::Error(tubeint::ErrorKind::InvalidArgument,
                           path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config" || given(key)) continue;
    extra.push_back("--" + key);
    extra.push_back(trim(t.substr(eq + 1)));
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, extra.begin(), extra.end());
  return args;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw tubeint::Error(tubeint::ErrorKind::MissingInput, "cannot write " + out_path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw tubeint::Error(tubeint::ErrorKind::MissingInput, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tube-integrable oscillator toolkit"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.footer(kExperiments);
  app.require_subcommand(1);
  std::string out_path;

  ParamFlags sim_params;
  tubeint::SimulateYOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate-y", "RK4 alpha2 against the order 1-3 series");
  add_config(sim_cmd);
  sim_params.attach(sim_cmd, 0.1, 1.0);
  sim_cmd->add_option("--h", sim.h, "RK4 step in tau")->capture_default_str();
  sim_cmd->add_option("--tau-max", sim.tau_max, "End of the tau range")->capture_default_str();
  sim_cmd->add_option("--record-every", sim.record_every, "Emit every n-th step")->capture_default_str();
  sim_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  ParamFlags drift_params;
  tubeint::DriftOptions drift;
  std::string mode = "perturbative";
  auto* drift_cmd = app.add_subcommand("invariant-drift", "Drift of the quadratic invariant along z(t)");
  add_config(drift_cmd);
  drift_params.attach(drift_cmd, 0.05, 1.1);
  drift_cmd->add_option("--mode", mode, "exact | perturbative")
      ->check(CLI::IsMember({"exact", "perturbative"}))
      ->capture_default_str();
  drift_cmd->add_option("--order", drift.order, "Series order 1-3 (perturbative mode)")
      ->capture_default_str();
  drift_cmd->add_option("--z0", drift.z0, "Initial z")->capture_default_str();
  drift_cmd->add_option("--p0", drift.p0, "Initial p = z'")->capture_default_str();
  drift_cmd->add_option("--h", drift.h, "RK4 step in t")->capture_default_str();
  drift_cmd->add_option("--t-max", drift.t_max, "End time")->capture_default_str();
  drift_cmd->add_option("--record-every", drift.record_every, "Emit every n-th step")
      ->capture_default_str();
  drift_cmd->add_option("--escape-z", drift.escape_z, "Abort when |z| exceeds this")
      ->capture_default_str();
  drift_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  ParamFlags fourier_params;
  tubeint::FourierOptions fourier;
  auto* fourier_cmd = app.add_subcommand("fourier", "Per-window harmonics and the secular slope");
  add_config(fourier_cmd);
  fourier_params.attach(fourier_cmd, 0.1, 1.0);
  fourier_cmd->add_option("--tau-max", fourier.tau_max, "Covered tau range (whole 2 pi windows)")
      ->capture_default_str();
  fourier_cmd->add_option("--points", fourier.points_per_window, "Samples per 2 pi window (>= 1000)")
      ->capture_default_str();
  fourier_cmd->add_option("--harmonics", fourier.harmonics, "Highest harmonic (<= 8)")
      ->capture_default_str();
  fourier_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  tubeint::ErmakovOptions erm;
  auto* erm_cmd = app.add_subcommand("ermakov", "Logistic-driven linear oscillator with Pinney amplitude");
  add_config(erm_cmd);
  erm_cmd->add_option("--l0", erm.driver.l0, "Logistic seed in [0, 1]")->capture_default_str();
  erm_cmd->add_option("--ts", erm.driver.ts, "Knot spacing T_s")->capture_default_str();
  erm_cmd->add_option("--f0", erm.driver.f0, "Base level f0")->capture_default_str();
  erm_cmd->add_option("--df", erm.driver.df, "Modulation depth in [0, f0)")->capture_default_str();
  erm_cmd->add_option("--z0", erm.z0, "Initial z")->capture_default_str();
  erm_cmd->add_option("--p0", erm.p0, "Initial p")->capture_default_str();
  erm_cmd->add_option("--w0", erm.w0, "Initial w (default f(0)^(-1/4))");
  erm_cmd->add_option("--dw0", erm.dw0, "Initial w'")->capture_default_str();
  erm_cmd->add_option("--h", erm.h, "RK4 step")->capture_default_str();
  erm_cmd->add_option("--t-max", erm.t_max, "End time")->capture_default_str();
  erm_cmd->add_option("--record-every", erm.record_every, "Emit every n-th step")->capture_default_str();
  erm_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  ParamFlags tube_params;
  tubeint::TubeOptions tube;
  auto* tube_cmd = app.add_subcommand("tube", "Level-set filaments of the exact invariant");
  add_config(tube_cmd);
  tube_params.attach(tube_cmd, 0.05, 1.1);
  tube_cmd->add_option("--z0", tube.z0, "Initial z values")->delimiter(',')->capture_default_str();
  tube_cmd->add_option("--p0", tube.p0, "Initial p values")->delimiter(',')->capture_default_str();
  tube_cmd->add_option("--periods", tube.periods, "Number of drive periods")->capture_default_str();
  tube_cmd->add_option("--points", tube.points_per_period, "Steps per drive period")
      ->capture_default_str();
  tube_cmd->add_option("--record-every", tube.record_every, "Emit every n-th step")
      ->capture_default_str();
  tube_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  std::string plot_input;
  std::string plot_image;
  auto* plot_cmd = app.add_subcommand("gplot", "Gnuplot script for a CSV written by another subcommand");
  add_config(plot_cmd);
  plot_cmd->add_option("--input", plot_input, "CSV produced by tubeint")->required();
  plot_cmd->add_option("--image", plot_image, "Render to this PNG instead of the screen");
  plot_cmd->add_option("--output", out_path, "Script path (default stdout)");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const tubeint::Error& e) {
    std::cerr << "tubeint: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim_cmd->parsed()) {
      sim.params = sim_params.resolve();
      emit(tubeint::run_simulate_y(sim), out_path);
    } else if (drift_cmd->parsed()) {
      drift.params = drift_params.resolve();
      drift.mode = mode == "exact" ? tubeint::DriftMode::Exact : tubeint::DriftMode::Perturbative;
      emit(tubeint::run_invariant_drift(drift), out_path);
    } else if (fourier_cmd->parsed()) {
      fourier.params = fourier_params.resolve();
      emit(tubeint::run_fourier(fourier), out_path);
    } else if (erm_cmd->parsed()) {
      emit(tubeint::run_ermakov(erm), out_path);
    } else if (tube_cmd->parsed()) {
      tube.params = tube_params.resolve();
      emit(tubeint::run_tube(tube), out_path);
    } else if (plot_cmd->parsed()) {
      emit(tubeint::plot_script(read_file(plot_input), plot_input, plot_image), out_path);
    }
  } catch (const tubeint::Error& e) {
    std::cerr << "tubeint: " << e.what() << '\n';
    return tubeint::is_numerical(e.kind()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "tubeint: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
