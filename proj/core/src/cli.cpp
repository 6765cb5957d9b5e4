#include "hylomorph/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hylomorph/config.hpp"
#include "hylomorph/dynamics.hpp"
#include "hylomorph/errors.hpp"
#include "hylomorph/hylomorphy.hpp"
#include "hylomorph/run_config.hpp"
#include "hylomorph/snapshot.hpp"
#include "hylomorph/solver.hpp"

namespace hylo::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

Json q(double value, const char* definition) {
  Json j;
  j["value"] = value;
  j["definition"] = definition;
  return j;
}

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

Json config_json(const ConfigValue& v) {
  struct Visitor {
    Json operator()(bool b) const { return b; }
    Json operator()(std::int64_t i) const { return i; }
    Json operator()(double d) const { return d; }
    Json operator()(const std::string& s) const { return s; }
    Json operator()(const ConfigValue::Array& a) const {
      Json j = Json::array();
      for (const ConfigValue& e : a) j.push_back(config_json(e));
      return j;
    }
  };
  return std::visit(Visitor{}, v.data);
}

Json config_echo(const RunConfig& rc) {
  const Config c = rc.to_config();
  Json j;
  for (const std::string& k : c.keys()) j[k] = config_json(c.at(k));
  return j;
}

struct Context {
  std::string command;
  RunConfig rc;
  bool strict = false;
  std::ostream& out;
  fs::path dir;

  void write_json(const Json& j) const { write_file_atomic(dir / (command + ".json"), j.dump(2) + "\n"); }
  void write_csv(const std::string& name, const std::string& text) const {
    if (rc.wants("csv")) write_file_atomic(dir / name, text);
  }
  void write_snap(const std::string& name, const Snapshot& s) const {
    if (rc.wants("snapshot")) write_snapshot(dir / name, s);
  }
};

Json header(const Context& ctx) {
  Json j;
  j["command"] = ctx.command;
  j["model"] = ctx.rc.type == ModelType::Nls ? "nls" : "nkg";
  j["config"] = config_echo(ctx.rc);
  return j;
}

Json soliton_json(const SolitonResult& r, double e0) {
  Json j;
  j["energy"] = q(r.energy, "E at the minimizer");
  j["charge"] = q(r.charge, "C at the minimizer (signed)");
  j["lambda"] = q(r.lambda, "lambda = E/|C|");
  j["omega"] = q(r.omega, "omega, frequency of the standing wave psi0 e^{-i omega t}");
  j["residual"] = q(r.residual, "relative stationary residual");
  j["iterations"] = q(r.iterations, "descent iterations");
  j["e0_rayleigh"] = q(e0, "e0, small-field energy/charge rate of one cell");
  j["existence_flag"] = r.lambda < e0 * (1.0 - 1e-9);
  j["converged"] = r.converged;
  j["start"] = q(static_cast<double>(r.start), "index of the winning restart");
  return j;
}

std::string monitor_csv(const std::vector<MonitorSample>& ms) {
  std::string s = "t,E,C,orbit_distance,lyapunov\n";
  for (const MonitorSample& m : ms) {
    s += num(m.t) + "," + num(m.energy) + "," + num(m.charge) + "," + num(m.orbit_distance) + "," + num(m.lyapunov) + "\n";
  }
  return s;
}

std::string snap_name(std::int64_t step) {
  std::ostringstream os;
  os << "evolve_" << std::setw(8) << std::setfill('0') << step << ".snap";
  return os.str();
}

Json conservation_json(const std::vector<MonitorSample>& ms) {
  const MonitorSample& m0 = ms.front();
  double de = 0.0, dc = 0.0, dist = 0.0;
  for (const MonitorSample& m : ms) {
    de = std::max(de, std::abs(m.energy - m0.energy));
    dc = std::max(dc, std::abs(m.charge - m0.charge));
    dist = std::max(dist, m.orbit_distance);
  }
  Json j;
  j["energy_initial"] = q(m0.energy, "E at t = 0");
  j["energy_final"] = q(ms.back().energy, "E at the last monitor");
  j["max_energy_drift"] = q(m0.energy != 0.0 ? de / std::abs(m0.energy) : de, "max |E(t) - E(0)| / |E(0)|");
  j["charge_initial"] = q(m0.charge, "C at t = 0");
  j["max_charge_drift"] = q(m0.charge != 0.0 ? dc / std::abs(m0.charge) : dc, "max |C(t) - C(0)| / |C(0)|");
  j["max_orbit_distance"] = q(dist, "max over t of the quadratic-norm distance to the initial orbit");
  return j;
}

Json standing_json(const StandingWaveReport& r) {
  Json j;
  j["omega"] = q(r.omega, "reference frequency from the initial state");
  j["phase_rate"] = q(r.phase_rate, "fitted rate of -arg <psi(t), psi(0)>");
  j["phase_rate_error"] = q(r.phase_rate_error, "|phase_rate - omega| / |omega|");
  j["max_modulus_deviation"] = q(r.max_modulus_deviation, "max || |psi(t)| - |psi(0)| ||_2 / ||psi(0)||_2");
  j["max_tracking_error"] = q(r.max_tracking_error, "max || psi(t) - psi(0) e^{-i omega t} ||_2 / ||psi(0)||_2");
  return j;
}

Json stability_json(const StabilityReport& r, double delta) {
  Json j;
  j["delta"] = q(delta, "perturbation size relative to ||psi0|| (quadratic norm)");
  j["reference_norm"] = q(r.reference_norm, "||psi0|| in the quadratic norm");
  j["initial_distance"] = q(r.initial_distance, "orbit distance at t = 0");
  j["max_orbit_distance"] = q(r.max_orbit_distance, "max over t of the orbit distance (quadratic norm)");
  j["max_relative_distance"] = q(r.max_relative_distance, "max_orbit_distance / reference_norm");
  j["initial_lyapunov"] = q(r.initial_lyapunov, "V = (E - c_sigma)^2 + (|C| - sigma)^2 at t = 0");
  j["max_lyapunov"] = q(r.max_lyapunov, "max over t of V");
  Json track = Json::array();
  for (const CellSample& c : r.cell_track) {
    Json e;
    e["t"] = q(c.t, "time");
    e["cell"] = q(static_cast<double>(c.cell.linear), "linear index of the cell minimizing E_j/C_j");
    e["ratio"] = q(c.cell.ratio, "E_j/C_j of that cell");
    track.push_back(e);
  }
  j["best_cell_track"] = track;
  j["blowup"] = r.blowup;
  if (r.blowup) j["diagnostic"] = r.diagnostic;
  return j;
}

template <class Model>
int cmd_describe(const Context& ctx, const Model& model) {
  const Grid& g = model.grid();
  Json j = header(ctx);
  Json d;
  d["points"] = q(static_cast<double>(g.size()), "grid points in the box");
  d["weight"] = q(g.weight(), "quadrature weight |det A| / prod n");
  d["box_volume"] = q(g.box_volume(), "|det A| * prod m");
  d["inscribed_radius"] = q(g.inscribed_radius(), "radius of the largest ball inside the box");
  d["alpha"] = q(compute_alpha(model), "alpha, alpha^2 = inf_s 2W(s)/s^2");
  const Nonlinearity& w = model.nonlinearity();
  if (w.family() == NonlinearityFamily::QuarticSextic) {
    d["positivity_bound"] = q(3.0 * w.a() * w.a() / (16.0 * w.h() * w.h()), "smallest b with W >= 0, 3a^2/(16h^2)");
  }
  if constexpr (std::is_same_v<Model, NkgModel>) {
    d["h0"] = q(model.h0(), "h0 = min_x h(x)");
    d["h_max"] = q(model.h_max(), "max_x h(x)");
  }
  j["derived"] = d;
  ctx.write_json(j);
  ctx.out << ctx.rc.to_config().to_toml();
  return kExitOk;
}

template <class Model>
int cmd_hylomorphy(const Context& ctx, const Model& model) {
  const HylomorphyReport r = check_hylomorphy(model);
  Json j = header(ctx);
  const bool nls = std::is_same_v<Model, NlsModel>;
  j["alpha"] = q(r.alpha, "alpha, alpha^2 = inf_s 2W(s)/s^2");
  j["e0_lower"] = q(r.e0_lower, "lower bound for e0");
  j["e0_upper"] = q(r.e0_upper, "upper bound for e0");
  j["e0_rayleigh"] = q(r.e0_rayleigh, "e0 from the single-cell Rayleigh quotient");
  j["lambda_star_upper"] = q(r.lambda_star_upper, "min lambda = E/|C| over plateau test profiles, null if the box is too small");
  j["margin"] = q(r.margin, nls ? "h^2/2 - alpha^2/2 - ||V||_inf" : "h0 - alpha");
  j["passes"] = r.passes;
  ctx.write_json(j);
  ctx.out << "alpha = " << num(r.alpha) << "\nmargin = " << num(r.margin) << "\npasses = "
          << (r.passes ? "true" : "false") << "\n";
  return kExitOk;
}

template <class Model>
SolitonResult solve(const Context& ctx, const Model& model, const std::optional<Field>& initial = std::nullopt) {
  if constexpr (std::is_same_v<Model, NlsModel>) return minimize_nls(model, ctx.rc.solver_options(), initial);
  else return minimize_nkg(model, ctx.rc.solver_options(), initial);
}

template <class Model>
int cmd_minimize(const Context& ctx, const Model& model) {
  const SolitonResult r = solve(ctx, model);
  const double e0 = estimate_e0(model).rayleigh;
  Json j = header(ctx);
  j["result"] = soliton_json(r, e0);
  if constexpr (std::is_same_v<Model, NlsModel>) ctx.write_snap("minimizer.snap", make_snapshot(r.profile));
  else ctx.write_snap("minimizer.snap", make_snapshot(r.nkg_state()));
  ctx.write_json(j);
  ctx.out << "lambda = " << num(r.lambda) << " (e0 = " << num(e0) << "), residual = " << num(r.residual)
          << (r.converged ? "" : " NOT CONVERGED") << "\n";
  return !r.converged && ctx.strict ? kExitNotConverged : kExitOk;
}

template <class Model>
int cmd_sweep(const Context& ctx, const Model& model) {
  const SweepTable t = sigma_sweep(model, ctx.rc.sigmas, ctx.rc.solver_options());
  Json j = header(ctx);
  j["e0_rayleigh"] = q(t.e0_rayleigh, "e0 from the single-cell Rayleigh quotient");
  Json rows = Json::array();
  std::string csv = "sigma,lambda_upper,E,omega,converged,existence_flag\n";
  bool all = true;
  for (const SweepRow& r : t.rows) {
    Json e;
    e["sigma"] = q(r.sigma, "charge constraint |C| = sigma");
    e["lambda_upper"] = q(r.lambda_upper, "lambda = E/|C| at the computed minimizer");
    e["energy"] = q(r.energy, "E at the computed minimizer");
    e["omega"] = q(r.omega, "omega, standing-wave frequency");
    e["converged"] = r.converged;
    e["existence_flag"] = r.existence_flag;
    e["sigma_lambda_increasing"] = r.sigma_lambda_increasing;
    rows.push_back(e);
    csv += num(r.sigma) + "," + num(r.lambda_upper) + "," + num(r.energy) + "," + num(r.omega) + "," +
           (r.converged ? "1" : "0") + "," + (r.existence_flag ? "1" : "0") + "\n";
    all = all && r.converged;
    ctx.out << "sigma = " << num(r.sigma) << "  lambda = " << num(r.lambda_upper) << "\n";
  }
  j["rows"] = rows;
  ctx.write_csv("sweep.csv", csv);
  ctx.write_json(j);
  return !all && ctx.strict ? kExitNotConverged : kExitOk;
}

int cmd_evolve(const Context& ctx, const NlsModel& model) {
  const Grid& g = model.grid();
  Json j = header(ctx);
  Field psi0 = Field::zeros(g);
  bool converged = true;
  if (ctx.rc.input) {
    psi0 = snapshot_field(read_snapshot(*ctx.rc.input), g);
  } else {
    const SolitonResult r = solve(ctx, model);
    converged = r.converged;
    j["minimizer"] = soliton_json(r, estimate_e0(model).rayleigh);
    psi0 = r.profile;
  }
  const NlsVariation var = first_variation(model, psi0);
  const double omega = real_inner(var.energy, psi0) / (2.0 * charge(model, psi0).value);
  StandingWaveProbe probe(psi0, omega);
  const EvolveOptions eo = ctx.rc.evolve_options();
  const NlsTrajectory traj = evolve_nls(model, psi0, eo, std::nullopt, [&](double t, const Field& s) {
    probe.observe(t, s);
    const auto step = static_cast<std::int64_t>(std::llround(t / eo.dt));
    if (ctx.rc.snapshot_stride > 0 && step % ctx.rc.snapshot_stride == 0) ctx.write_snap(snap_name(step), make_snapshot(s));
  });
  ctx.write_snap("evolve_final.snap", make_snapshot(traj.final_state));
  ctx.write_csv("evolve.csv", monitor_csv(traj.monitors));
  j["steps"] = q(static_cast<double>(eo.steps), "time steps");
  j["dt"] = q(eo.dt, "time step");
  j["conservation"] = conservation_json(traj.monitors);
  j["standing_wave"] = standing_json(probe.finish(traj.blowup));
  j["blowup"] = traj.blowup;
  if (traj.blowup) j["diagnostic"] = traj.diagnostic;
  ctx.write_json(j);
  if (traj.blowup) {
    ctx.out << "blowup: " << traj.diagnostic << "\n";
    return kExitBlowup;
  }
  return !converged && ctx.strict ? kExitNotConverged : kExitOk;
}

int cmd_evolve(const Context& ctx, const NkgModel& model) {
  const Grid& g = model.grid();
  Json j = header(ctx);
  NkgState s0(Field::zeros(g), Field::zeros(g));
  bool converged = true;
  if (ctx.rc.input) {
    s0 = snapshot_state(read_snapshot(*ctx.rc.input), g);
  } else {
    const SolitonResult r = solve(ctx, model);
    converged = r.converged;
    j["minimizer"] = soliton_json(r, estimate_e0(model).rayleigh);
    s0 = r.nkg_state();
  }
  const double rho = real_inner(s0.psi, s0.psi);
  const double omega = -charge(model, s0).value / rho;
  StandingWaveProbe probe(s0.psi, omega);
  const EvolveOptions eo = ctx.rc.evolve_options();
  const NkgTrajectory traj = evolve_nkg(model, s0, eo, std::nullopt, [&](double t, const NkgState& s) {
    probe.observe(t, s.psi);
    const auto step = static_cast<std::int64_t>(std::llround(t / eo.dt));
    if (ctx.rc.snapshot_stride > 0 && step % ctx.rc.snapshot_stride == 0) ctx.write_snap(snap_name(step), make_snapshot(s));
  });
  ctx.write_snap("evolve_final.snap", make_snapshot(traj.final_state));
  ctx.write_csv("evolve.csv", monitor_csv(traj.monitors));
  j["steps"] = q(static_cast<double>(eo.steps), "time steps");
  j["dt"] = q(eo.dt, "time step");
  j["cfl_limit"] = q(nkg_cfl_limit(model), "2 / sqrt(|k|^2_max + max h^2)");
  j["conservation"] = conservation_json(traj.monitors);
  j["standing_wave"] = standing_json(probe.finish(traj.blowup));
  j["blowup"] = traj.blowup;
  if (traj.blowup) j["diagnostic"] = traj.diagnostic;
  ctx.write_json(j);
  if (traj.blowup) {
    ctx.out << "blowup: " << traj.diagnostic << "\n";
    return kExitBlowup;
  }
  return !converged && ctx.strict ? kExitNotConverged : kExitOk;
}

template <class Model>
int cmd_stability(const Context& ctx, const Model& model) {
  const SolitonResult r = solve(ctx, model);
  Json j = header(ctx);
  j["minimizer"] = soliton_json(r, estimate_e0(model).rayleigh);
  if (!r.converged) {
    j["error"] = "the stability experiment needs a converged minimizer";
    ctx.write_json(j);
    ctx.out << "minimizer did not converge\n";
    return kExitNotConverged;
  }
  const StabilityOptions so = ctx.rc.stability_options();
  Trajectory<std::conditional_t<std::is_same_v<Model, NlsModel>, Field, NkgState>> traj(
      [&] {
        if constexpr (std::is_same_v<Model, NlsModel>) return r.profile;
        else return r.nkg_state();
      }());
  const StabilityReport rep = stability_experiment(model, r, so, &traj);
  j["stability"] = stability_json(rep, so.delta);
  ctx.write_csv("stability.csv", monitor_csv(traj.monitors));
  ctx.write_json(j);
  ctx.out << "max orbit distance = " << num(rep.max_orbit_distance) << " (relative " << num(rep.max_relative_distance)
          << ")\n";
  return rep.blowup ? kExitBlowup : kExitOk;
}

template <class Model>
int dispatch(const Context& ctx, const Model& model) {
  const std::string& c = ctx.command;
  if (c == "describe") return cmd_describe(ctx, model);
  if (c == "hylomorphy") return cmd_hylomorphy(ctx, model);
  if (c == "minimize") return cmd_minimize(ctx, model);
  if (c == "sweep") return cmd_sweep(ctx, model);
  if (c == "evolve") return cmd_evolve(ctx, model);
  return cmd_stability(ctx, model);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hylomorphic solitons on periodic lattices", "hylomorph"};
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  bool strict = false;
  app.add_option("command", command, "describe | hylomorphy | minimize | sweep | evolve | stability")
      ->required()
      ->check(CLI::IsMember({"describe", "hylomorphy", "minimize", "sweep", "evolve", "stability"}));
  app.add_option("--config", config_path, "TOML run configuration")->required();
  app.add_option("--set", overrides, "override a config key, key=value");
  app.add_flag("--strict", strict, "exit 3 when a minimization does not converge");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "hylomorph: " << e.what() << "\n";
    return kExitConfig;
  }

  RunConfig rc;
  try {
    Config cfg = Config::load(config_path);
    for (const std::string& o : overrides) cfg.set(o);
    rc = RunConfig::from_config(cfg, command);
  } catch (const ConfigError& e) {
    err << "hylomorph: config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const fs::path dir = rc.directory;
    fs::create_directories(dir);
    Context ctx{command, rc, strict, out, dir};
    const Grid grid = rc.grid();
    if (rc.type == ModelType::Nls) return dispatch(ctx, rc.nls_model(grid));
    return dispatch(ctx, rc.nkg_model(grid));
  } catch (const ConfigError& e) {
    err << "hylomorph: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "hylomorph: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace hylo::cli
