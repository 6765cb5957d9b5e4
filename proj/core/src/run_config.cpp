#include "hylomorph/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hylomorph/errors.hpp"

namespace hylo {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model.type",     "model.h",       "model.mass_amplitude", "model.nonlinearity", "model.a",
      "model.b",        "model.potential", "model.v0",           "model.lattice",      "grid.dim",
      "grid.cells",     "grid.points_per_cell", "solver.sigma",  "solver.sigmas",      "solver.step",
      "solver.tol",     "solver.max_iter", "solver.restarts",    "solver.seed",        "evolve.dt",
      "evolve.steps",   "evolve.stride", "evolve.snapshot_stride", "evolve.delta",     "evolve.horizon",
      "evolve.seed",    "evolve.input",  "output.directory",     "output.formats"};
  return keys;
}

const std::set<std::string>& commands() {
  static const std::set<std::string> c{"describe", "hylomorphy", "minimize", "sweep", "evolve", "stability"};
  return c;
}

double positive(const Config& c, const std::string& key) {
  const double v = c.number(key);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be a finite number > 0");
  return v;
}

double nonnegative(const Config& c, const std::string& key) {
  const double v = c.number(key);
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be a finite number >= 0");
  return v;
}

std::int64_t int_at_least(const Config& c, const std::string& key, std::int64_t lo) {
  const std::int64_t v = c.integer(key);
  if (v < lo) throw ConfigError(key, "must be >= " + std::to_string(lo));
  return v;
}

std::vector<std::int64_t> per_direction(const Config& c, const std::string& key, int dim, std::int64_t lo) {
  std::vector<std::int64_t> v = c.integers(key);
  if (v.size() == 1) v.assign(static_cast<std::size_t>(dim), v.front());
  if (v.size() != static_cast<std::size_t>(dim)) {
    throw ConfigError(key, "needs 1 or " + std::to_string(dim) + " entries");
  }
  for (std::int64_t x : v) {
    if (x < lo) throw ConfigError(key, "entries must be >= " + std::to_string(lo));
  }
  return v;
}

ConfigValue number_array(const std::vector<double>& v) {
  ConfigValue::Array a;
  for (double x : v) a.push_back(ConfigValue{x});
  return ConfigValue{std::move(a)};
}

ConfigValue integer_array(const std::vector<std::int64_t>& v) {
  ConfigValue::Array a;
  for (std::int64_t x : v) a.push_back(ConfigValue{x});
  return ConfigValue{std::move(a)};
}

}  // namespace

RunConfig RunConfig::from_config(const Config& c, const std::string& command) {
  if (!commands().count(command)) throw ConfigError("command", "unknown command '" + command + "'");
  for (const std::string& k : c.keys()) {
    if (!known_keys().count(k)) throw ConfigError(k, "unknown key");
  }
  RunConfig r;

  const std::string type = c.string("model.type");
  if (type == "nls") r.type = ModelType::Nls;
  else if (type == "nkg") r.type = ModelType::Nkg;
  else throw ConfigError("model.type", "must be \"nls\" or \"nkg\"");

  if (c.has("model.nonlinearity")) r.nonlinearity = c.string("model.nonlinearity");
  if (r.nonlinearity == "quartic_sextic") {
    r.h = positive(c, "model.h");
    r.a = positive(c, "model.a");
    r.b = positive(c, "model.b");
    const double bound = 3.0 * r.a * r.a / (16.0 * r.h * r.h);
    if (r.b < bound) {
      throw ConfigError("model.b", "W would be negative somewhere; need b >= 3a^2/(16h^2) = " + std::to_string(bound));
    }
  } else if (r.nonlinearity == "quadratic") {
    r.h = nonnegative(c, "model.h");
    if (c.has("model.a") || c.has("model.b")) {
      throw ConfigError(c.has("model.a") ? "model.a" : "model.b", "not used by the quadratic nonlinearity");
    }
  } else {
    throw ConfigError("model.nonlinearity", "must be \"quartic_sextic\" or \"quadratic\"");
  }

  if (c.has("model.potential")) r.potential = c.string("model.potential");
  if (r.potential == "cosine") {
    r.v0 = nonnegative(c, "model.v0");
  } else if (r.potential == "none") {
    if (c.has("model.v0")) throw ConfigError("model.v0", "requires model.potential = \"cosine\"");
  } else {
    throw ConfigError("model.potential", "must be \"none\" or \"cosine\"");
  }
  if (r.type == ModelType::Nkg && r.potential != "none") {
    throw ConfigError("model.potential", "the nkg model takes its periodicity from model.mass_amplitude");
  }
  if (c.has("model.mass_amplitude")) {
    if (r.type != ModelType::Nkg) throw ConfigError("model.mass_amplitude", "only used by the nkg model");
    r.mass_amplitude = nonnegative(c, "model.mass_amplitude");
  }

  r.dim = static_cast<int>(c.integer("grid.dim"));
  if (r.dim < 1 || r.dim > 3) throw ConfigError("grid.dim", "must be 1, 2 or 3");
  if (c.has("model.lattice")) {
    r.lattice = c.numbers("model.lattice");
    if (r.lattice.size() != static_cast<std::size_t>(r.dim * r.dim)) {
      throw ConfigError("model.lattice", "needs dim*dim = " + std::to_string(r.dim * r.dim) + " entries");
    }
    try {
      LatticeSpec::create(r.dim, r.lattice);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("model.lattice", e.what());
    }
  } else {
    r.lattice = LatticeSpec::scaled_identity(r.dim).row_major();
  }
  r.cells = per_direction(c, "grid.cells", r.dim, 1);
  r.points_per_cell = per_direction(c, "grid.points_per_cell", r.dim, 2);

  if (c.has("solver.sigma")) r.sigma = positive(c, "solver.sigma");
  if (c.has("solver.sigmas")) {
    r.sigmas = c.numbers("solver.sigmas");
    if (r.sigmas.empty()) throw ConfigError("solver.sigmas", "must not be empty");
    for (std::size_t i = 0; i < r.sigmas.size(); ++i) {
      if (!(r.sigmas[i] > 0.0) || !std::isfinite(r.sigmas[i])) throw ConfigError("solver.sigmas", "entries must be > 0");
      if (i > 0 && r.sigmas[i] <= r.sigmas[i - 1]) throw ConfigError("solver.sigmas", "must be strictly increasing");
    }
  }
  if (c.has("solver.step")) r.step = positive(c, "solver.step");
  if (c.has("solver.tol")) r.tol = positive(c, "solver.tol");
  if (c.has("solver.max_iter")) r.max_iter = static_cast<int>(int_at_least(c, "solver.max_iter", 0));
  if (c.has("solver.restarts")) r.restarts = static_cast<int>(int_at_least(c, "solver.restarts", 1));
  if (c.has("solver.seed")) r.seed = static_cast<std::uint64_t>(int_at_least(c, "solver.seed", 0));

  if (c.has("evolve.dt")) r.dt = positive(c, "evolve.dt");
  if (c.has("evolve.steps")) r.steps = int_at_least(c, "evolve.steps", 0);
  if (c.has("evolve.stride")) r.stride = int_at_least(c, "evolve.stride", 1);
  if (c.has("evolve.snapshot_stride")) r.snapshot_stride = int_at_least(c, "evolve.snapshot_stride", 0);
  if (r.snapshot_stride % r.stride != 0) {
    throw ConfigError("evolve.snapshot_stride", "must be a multiple of evolve.stride");
  }
  if (c.has("evolve.delta")) r.delta = nonnegative(c, "evolve.delta");
  if (c.has("evolve.horizon")) r.horizon = positive(c, "evolve.horizon");
  if (c.has("evolve.seed")) r.noise_seed = static_cast<std::uint64_t>(int_at_least(c, "evolve.seed", 0));
  if (c.has("evolve.input")) r.input = c.string("evolve.input");

  if (c.has("output.directory")) r.directory = c.string("output.directory");
  if (c.has("output.formats")) {
    r.formats = c.strings("output.formats");
    for (const std::string& f : r.formats) {
      if (f != "json" && f != "csv" && f != "snapshot") {
        throw ConfigError("output.formats", "unknown format '" + f + "'");
      }
    }
  }

  // Command requirements.
  if (command == "minimize" || command == "stability" || (command == "evolve" && !r.input)) {
    c.at("solver.sigma");
  }
  if (command == "sweep") c.at("solver.sigmas");
  if (command == "evolve") {
    c.at("evolve.dt");
    c.at("evolve.steps");
  }
  if (command == "stability") {
    c.at("evolve.dt");
    c.at("evolve.horizon");
  }
  return r;
}

Config RunConfig::to_config() const {
  Config c;
  c.set("model.type", ConfigValue{std::string(type == ModelType::Nls ? "nls" : "nkg")});
  c.set("model.h", ConfigValue{h});
  c.set("model.nonlinearity", ConfigValue{nonlinearity});
  if (nonlinearity == "quartic_sextic") {
    c.set("model.a", ConfigValue{a});
    c.set("model.b", ConfigValue{b});
  }
  c.set("model.potential", ConfigValue{potential});
  if (potential == "cosine") c.set("model.v0", ConfigValue{v0});
  if (type == ModelType::Nkg) c.set("model.mass_amplitude", ConfigValue{mass_amplitude});
  c.set("model.lattice", number_array(lattice));
  c.set("grid.dim", ConfigValue{static_cast<std::int64_t>(dim)});
  c.set("grid.cells", integer_array(cells));
  c.set("grid.points_per_cell", integer_array(points_per_cell));
  if (sigma) c.set("solver.sigma", ConfigValue{*sigma});
  if (!sigmas.empty()) c.set("solver.sigmas", number_array(sigmas));
  c.set("solver.step", ConfigValue{step});
  c.set("solver.tol", ConfigValue{tol});
  c.set("solver.max_iter", ConfigValue{static_cast<std::int64_t>(max_iter)});
  c.set("solver.restarts", ConfigValue{static_cast<std::int64_t>(restarts)});
  c.set("solver.seed", ConfigValue{static_cast<std::int64_t>(seed)});
  if (dt) c.set("evolve.dt", ConfigValue{*dt});
  if (steps) c.set("evolve.steps", ConfigValue{*steps});
  c.set("evolve.stride", ConfigValue{stride});
  c.set("evolve.snapshot_stride", ConfigValue{snapshot_stride});
  c.set("evolve.delta", ConfigValue{delta});
  if (horizon) c.set("evolve.horizon", ConfigValue{*horizon});
  c.set("evolve.seed", ConfigValue{static_cast<std::int64_t>(noise_seed)});
  if (input) c.set("evolve.input", ConfigValue{*input});
  c.set("output.directory", ConfigValue{directory});
  ConfigValue::Array f;
  for (const std::string& s : formats) f.push_back(ConfigValue{s});
  c.set("output.formats", ConfigValue{std::move(f)});
  return c;
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

Grid RunConfig::grid() const {
  return Grid::build(LatticeSpec::create(dim, lattice), cells, points_per_cell);
}

Nonlinearity RunConfig::make_nonlinearity() const {
  return nonlinearity == "quadratic" ? Nonlinearity::quadratic(h) : Nonlinearity::quartic_sextic(h, a, b);
}

NlsModel RunConfig::nls_model(const Grid& g) const {
  const Potential v = potential == "cosine" ? Potential::cosine(v0) : Potential::zero();
  return NlsModel(g, v, make_nonlinearity());
}

NkgModel RunConfig::nkg_model(const Grid& g) const { return NkgModel(g, make_nonlinearity(), mass_amplitude); }

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  if (sigma) o.sigma = *sigma;
  o.step = step;
  o.tol = tol;
  o.max_iter = max_iter;
  o.restarts = restarts;
  o.seed = seed;
  return o;
}

EvolveOptions RunConfig::evolve_options() const {
  EvolveOptions o;
  if (dt) o.dt = *dt;
  if (steps) o.steps = *steps;
  o.stride = stride;
  return o;
}

StabilityOptions RunConfig::stability_options() const {
  StabilityOptions o;
  o.delta = delta;
  if (horizon) o.horizon = *horizon;
  if (dt) o.dt = *dt;
  o.stride = stride;
  o.seed = noise_seed;
  return o;
}

}  // namespace hylo
