#include "wildfire/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace wildfire {

using nlohmann::json;

namespace {

// Reads keys from one JSON object, remembering which were consumed so that
// anything left over can be rejected.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!node_.contains(key)) return fallback;
    return convert<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) throw ConfigError("missing required key '" + qualified(key) + "'");
    return convert<T>(key);
  }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) return std::nullopt;
    return convert<T>(key);
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(node_.at(key), qualified(key));
  }

  void reject_unknown() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key())) throw ConfigError("unknown key '" + qualified(item.key()) + "'");
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  template <class T>
  T convert(const std::string& key) {
    try {
      return node_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("bad value for '" + qualified(key) + "': " + e.what());
    }
  }

  std::string where() const { return path_.empty() ? "configuration" : "'" + path_ + "'"; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    grid.validate();
  } catch (const ShapeError& e) {
    throw ConfigError(e.what());
  }
  require_positive(dt, "dt");
  if (t_end < 0.0) throw ConfigError("t_end must be nonnegative");
  try {
    model.validate();
    perturbation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (ensemble_size < 2) throw ConfigError("ensemble.size must be at least 2");
  if (perturbation.modes > grid.nx || (grid.dims == 2 && perturbation.modes > grid.ny))
    throw ConfigError("ensemble.modes exceeds the grid resolution");
  if (fuel.noise < 0.0 || fuel.noise >= 1.0) throw ConfigError("fuel.noise must lie in [0, 1)");
  if (fuel.break_width < 0.0) throw ConfigError("fuel.break_width must be nonnegative");
  const auto& a = assimilation;
  require_positive(a.cycle_length, "assimilation.cycle_length");
  if (a.stride < 1) throw ConfigError("assimilation.stride must be at least 1");
  require_positive(a.variance, "assimilation.variance");
  if (a.rho < 0.0) throw ConfigError("assimilation.rho must be nonnegative");
  if (a.reperturb < 0.0) throw ConfigError("assimilation.reperturb must be nonnegative");
  if (calibration) {
    const auto& c = *calibration;
    if (!(model.T_0 <= model.T_a && model.T_a < c.T_i && c.T_i < c.T_c))
      throw ConfigError("calibration requires T_0 <= T_a < T_i < T_c");
    require_positive(c.t_c, "calibration.t_c");
  }
  if (ignition.shape == IgnitionSpec::Shape::gaussian) require_positive(ignition.sigma, "ignition.sigma");
  if (ignition.side < 0.0) throw ConfigError("ignition.side must be nonnegative");
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError("parse error at line " + std::to_string(line) + ": " + e.what());
  }

  ExperimentConfig cfg;
  Section top(root, "");

  {
    auto g = top.child("grid");
    cfg.grid.dims = g.require<int>("dims");
    cfg.grid.nx = g.require<std::size_t>("nx");
    cfg.grid.ny = g.get<std::size_t>("ny", 1);
    cfg.grid.dx = g.require<double>("dx");
    g.reject_unknown();
  }
  {
    auto t = top.child("time");
    cfg.dt = t.require<double>("dt");
    cfg.t_end = t.get<double>("t_end", 0.0);
    cfg.snapshot_every = t.get<std::size_t>("snapshot_every", 0);
    t.reject_unknown();
  }
  {
    auto m = top.child("model");
    auto& c = cfg.model;
    c.k = m.require<double>("k");
    c.A = m.require<double>("A");
    c.B = m.require<double>("B");
    c.C = m.require<double>("C");
    c.C_S = m.require<double>("C_S");
    c.T_a = m.get<double>("T_a", 300.0);
    c.T_0 = m.get<double>("T_0", c.T_a);
    c.wind = m.get<std::array<double, 2>>("wind", {0.0, 0.0});
    try {
      c.diffusion = diffusion_mode_from_string(m.get<std::string>("diffusion", "linear"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("model.diffusion: ") + e.what());
    }
    m.reject_unknown();
  }
  if (top.has("calibration")) {
    auto s = top.child("calibration");
    CalibrationSpec c;
    c.T_i = s.require<double>("T_i");
    c.T_c = s.require<double>("T_c");
    c.t_c = s.require<double>("t_c");
    c.target_Tmax = s.optional<double>("target_Tmax");
    c.target_width = s.optional<double>("target_width");
    c.target_speed = s.optional<double>("target_speed");
    c.target_displacement = s.optional<double>("target_displacement");
    s.reject_unknown();
    cfg.calibration = c;
  }
  if (top.has("ignition")) {
    auto s = top.child("ignition");
    auto& ig = cfg.ignition;
    const auto shape = s.require<std::string>("shape");
    if (shape == "square") {
      ig.shape = IgnitionSpec::Shape::square;
      ig.center = s.require<std::array<double, 2>>("center");
      ig.side = s.require<double>("side");
    } else if (shape == "gaussian") {
      ig.shape = IgnitionSpec::Shape::gaussian;
      ig.center = {s.require<double>("center"), 0.0};
      ig.sigma = s.require<double>("sigma");
    } else {
      throw ConfigError("ignition.shape must be 'square' or 'gaussian'");
    }
    ig.temperature = s.require<double>("temperature");
    s.reject_unknown();
  }
  if (top.has("fuel")) {
    auto s = top.child("fuel");
    cfg.fuel.break_width = s.get<double>("break_width", 0.0);
    cfg.fuel.noise = s.get<double>("noise", 0.0);
    s.reject_unknown();
  }
  if (top.has("ensemble")) {
    auto s = top.child("ensemble");
    cfg.ensemble_size = s.get<std::size_t>("size", cfg.ensemble_size);
    auto& p = cfg.perturbation;
    p.c_T = s.get<double>("c_T", 0.0);
    p.c_x = s.get<double>("c_x", 0.0);
    p.c_y = s.get<double>("c_y", 0.0);
    p.alpha = s.get<double>("alpha", p.alpha);
    p.modes = s.get<std::size_t>("modes", p.modes);
    s.reject_unknown();
  }
  if (top.has("assimilation")) {
    auto s = top.child("assimilation");
    auto& a = cfg.assimilation;
    a.cycle_length = s.get<double>("cycle_length", a.cycle_length);
    a.cycles = s.get<std::size_t>("cycles", a.cycles);
    a.stride = s.get<std::size_t>("stride", a.stride);
    a.variance = s.get<double>("variance", a.variance);
    a.rho = s.get<double>("rho", a.rho);
    a.reperturb = s.get<double>("reperturb", a.reperturb);
    a.reference_offset = s.get<double>("reference_offset", a.reference_offset);
    a.front_level = s.get<double>("front_level", a.front_level);
    s.reject_unknown();
  }
  cfg.seed = top.get<std::uint64_t>("seed", cfg.seed);
  if (top.has("output")) {
    auto s = top.child("output");
    cfg.output_dir = s.get<std::string>("dir", cfg.output_dir.string());
    cfg.snapshot_cycles = s.get<std::size_t>("snapshot_cycles", 0);
    s.reject_unknown();
  }
  cfg.threads = top.get<std::size_t>("threads", 0);
  top.reject_unknown();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace wildfire
