#include "trtrom/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "trtrom/error.hpp"

namespace trtrom {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain", {"length", "cells"}},
      {"angles", {"n_per_half"}},
      {"groups", {"boundaries"}},
      {"time", {"dt", "t_end", "steps", "stage_bounds"}},
      {"material", {"opacity_coefficient", "cv_factor", "cv", "light_speed", "a_rad"}},
      {"boundary", {"inflow_temperature", "initial_temperature"}},
      {"solver", {"eps_temperature", "eps_energy", "max_outer", "max_inner"}},
      {"rom", {"eps", "ranks"}},
      {"output", {"directory"}},
  };
  return keys;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  }
  if (text.find_first_not_of(" \t", used) != std::string::npos)
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
    throw ConfigError("config key '" + key + "': '" + text + "' is not a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> split_list(const std::string& text) {
  std::string s = text;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split_list(text)) out.push_back(parse_double(key, tok));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  return out.str();
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config key '" + key + "': " + what);
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end() || body.empty())
      throw ConfigError("config: unknown section or top-level key '" + section + "'");
    for (const auto& [name, node] : body) {
      const std::string key = section + "." + name;
      if (!it->second.contains(name)) throw ConfigError("config: unknown key '" + key + "'");
      const std::string v = node.get_value<std::string>();
      if (key == "domain.length") c.length = parse_double(key, v);
      else if (key == "domain.cells") c.cells = parse_count(key, v);
      else if (key == "angles.n_per_half") c.n_per_half = parse_count(key, v);
      else if (key == "groups.boundaries") c.group_boundaries = parse_doubles(key, v);
      else if (key == "time.dt") c.dt = parse_double(key, v);
      else if (key == "time.t_end") c.t_end = parse_double(key, v);
      else if (key == "time.steps") c.steps = parse_doubles(key, v);
      else if (key == "time.stage_bounds") c.stage_bounds = parse_doubles(key, v);
      else if (key == "material.opacity_coefficient") c.opacity_coefficient = parse_double(key, v);
      else if (key == "material.cv_factor") c.cv_factor = parse_double(key, v);
      else if (key == "material.cv") c.cv = parse_double(key, v);
      else if (key == "material.light_speed") c.light_speed = parse_double(key, v);
      else if (key == "material.a_rad") c.a_rad = parse_double(key, v);
      else if (key == "boundary.inflow_temperature") c.inflow_temperature = parse_double(key, v);
      else if (key == "boundary.initial_temperature") c.initial_temperature = parse_double(key, v);
      else if (key == "solver.eps_temperature") c.solver.eps_temperature = parse_double(key, v);
      else if (key == "solver.eps_energy") c.solver.eps_energy = parse_double(key, v);
      else if (key == "solver.max_outer") c.solver.max_outer = parse_count(key, v);
      else if (key == "solver.max_inner") c.solver.max_inner = parse_count(key, v);
      else if (key == "rom.eps") c.rom_eps = parse_double(key, v);
      else if (key == "rom.ranks") {
        c.rom_ranks.clear();
        for (const auto& tok : split_list(v)) c.rom_ranks.push_back(parse_count(key, tok));
      } else if (key == "output.directory") c.output_dir = v;
    }
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void RunConfig::validate() const {
  require(length > 0.0 && std::isfinite(length), "domain.length", "must be positive");
  require(cells > 0, "domain.cells", "must be positive");
  require(n_per_half > 0, "angles.n_per_half", "must be positive");
  require(group_boundaries.size() >= 2, "groups.boundaries", "needs at least two edges");
  for (std::size_t i = 1; i < group_boundaries.size(); ++i)
    require(group_boundaries[i] > group_boundaries[i - 1], "groups.boundaries", "must be strictly increasing");
  require(group_boundaries.front() >= 0.0, "groups.boundaries", "must be nonnegative");
  if (steps.empty()) {
    require(dt > 0.0, "time.dt", "must be positive");
    require(t_end > 0.0, "time.t_end", "must be positive");
  } else {
    for (double s : steps) require(s > 0.0, "time.steps", "entries must be positive");
  }
  for (double b : stage_bounds) require(b > 0.0, "time.stage_bounds", "entries must be positive");
  require(opacity_coefficient > 0.0, "material.opacity_coefficient", "must be positive");
  require(cv_factor > 0.0, "material.cv_factor", "must be positive");
  require(light_speed > 0.0, "material.light_speed", "must be positive");
  require(a_rad > 0.0, "material.a_rad", "must be positive");
  require(inflow_temperature >= 0.0, "boundary.inflow_temperature", "must be nonnegative");
  require(initial_temperature > 0.0, "boundary.initial_temperature", "must be positive");
  if (cv) require(*cv > 0.0, "material.cv", "must be positive");
  else require(inflow_temperature > 0.0, "material.cv", "is required when boundary.inflow_temperature is 0");
  require(solver.eps_temperature > 0.0, "solver.eps_temperature", "must be positive");
  require(solver.eps_energy > 0.0, "solver.eps_energy", "must be positive");
  require(solver.max_outer > 0, "solver.max_outer", "must be positive");
  require(solver.max_inner > 0, "solver.max_inner", "must be positive");
  if (rom_eps) require(*rom_eps > 0.0 && *rom_eps < 1.0, "rom.eps", "must lie in (0, 1)");
  for (std::size_t r : rom_ranks) require(r > 0, "rom.ranks", "entries must be positive");
}

Problem RunConfig::problem() const {
  validate();
  const PhysConstants constants{light_speed, a_rad};
  const MaterialEos eos{cv.value_or(cv_factor * a_rad * std::pow(inflow_temperature, 3))};
  Material material(constants, GroupStructure(group_boundaries), OpacityModel{opacity_coefficient}, eos);
  const AngularQuadrature quad = AngularQuadrature::double_gauss_legendre(n_per_half);
  TimeGrid time = steps.empty() ? TimeGrid::uniform(dt, t_end, stage_bounds) : TimeGrid(steps, stage_bounds);
  BoundarySpec bc = inflow_temperature > 0.0
                        ? BoundarySpec::planckian_left(material, quad.size(), inflow_temperature)
                        : BoundarySpec::vacuum(material.group_count(), quad.size());
  return Problem{std::move(material), SpatialMesh::uniform(length, cells), quad, std::move(time), std::move(bc),
                 initial_temperature, solver};
}

std::string RunConfig::to_ini() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "[domain]\nlength = " << length << "\ncells = " << cells << "\n\n";
  out << "[angles]\nn_per_half = " << n_per_half << "\n\n";
  out << "[groups]\nboundaries = " << join(group_boundaries) << "\n\n";
  out << "[time]\n";
  if (steps.empty())
    out << "dt = " << dt << "\nt_end = " << t_end << "\n";
  else
    out << "steps = " << join(steps) << "\n";
  out << "stage_bounds = " << join(stage_bounds) << "\n\n";
  out << "[material]\nopacity_coefficient = " << opacity_coefficient << "\ncv_factor = " << cv_factor;
  if (cv) out << "\ncv = " << *cv;
  out << "\nlight_speed = " << light_speed << "\na_rad = " << a_rad << "\n\n";
  out << "[boundary]\ninflow_temperature = " << inflow_temperature
      << "\ninitial_temperature = " << initial_temperature << "\n\n";
  out << "[solver]\neps_temperature = " << solver.eps_temperature << "\neps_energy = " << solver.eps_energy
      << "\nmax_outer = " << solver.max_outer << "\nmax_inner = " << solver.max_inner << "\n\n";
  if (rom_eps || !rom_ranks.empty()) {
    out << "[rom]\n";
    if (rom_eps) out << "eps = " << *rom_eps << "\n";
    if (!rom_ranks.empty()) {
      out << "ranks =";
      for (std::size_t r : rom_ranks) out << " " << r;
      out << "\n";
    }
    out << "\n";
  }
  out << "[output]\ndirectory = " << output_dir.string() << "\n";
  return out.str();
}

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  if (const char* env = std::getenv("TRTROM_OUT"); env != nullptr && *env != '\0') return env;
  return config.output_dir;
}

}  // namespace trtrom
