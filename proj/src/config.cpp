#include "dissip/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dissip/error.hpp"

namespace dissip {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node) return;
  require(node.IsMap(), ErrorKind::ConfigError, where + " must be a mapping");
  for (const auto& item : node) {
    const auto key = item.first.as<std::string>();
    require(allowed.count(key) > 0, ErrorKind::ConfigError, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("bad value for '") + key + "': " + e.what());
  }
}

void read_rect(const YAML::Node& node, Rect& rect) {
  if (!node || !node["domain"]) return;
  std::vector<double> v;
  read(node, "domain", v);
  require(v.size() == 4, ErrorKind::ConfigError, "domain needs [x0, x1, y0, y1]");
  rect = {v[0], v[1], v[2], v[3]};
  require(rect.width() > 0 && rect.height() > 0, ErrorKind::ConfigError, "domain must have positive extent");
}

void validate(const RunConfig& c) {
  static const std::set<std::string> commands{"check", "verify-forms", "solve", "regularity", "report"};
  require(commands.count(c.command) > 0, ErrorKind::ConfigError, "unknown command '" + c.command + "'");

  static const std::set<std::string> families{"power", "exp_square", "truncated_power"};
  require(families.count(c.phi.family) > 0, ErrorKind::ConfigError, "unknown phi family '" + c.phi.family + "'");
  require(c.phi.p >= 2.0, ErrorKind::ConfigError, "phi.p must be >= 2");
  require(c.phi.family != "truncated_power" || c.phi.k > 1.0, ErrorKind::ConfigError, "phi.k must be > 1");

  const auto& co = c.coefficients;
  static const std::set<std::string> sources{"constant", "preset", "file"};
  require(sources.count(co.source) > 0, ErrorKind::ConfigError, "unknown coefficient source '" + co.source + "'");
  if (co.source == "file") {
    require(!co.file.empty() && std::filesystem::exists(co.file), ErrorKind::ConfigError,
            "coefficient file '" + co.file + "' does not exist");
  }
  require(co.n1 >= 2 && co.n2 >= 2, ErrorKind::ConfigError, "coefficient grid needs >= 2 nodes per side");
  require(co.block >= 1, ErrorKind::ConfigError, "checkerboard block must be >= 1");

  require(c.criteria.c0 > 0.0, ErrorKind::ConfigError, "criteria.c0 must be positive");
  require(!c.criteria.kappa || *c.criteria.kappa > 0.0, ErrorKind::ConfigError, "criteria.kappa must be positive");
  require(c.criteria.dim >= 2, ErrorKind::ConfigError, "criteria.dim must be >= 2");

  require(c.p_sweep.count >= 0, ErrorKind::ConfigError, "p_sweep.count must be >= 0");
  require(c.p_sweep.count == 0 || (c.p_sweep.from >= 2.0 && c.p_sweep.to > c.p_sweep.from), ErrorKind::ConfigError,
          "p_sweep needs 2 <= from < to");

  const auto& en = c.ensemble;
  require(en.bumps >= 0 && en.rotations >= 0 && en.oscillatory >= 0, ErrorKind::ConfigError,
          "ensemble sizes must be >= 0");
  require(en.rho > 0.0 && en.kappa >= 0.0, ErrorKind::ConfigError, "ensemble.rho > 0 and ensemble.kappa >= 0");
  require(en.max_octave >= 0 && en.max_octave <= 16, ErrorKind::ConfigError, "ensemble.max_octave in [0, 16]");

  const auto& fe = c.fem;
  require(fe.dim == 2 || fe.dim == 3, ErrorKind::ConfigError, "fem.dim must be 2 or 3");
  require(fe.cells >= 8, ErrorKind::ConfigError, "fem.cells must be >= 8");
  static const std::set<std::string> forcings{"zero", "smooth", "manufactured"};
  require(forcings.count(fe.forcing) > 0, ErrorKind::ConfigError, "unknown forcing '" + fe.forcing + "'");
  require(fe.forcing != "manufactured" || fe.dim == 2, ErrorKind::ConfigError, "manufactured forcing is 2-D");
  require(fe.p >= 2.0, ErrorKind::ConfigError, "fem.p must be >= 2");
  for (double k : fe.levels) require(k > 1.0, ErrorKind::ConfigError, "fem.levels must be > 1");
  for (int n : fe.refinements) require(n >= 8, ErrorKind::ConfigError, "fem.refinements must be >= 8");
  require(!fe.refinements.empty() && !fe.scales.empty(), ErrorKind::ConfigError,
          "fem.refinements and fem.scales must not be empty");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("invalid YAML: ") + e.what());
  }
  require(root.IsMap(), ErrorKind::ConfigError, "config must be a mapping");
  check_keys(root, "config", {"command", "phi", "coefficients", "criteria", "p_sweep", "ensemble", "fem", "output"});

  RunConfig c;
  read(root, "command", c.command);

  const auto phi = root["phi"];
  check_keys(phi, "phi", {"family", "p", "k"});
  read(phi, "family", c.phi.family);
  read(phi, "p", c.phi.p);
  read(phi, "k", c.phi.k);

  const auto co = root["coefficients"];
  check_keys(co, "coefficients",
             {"source", "lambda", "mu", "preset", "amplitude", "block", "n1", "n2", "file", "domain"});
  read(co, "source", c.coefficients.source);
  read(co, "lambda", c.coefficients.lambda);
  read(co, "mu", c.coefficients.mu);
  read(co, "preset", c.coefficients.preset);
  read(co, "amplitude", c.coefficients.amplitude);
  read(co, "block", c.coefficients.block);
  read(co, "n1", c.coefficients.n1);
  read(co, "n2", c.coefficients.n2);
  read(co, "file", c.coefficients.file);
  read_rect(co, c.coefficients.domain);

  const auto cr = root["criteria"];
  check_keys(cr, "criteria", {"c0", "kappa", "dim"});
  read(cr, "c0", c.criteria.c0);
  if (cr && cr["kappa"] && !cr["kappa"].IsNull()) {
    double k = 0.0;
    read(cr, "kappa", k);
    c.criteria.kappa = k;
  }
  read(cr, "dim", c.criteria.dim);

  const auto sw = root["p_sweep"];
  check_keys(sw, "p_sweep", {"from", "to", "count"});
  read(sw, "from", c.p_sweep.from);
  read(sw, "to", c.p_sweep.to);
  read(sw, "count", c.p_sweep.count);

  const auto en = root["ensemble"];
  check_keys(en, "ensemble", {"seed", "bumps", "rotations", "oscillatory", "rho", "kappa", "counterexample",
                              "max_octave"});
  read(en, "seed", c.ensemble.seed);
  read(en, "bumps", c.ensemble.bumps);
  read(en, "rotations", c.ensemble.rotations);
  read(en, "oscillatory", c.ensemble.oscillatory);
  read(en, "rho", c.ensemble.rho);
  read(en, "kappa", c.ensemble.kappa);
  read(en, "counterexample", c.ensemble.counterexample);
  read(en, "max_octave", c.ensemble.max_octave);

  const auto fe = root["fem"];
  check_keys(fe, "fem", {"dim", "cells", "forcing", "amplitude", "p", "levels", "refinements", "scales"});
  read(fe, "dim", c.fem.dim);
  read(fe, "cells", c.fem.cells);
  read(fe, "forcing", c.fem.forcing);
  read(fe, "amplitude", c.fem.amplitude);
  read(fe, "p", c.fem.p);
  read(fe, "levels", c.fem.levels);
  read(fe, "refinements", c.fem.refinements);
  read(fe, "scales", c.fem.scales);

  const auto out = root["output"];
  check_keys(out, "output", {"report", "plot_dir"});
  read(out, "report", c.output.report);
  read(out, "plot_dir", c.output.plot_dir);

  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::ConfigError, "cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace dissip
