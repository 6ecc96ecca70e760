#include "bosekms/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bosekms {

namespace pt = boost::property_tree;

namespace {

template <class T>
T require(const pt::ptree& tree, const std::string& key) {
  auto v = tree.get_optional<T>(key);
  if (!v) throw InvariantError("required key", "missing or malformed '" + key + "'");
  return *v;
}

Coord parse_coord(const std::string& s) {
  Coord c{0, 0, 0};
  std::istringstream is(s);
  std::string tok;
  int k = 0;
  while (std::getline(is, tok, ',') && k < 3) c[k++] = std::stod(tok);
  return c;
}

}  // namespace

Config parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvariantError("well-formed config", e.message());
  }

  Config cfg;
  cfg.text = text;
  auto& m = cfg.model;
  m.mass = tree.get("model.mass", m.mass);
  m.beta = require<double>(tree, "model.beta");
  m.mu = tree.get("model.mu", m.mu);
  m.epsilon = tree.get("model.epsilon", m.epsilon);
  if (auto rr = tree.get_optional<double>("model.mu_rr")) {
    if (std::abs(*rr + m.epsilon) > 1e-12 * std::max(1.0, m.epsilon))
      throw InvariantError("mu_rr = -epsilon", "mu_rr and epsilon disagree");
  }
  m.phi0 = tree.get("model.phi0", m.phi0);
  m.coupling = tree.get("model.coupling", m.coupling);
  m.mu_tilde = tree.get("model.mu_tilde", m.mu_tilde);
  m.condensate = tree.get("model.condensate", m.condensate);
  m.validate();

  const int dim = tree.get("grid.dim", 1);
  const int n_sites = require<int>(tree, "grid.n_sites");
  const double L = require<double>(tree, "grid.box_length");
  const int n_time = tree.get("grid.n_time", 8);
  cfg.grid = GridSpec(dim, n_sites, L, n_time, m.beta);

  const std::string shape = tree.get<std::string>("potential.shape", "gaussian");
  const double height = tree.get("potential.height", 0.0);
  if (shape == "gaussian")
    cfg.potential = Potential::gaussian(height, tree.get("potential.width", 1.0));
  else if (shape == "bump")
    cfg.potential = Potential::bump(height, tree.get("potential.radius", 1.0));
  else
    throw InvariantError("potential shape in {gaussian, bump}", "got '" + shape + "'");
  const Eigen::VectorXd vhat = cfg.potential.transform(cfg.grid);
  const double v0 = cfg.potential.on_grid(cfg.grid)(0);
  if (vhat.minCoeff() < -1e-12 * std::max(v0, 1e-300))
    throw InvariantError("positive-type potential", "transform has a negative mode");

  const std::string kind = tree.get<std::string>("cutoff.kind", "plateau");
  if (kind == "uniform") {
    cfg.cutoff = Cutoff::uniform(cfg.grid);
  } else if (kind == "single_site") {
    cfg.cutoff = Cutoff::single_site(cfg.grid, tree.get("cutoff.site", 0u) % cfg.grid.n_spatial());
  } else if (kind == "plateau") {
    const Coord center = parse_coord(tree.get<std::string>("cutoff.center", "0,0,0"));
    cfg.cutoff = Cutoff::plateau(cfg.grid, center, tree.get("cutoff.plateau", 0.0), tree.get("cutoff.ramp", 0.0));
  } else {
    throw InvariantError("cutoff kind in {uniform, single_site, plateau}", "got '" + kind + "'");
  }
  cfg.cutoff.validate(cfg.grid);

  if (m.condensate) m.check_condensate(norms(cfg.potential, cfg.cutoff, cfg.grid).v_l1);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvariantError("readable config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bosekms
