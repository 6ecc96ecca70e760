#include "commands.hpp"

#include "bosekms/bounds.hpp"
#include "bosekms/config.hpp"
#include "bosekms/cumulants.hpp"
#include "bosekms/dyson.hpp"
#include "bosekms/entropy.hpp"
#include "bosekms/hs.hpp"
#include "bosekms/pathint.hpp"
#include "bosekms/propagator.hpp"
#include "bosekms/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace bosekms::cli {

using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

// Owns the run manifest: created before the work starts, written after the
// last output so the wall time covers everything.
class Run {
 public:
  Run(const Common& c, std::string command) : common_(c), command_(std::move(command)), start_(Clock::now()) {
    if (!c.config.empty()) cfg_ = load_config(c.config);
  }
  const Config& config() const { return cfg_; }

  std::string manifest_path() const { return common_.out + ".manifest.json"; }

  void add_output(const std::string& path) { outputs_.push_back(path); }
  void note(const std::string& key, json value) { notes_[key] = std::move(value); }

  void finish() const {
    json m;
    m["schema_version"] = kSchemaVersion;
    m["command"] = command_;
    m["command_line"] = common_.command_line;
    m["config"] = common_.config;
    m["config_hash"] = config_hash(cfg_.text);
    m["seed"] = common_.seed;
    m["workers"] = common_.workers;
    m["bosekms_version"] = kVersion;
    m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
    m["compiler"] = compiler();
    m["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start_).count();
    m["outputs"] = outputs_;
    for (const auto& [k, v] : notes_.items()) m[k] = v;
    write_text(manifest_path(), m.dump(2) + "\n");
  }

  static void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvariantError("writable output", "cannot open '" + path + "'");
    out << text;
  }

 private:
  static std::string compiler() {
#if defined(__clang__)
    return "clang " __clang_version__;
#elif defined(__GNUC__)
    return "gcc " __VERSION__;
#else
    return "unknown";
#endif
  }

  const Common& common_;
  std::string command_;
  Clock::time_point start_;
  Config cfg_;
  std::vector<std::string> outputs_;
  json notes_ = json::object();
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_json(Run& run, const std::string& path, json body) {
  body["schema_version"] = kSchemaVersion;
  body["manifest"] = run.manifest_path();
  Run::write_text(path, body.dump(2) + "\n");
  run.add_output(path);
}

// CSV rows of numbers; a leading non-numeric row is taken as a header.
std::vector<std::vector<double>> read_csv(const std::string& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw InvariantError("readable input", "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream is(line);
    std::string tok;
    bool numeric = true;
    while (std::getline(is, tok, ',')) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;
      throw InvariantError("numeric CSV", path + ":" + std::to_string(lineno));
    }
    if (row.size() != columns)
      throw ShapeError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t as_index(double v, std::size_t bound, const std::string& what) {
  if (v < 0 || v != std::floor(v) || v >= static_cast<double>(bound))
    throw ShapeError(what + " index " + g17(v) + " outside [0, " + std::to_string(bound) + ")");
  return static_cast<std::size_t>(v);
}

// A.csv: site,slice,value; unlisted entries are zero.
LatticeField read_field(const std::string& path, const GridSpec& grid) {
  LatticeField A(grid);
  if (path.empty()) return A;
  for (const auto& r : read_csv(path, 3))
    A.values(as_index(r[0], grid.n_spatial(), "site"), as_index(r[1], grid.n_time(), "slice")) = r[2];
  return A;
}

Eigen::VectorXd read_site_function(const std::string& path, const GridSpec& grid) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.n_spatial()));
  for (const auto& r : read_csv(path, 2)) f(static_cast<Eigen::Index>(as_index(r[0], grid.n_spatial(), "site"))) = r[1];
  return f;
}

json estimate_json(const McEstimate& e) {
  json j;
  j["mean"] = e.mean;
  j["std_error"] = e.std_error;
  j["n_samples"] = e.n_samples;
  j["seed"] = e.seed;
  j["tail_bound"] = e.tail_bound;
  j["max_sample_weight"] = e.max_sample_weight;
  j["weight_violations"] = e.weight_violations;
  json strata = json::array();
  for (const auto& s : e.strata) {
    json row;
    row["winding"] = s.winding;
    row["image"] = s.image;
    row["weight"] = s.weight;
    row["mean"] = s.mean;
    row["std_error"] = s.std_error;
    row["n_samples"] = s.n_samples;
    strata.push_back(row);
  }
  j["strata"] = strata;
  return j;
}

struct Interval {
  EBound e;
  double c_tilde, lo, hi;
};

Interval bound_interval(const Config& cfg) {
  const auto nm = norms(cfg.potential.scaled(cfg.model.coupling), cfg.cutoff, cfg.grid);
  const double ct = estimate_ctilde(cfg.model, cfg.grid.dim()).c_tilde;
  const auto E = e_bound(cfg.model.beta, nm.v0, nm.g_l1, 1.0, ct);
  return {E, ct, 2.0 - std::exp(E.value), std::exp(E.value)};
}

struct Axis {
  std::string key;
  double lo, hi;
  int n;
  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

std::vector<Axis> parse_sweep(const std::string& text) {
  std::vector<Axis> axes;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError("sweep item '" + item + "' is not key=lo:hi:n");
    Axis a;
    a.key = item.substr(0, eq);
    if (a.key != "beta" && a.key != "phi0" && a.key != "epsilon" && a.key != "v0")
      throw DomainError("sweep key '" + a.key + "' not in {beta, phi0, epsilon, v0}");
    char tail = 0;
    if (std::sscanf(item.c_str() + eq + 1, "%lf:%lf:%d%c", &a.lo, &a.hi, &a.n, &tail) != 3 || a.n < 1)
      throw DomainError("sweep item '" + item + "' is not key=lo:hi:n");
    axes.push_back(a);
  }
  return axes;
}

}  // namespace

int propagator(const Common& c, const PropagatorArgs& a) {
  Run run(c, "propagator");
  const auto& cfg = run.config();
  const auto free = build_kernel(cfg.model, cfg.grid);
  const auto& g = free.grid();
  std::ostringstream csv;
  csv << "q";
  for (int k = 0; k < g.dim(); ++k) csv << ",p" << k;
  csv << ",k,multiplier\n";
  for (std::size_t q = 0; q < g.n_spatial(); ++q) {
    csv << q;
    const Coord p = g.momentum(q);
    for (int k = 0; k < g.dim(); ++k) csv << ',' << g17(p[k]);
    csv << ',' << g17(free.dispersion()(static_cast<Eigen::Index>(q))) << ',' << g17(free.value(q, a.u)) << '\n';
  }
  Run::write_text(c.out, csv.str());
  run.add_output(c.out);
  run.note("u", a.u);
  run.finish();
  return 0;
}

int cumulants(const CumulantArgs& a) {
  if (a.count_graphs > 0) {
    std::cout << connected_graph_count(a.count_graphs) << "\n";
  } else if (a.count_pairings >= 0) {
    const bool charged = a.kind == "charged";
    const int factors = charged ? a.count_pairings : 2 * a.count_pairings;
    std::cout << count_wick_pairings(charged ? FieldType::charged : FieldType::real, factors) << "\n";
  } else {
    std::cout << bell_number(a.bell) << "\n";
  }
  return 0;
}

int dyson(const Common& c, const DysonArgs& a) {
  Run run(c, "dyson");
  const auto& cfg = run.config();
  const auto free = build_kernel(cfg.model, cfg.grid);
  const auto A = read_field(a.field, cfg.grid);
  const VertexRule rule = a.rule == "trapezoid" ? VertexRule::trapezoid : VertexRule::slice_exact;
  const InteractingKernel k = a.method == "sliced"      ? sliced_kernel(free, A)
                              : a.method == "resolvent" ? resolvent_kernel(free, A, rule)
                                                        : dyson_kernel(free, A, a.order, rule);
  const auto& g = cfg.grid;

  // Little-endian layout: 8-byte magic, then int32 schema, dim, n_sites, n_time,
  // provenance (0 dyson, 1 sliced, 2 resolvent), order; float64 box_length, beta;
  // uint64 rows; rows*rows float64 kernel values, row-major over slice-major indices.
  std::ofstream out(c.out, std::ios::binary);
  if (!out) throw InvariantError("writable output", "cannot open '" + c.out + "'");
  auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  out.write("BKMSKRN\0", 8);
  for (std::int32_t v : {static_cast<std::int32_t>(kSchemaVersion), std::int32_t(g.dim()), std::int32_t(g.n_sites()),
                         std::int32_t(g.n_time()), static_cast<std::int32_t>(k.provenance), std::int32_t(k.order)})
    put(v);
  put(g.box_length());
  put(g.beta());
  const auto rows = static_cast<std::uint64_t>(g.n_slice_space());
  put(rows);
  const double w = g.cell_volume() * g.dt();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values = k.op / w;
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  out.close();
  run.add_output(c.out);

  run.note("provenance", to_string(k.provenance));
  run.note("vertex_rule", a.rule);
  run.note("order", k.order);
  run.note("beta_sup_a", k.beta_sup_a);
  run.note("hypothesis_warning", k.hypothesis_warning);
  run.note("ratio_bound", k.ratio_bound);
  run.note("tail_bound", k.tail_bound);
  run.note("term_norms", k.term_norms);
  if (k.hypothesis_warning)
    std::cerr << "warning: beta ||A||_inf = " << k.beta_sup_a << " >= 1; the Dyson series may not converge\n";
  run.finish();
  return 0;
}

int mc(const Common& c, const McArgs& a) {
  Run run(c, "mc");
  const auto& cfg = run.config();
  const auto free = build_kernel(cfg.model, cfg.grid);
  const auto N = cfg.grid.n_spatial();
  if (a.x >= N || a.y >= N) throw ShapeError("--x/--y must be site indices below " + std::to_string(N));
  const int n_max = a.n_max >= 0 ? a.n_max : default_winding_cutoff(cfg.model.beta, free.mu_eff());

  auto estimate = [&](int steps) {
    PathOptions opt{steps, c.workers};
    if (a.hs)
      return mc_two_point_hs(a.x, a.y, cfg.potential, cfg.cutoff, cfg.model.coupling, free, n_max, a.samples, c.seed,
                             opt);
    return mc_two_point_external(a.x, a.y, read_field(a.field, cfg.grid), free, n_max, a.samples, c.seed, opt);
  };
  const McEstimate fine = estimate(a.steps_per_beta);
  json body = estimate_json(fine);
  body["weight"] = a.hs ? "hs" : "external";
  body["x"] = a.x;
  body["y"] = a.y;
  body["n_max"] = n_max;
  body["steps_per_beta"] = a.steps_per_beta;
  // Same seed at half the node count: the difference tracks the quadrature error.
  if (a.steps_per_beta >= 2) {
    const McEstimate coarse = estimate(a.steps_per_beta / 2);
    body["coarse_mean"] = coarse.mean;
    body["step_halving_delta"] = std::abs(fine.mean - coarse.mean);
  }
  write_json(run, c.out, body);
  run.finish();
  return 0;
}

int entropy(const Common& c, const EntropyArgs& a) {
  Run run(c, "entropy");
  const auto& cfg = run.config();
  const auto free = build_kernel(cfg.model, cfg.grid);
  const auto gA = read_field(a.field, cfg.grid).dressed(cfg.cutoff.g);
  EntropyOptions opt;
  opt.n_trunc = a.n_trunc;
  opt.n_lambda = a.n_lambda;
  const auto b = w_a(free, gA, cfg.model.phi0, cfg.cutoff, opt);
  json j;
  j["t0"] = b.t0;
  j["t1"] = b.t1;
  j["t2"] = b.t2;
  j["w_a"] = b.w_a;
  j["s0_series"] = b.s0_series;
  j["s0_series_tail"] = b.s0_series_tail;
  j["s0_lambda"] = b.s0_lambda;
  j["s0_discrepancy"] = b.s0_discrepancy;
  j["t1_primary"] = b.t1_forms.primary;
  j["t1_by_parts"] = b.t1_forms.by_parts;
  j["t1_by_parts_plain"] = b.t1_forms.by_parts_plain;
  j["t1_discrepancy"] = b.t1_forms.discrepancy;
  j["beta_sup_a"] = b.beta_sup_a;
  j["hypothesis_warning"] = b.hypothesis_warning;
  write_json(run, c.out, j);
  run.finish();
  return 0;
}

int partition(const Common& c, const PartitionArgs& a) {
  Run run(c, "partition");
  const auto& cfg = run.config();
  const auto free = build_kernel(cfg.model, cfg.grid);
  const auto est = partition_mc(free, cfg.potential, cfg.cutoff, cfg.model.coupling, cfg.model.phi0, a.samples, c.seed,
                                PartitionOptions{c.workers, 0.10});
  const auto bi = bound_interval(cfg);
  json j;
  j["z"] = est.z.mean;
  j["std_error"] = est.z.std_error;
  j["n_samples"] = est.z.n_samples;
  j["seed"] = est.z.seed;
  j["rejected"] = est.rejected;
  j["rejection_fraction"] = est.rejection_fraction;
  j["c1_sampled"] = est.c1_sampled;
  j["c1_error"] = est.c1_error;
  j["c2_sampled"] = est.c2_sampled;
  j["c2_error"] = est.c2_error;
  j["c1_physical"] = est.c1_physical;
  j["c2_physical"] = est.c2_physical;
  j["e_bound"] = bi.e.value;
  j["e_convergent"] = bi.e.convergent;
  j["c_tilde"] = bi.c_tilde;
  j["xi"] = 1.0;
  j["bound_lo"] = bi.lo;
  j["bound_hi"] = bi.hi;
  j["inside_bounds"] = bi.e.convergent && est.z.mean > bi.lo && est.z.mean < bi.hi;
  write_json(run, c.out, j);
  run.finish();
  return 0;
}

int twopoint(const Common& c, const TwoPointArgs& a) {
  Run run(c, "twopoint");
  const auto& cfg = run.config();
  const auto free = build_kernel(cfg.model, cfg.grid);
  const auto f = read_site_function(a.f, cfg.grid);
  const auto h = read_site_function(a.h, cfg.grid);
  const auto est = interacting_two_point_mc(f, h, free, cfg.potential, cfg.cutoff, cfg.model.coupling, cfg.model.phi0,
                                            a.samples, c.seed, PartitionOptions{c.workers, 0.10});
  json j;
  j["value"] = est.mean;
  j["std_error"] = est.std_error;
  j["n_samples"] = est.n_samples;
  j["seed"] = est.seed;
  j["max_sample_weight"] = est.max_sample_weight;
  j["weight_violations"] = est.weight_violations;
  write_json(run, c.out, j);
  run.finish();
  return 0;
}

int region(const Common& c, const RegionArgs& a) {
  Run run(c, "region");
  const auto& cfg = run.config();
  const auto nm = norms(cfg.potential.scaled(cfg.model.coupling), cfg.cutoff, cfg.grid);
  const Eigen::VectorXd& g = cfg.cutoff.g;
  const double ad = cfg.grid.cell_volume();
  const GNorm kind = a.g_norm == "l2" ? GNorm::l2 : a.g_norm == "sup" ? GNorm::sup : GNorm::l1;
  const double g_norm = kind == GNorm::l1   ? nm.g_l1
                        : kind == GNorm::l2 ? std::sqrt(g.squaredNorm() * ad)
                                            : g.cwiseAbs().maxCoeff();

  // Unswept parameters stay at their configured values.
  std::vector<Axis> axes = parse_sweep(a.sweep);
  auto fixed = [&](const std::string& key, double value) {
    for (const auto& ax : axes)
      if (ax.key == key) return;
    axes.push_back({key, value, value, 1});
  };
  fixed("beta", cfg.model.beta);
  fixed("phi0", cfg.model.phi0);
  fixed("epsilon", cfg.model.epsilon);
  fixed("v0", nm.v0);

  std::ostringstream csv;
  csv << "beta,phi0,v0,g_l1,vtilde_gg,epsilon,c_tilde,g_norm,g_norm_kind,R,margin,convergent,gamma,intro_margin,"
         "intro_convergent\n";
  std::vector<int> idx(axes.size(), 0);
  long points = 0;
  for (;;) {
    RegionInputs in;
    in.g_l1 = nm.g_l1;
    in.g_norm = g_norm;
    in.g_norm_kind = kind;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const double v = axes[k].at(idx[k]);
      if (axes[k].key == "beta") in.beta = v;
      else if (axes[k].key == "phi0") in.phi0 = v;
      else if (axes[k].key == "epsilon") in.epsilon = v;
      else in.v0 = v;
    }
    if (!(in.beta > 0)) throw DomainError("region: beta must be positive");
    // vtilde_gg carries one factor of beta from the time integral; v0 rescales the potential.
    const double v_scale = nm.v0 > 0 ? in.v0 / nm.v0 : 0.0;
    in.vtilde_gg = nm.vtilde_gg * (in.beta / cfg.grid.beta()) * v_scale;
    ModelParams p = cfg.model;
    p.beta = in.beta;
    p.epsilon = in.epsilon;
    in.c_tilde = estimate_ctilde(p, cfg.grid.dim()).c_tilde;
    const RegionPoint r = region(in);
    csv << g17(in.beta) << ',' << g17(in.phi0) << ',' << g17(in.v0) << ',' << g17(in.g_l1) << ','
        << g17(in.vtilde_gg) << ',' << g17(in.epsilon) << ',' << g17(in.c_tilde) << ',' << g17(in.g_norm) << ','
        << to_string(kind) << ',' << g17(r.R) << ',' << g17(r.margin) << ',' << (r.convergent ? 1 : 0) << ','
        << g17(r.gamma) << ',' << g17(r.intro_margin) << ',' << (r.intro_convergent ? 1 : 0) << '\n';
    ++points;
    std::size_t k = 0;
    while (k < axes.size() && ++idx[k] == axes[k].n) idx[k++] = 0;
    if (k == axes.size()) break;
  }
  Run::write_text(c.out, csv.str());
  run.add_output(c.out);
  run.note("points", points);
  run.note("g_norm_kind", to_string(kind));
  run.finish();
  return 0;
}

int selftest(bool quick) {
  struct Check {
    const char* name;
    std::function<bool()> ok;
  };
  auto close = [](double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
  const GridSpec g1(1, 6, 6.0, 8, 1.0);
  ModelParams p;
  p.beta = 1.0;
  p.mu = -1.0;

  std::vector<Check> checks = {
      {"polylog at y = 0", [&] { return polylog(1.5, 0.0) == 0.0; }},
      {"polylog(2, 1) = pi^2/6", [&] { return close(polylog(2.0, 1.0), M_PI * M_PI / 6, 1e-12); }},
      {"Bose factors at beta K = ln 2",
       [&] {
         const auto b = bose_factors(std::log(2.0), 1.0);
         return close(b.minus, 2.0, 1e-14) && close(b.plus, 1.0, 1e-14);
       }},
      {"Bell numbers", [&] { return bell_number(1) == 1 && bell_number(5) == 52 && bell_number(10) == 115975; }},
      {"connected graph counts",
       [&] { return connected_graph_count(1) == 1 && connected_graph_count(3) == 4 && connected_graph_count(4) == 38; }},
      {"Wick pairing counts",
       [&] {
         return count_wick_pairings(FieldType::real, 6) == 15 && count_wick_pairings(FieldType::charged, 3) == 6 &&
                count_wick_pairings(FieldType::real, 5) == 0;
       }},
      {"Gaussian cumulants vanish beyond order 2",
       [&] {
         const auto k = cumulants_from_moments({0.0, 2.0, 0.0, 12.0});
         return close(k[1], 2.0, 1e-14) && std::abs(k[2]) < 1e-14 && std::abs(k[3]) < 1e-12;
       }},
      {"E bound: v0 = 0 gives E = 0",
       [&] {
         const auto e = e_bound(1.0, 0.0, 1.0, 1.0, 1.0);
         return e.value == 0.0 && e.convergent;
       }},
      {"E bound: E = ln 2 is not convergent",
       [&] { return !e_bound(1.0, 1.0, std::log(2.0), 1.0, 1.0).convergent; }},
      {"E bound: doubling beta halves E",
       [&] { return close(e_bound(2.0, 0.3, 1.2, 1.0, 0.7).value, 0.5 * e_bound(1.0, 0.3, 1.2, 1.0, 0.7).value, 1e-15); }},
      {"condensate bound at phi0 = 0",
       [&] {
         const auto b = condensate_bound(1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0);
         return b.chi_form == 1.0 && b.eps_form == 1.0 && b.lower == 1.0;
       }},
      {"region at phi0 = 0, v0 = 0",
       [&] {
         RegionInputs in;
         const auto r = region(in);
         return close(r.margin, 1.0, 1e-15) && r.convergent;
       }},
      {"gamma of an empty list", [&] { return gamma_exponentials(g1, Potential::gaussian(1.0, 1.0), {}) == 1.0; }},
      {"Dyson series at A = 0 is the free kernel",
       [&] {
         const auto free = build_kernel(p, g1);
         const auto k = dyson_kernel(free, LatticeField(g1), 5, VertexRule::slice_exact);
         return (k.op - free_slice_operator(free)).cwiseAbs().maxCoeff() == 0.0;
       }},
      {"W_A at A = 0",
       [&] {
         const auto free = build_kernel(p, g1);
         const auto b = w_a(free, LatticeField(g1), 0.0, Cutoff::uniform(g1));
         return b.t0 == 0.0 && b.t1 == 0.0 && std::abs(b.t2) < 1e-15;
       }},
  };
  if (!quick) {
    checks.push_back({"sliced and Dyson kernels agree", [&] {
                        const auto free = build_kernel(p, g1);
                        LatticeField A(g1);
                        for (Eigen::Index i = 0; i < A.values.size(); ++i) A.values.data()[i] = 0.1 * std::sin(1.0 + i);
                        const auto d = dyson_kernel(free, A, 60, VertexRule::slice_exact);
                        const auto s = sliced_kernel(free, A);
                        return (d.op - s.op).cwiseAbs().maxCoeff() < 1e-10 * s.op.cwiseAbs().maxCoeff();
                      }});
    checks.push_back({"Stirling ratio inequality k = 2..50", [&] {
                        for (const auto& r : stirling_ratio_check(50))
                          if (!r.holds) return false;
                        return true;
                      }});
    checks.push_back({"v = 0 partition function is 1", [&] {
                        const auto free = build_kernel(p, g1);
                        const auto z = partition_mc(free, Potential::gaussian(0.0, 1.0), Cutoff::uniform(g1), 1.0, 0.0,
                                                    50, 7);
                        return close(z.z.mean, 1.0, 1e-14);
                      }});
  }

  int failed = 0;
  for (const auto& ch : checks) {
    bool ok = false;
    try {
      ok = ch.ok();
    } catch (const std::exception& e) {
      std::cout << "  threw: " << e.what() << "\n";
    }
    std::cout << (ok ? "ok   " : "FAIL ") << ch.name << "\n";
    failed += !ok;
  }
  std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return failed ? 1 : 0;
}

}  // namespace bosekms::cli
