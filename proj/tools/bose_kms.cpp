#include "commands.hpp"

#include "bosekms/model.hpp"
#include "bosekms/version.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace bosekms;

int main(int argc, char** argv) {
  CLI::App app{"Thermal propagators, HS averaging and convergence bounds on periodic lattices", "bose-kms"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  cli::Common common;
  for (int i = 0; i < argc; ++i) common.command_line += (i ? " " : "") + std::string(argv[i]);

  auto with_config = [&](CLI::App* sub, bool out_required = true) {
    sub->add_option("--config", common.config, "INI configuration")->required()->check(CLI::ExistingFile);
    auto* out = sub->add_option("--out", common.out, "output file");
    if (out_required) out->required();
  };
  auto with_sampling = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "master seed");
    sub->add_option("--workers", common.workers, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
  };

  cli::PropagatorArgs prop;
  auto* p = app.add_subcommand("propagator", "momentum multiplier at imaginary time u");
  with_config(p);
  p->add_option("--u", prop.u, "imaginary time (reduced mod beta; 0 means 0+)")->required();

  cli::CumulantArgs cum;
  auto* cu = app.add_subcommand("cumulants", "combinatorial counts");
  auto* cg = cu->add_option("--count-graphs", cum.count_graphs, "connected labeled graphs on n vertices")
                 ->check(CLI::Range(1, 7));
  auto* cp = cu->add_option("--count-pairings", cum.count_pairings,
                            "Wick pairings at order N: (2N-1)!! for real, N! for charged fields")
                 ->check(CLI::Range(0, 20));
  cu->add_option("--kind", cum.kind, "real | charged")->check(CLI::IsMember({"real", "charged"}))->needs(cp);
  auto* cb = cu->add_option("--bell", cum.bell, "Bell number B_n")->check(CLI::Range(1, 25));
  cg->excludes(cp)->excludes(cb);
  cp->excludes(cb);

  cli::DysonArgs dy;
  auto* d = app.add_subcommand("dyson", "interacting kernel under an external field");
  with_config(d);
  d->add_option("--field", dy.field, "A.csv with rows site,slice,value (absent: A = 0)")->check(CLI::ExistingFile);
  d->add_option("--order", dy.order, "Dyson truncation order")->check(CLI::NonNegativeNumber);
  d->add_option("--method", dy.method, "dyson | sliced | resolvent")
      ->check(CLI::IsMember({"dyson", "sliced", "resolvent"}));
  d->add_option("--rule", dy.rule, "vertex rule for dyson/resolvent")
      ->check(CLI::IsMember({"slice_exact", "trapezoid"}));

  cli::McArgs mca;
  auto* m = app.add_subcommand("mc", "Feynman-Kac estimate of Omega(x, y)");
  with_config(m);
  with_sampling(m);
  auto* mf = m->add_option("--field", mca.field, "external field A.csv")->check(CLI::ExistingFile);
  auto* mh = m->add_flag("--hs", mca.hs, "HS-averaged weight with the configured potential");
  mf->excludes(mh);
  m->add_option("--x", mca.x, "site index of x")->required();
  m->add_option("--y", mca.y, "site index of y")->required();
  m->add_option("--samples", mca.samples, "bridge samples")->check(CLI::PositiveNumber);
  m->add_option("--n-max", mca.n_max, "largest winding number (default: tail < 1e-12)");
  m->add_option("--steps-per-beta", mca.steps_per_beta, "path nodes per unit beta")->check(CLI::PositiveNumber);

  cli::EntropyArgs en;
  auto* e = app.add_subcommand("entropy", "W_A = T0 + T1 + T2 with all alternative forms");
  with_config(e);
  e->add_option("--field", en.field, "A.csv")->required()->check(CLI::ExistingFile);
  e->add_option("--n-trunc", en.n_trunc, "series truncation")->check(CLI::Range(2, 400));
  e->add_option("--n-lambda", en.n_lambda, "Gauss-Legendre nodes")->check(CLI::Range(1, 200));

  cli::PartitionArgs pa;
  auto* z = app.add_subcommand("partition", "Z = E_A[e^{W_A}] with the E-bound interval");
  with_config(z);
  with_sampling(z);
  z->add_option("--samples", pa.samples, "A samples")->check(CLI::Range(2L, 100000000L));

  cli::TwoPointArgs tp;
  auto* t = app.add_subcommand("twopoint", "<f, S h> by the HS ratio estimator");
  t->set_help_flag("--help", "print this help");  // frees the short name for --h
  with_config(t);
  with_sampling(t);
  t->add_option("--f", tp.f, "f.csv with rows site,value")->required()->check(CLI::ExistingFile);
  t->add_option("--h", tp.h, "h.csv with rows site,value")->required()->check(CLI::ExistingFile);
  t->add_option("--samples", tp.samples, "A samples")->check(CLI::Range(200L, 100000000L));

  cli::RegionArgs rg;
  auto* r = app.add_subcommand("region", "convergence-region sweep");
  with_config(r);
  r->add_option("--sweep", rg.sweep, "e.g. beta=0.1:10:200,phi0=0:2:50");
  r->add_option("--g-norm", rg.g_norm, "norm of g in R")->check(CLI::IsMember({"l1", "l2", "sup"}));

  bool quick = false;
  auto* s = app.add_subcommand("selftest", "oracle self-checks");
  s->add_flag("--quick", quick, "closed-form checks only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*p) return cli::propagator(common, prop);
    if (*cu) {
      if (!*cg && !*cp && !*cb) {
        std::cerr << "cumulants: one of --count-graphs, --count-pairings, --bell is required\n";
        return 2;
      }
      return cli::cumulants(cum);
    }
    if (*d) return cli::dyson(common, dy);
    if (*m) return cli::mc(common, mca);
    if (*e) return cli::entropy(common, en);
    if (*z) return cli::partition(common, pa);
    if (*t) return cli::twopoint(common, tp);
    if (*r) return cli::region(common, rg);
    if (*s) return cli::selftest(quick);
  } catch (const InvariantError& err) {
    std::cerr << "invariant violated: " << err.name << "\n  " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
