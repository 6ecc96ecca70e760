#pragma once

// Subcommand handlers behind the bose-kms executable. Each returns the
// process exit status; errors propagate as exceptions and are mapped in main.

#include <cstdint>
#include <string>
#include <vector>

namespace bosekms::cli {

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string command_line;
};

struct PropagatorArgs {
  double u = 0.0;
};
struct CumulantArgs {
  int count_graphs = 0;
  int count_pairings = -1;
  std::string kind = "real";
  int bell = 0;
};
struct DysonArgs {
  std::string field;
  int order = 8;
  std::string method = "dyson";  // dyson | sliced | resolvent
  std::string rule = "slice_exact";
};
struct McArgs {
  std::string field;
  bool hs = false;
  std::size_t x = 0, y = 0;
  long samples = 10000;
  int n_max = -1;
  int steps_per_beta = 64;
};
struct EntropyArgs {
  std::string field;
  int n_trunc = 40;
  int n_lambda = 8;
};
struct PartitionArgs {
  long samples = 10000;
};
struct TwoPointArgs {
  std::string f, h;
  long samples = 10000;
};
struct RegionArgs {
  std::string sweep;
  std::string g_norm = "l1";
};

int propagator(const Common& c, const PropagatorArgs& a);
int cumulants(const CumulantArgs& a);
int dyson(const Common& c, const DysonArgs& a);
int mc(const Common& c, const McArgs& a);
int entropy(const Common& c, const EntropyArgs& a);
int partition(const Common& c, const PartitionArgs& a);
int twopoint(const Common& c, const TwoPointArgs& a);
int region(const Common& c, const RegionArgs& a);
int selftest(bool quick);

}  // namespace bosekms::cli
