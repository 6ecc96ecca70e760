#pragma once

// INI configuration with sections [model], [grid], [potential], [cutoff].

#include "bosekms/model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace bosekms {

struct Config {
  ModelParams model;
  GridSpec grid{1, 8, 8.0, 8, 1.0};
  Potential potential = Potential::gaussian(0.0, 1.0);
  Cutoff cutoff;
  std::string text;  // raw file contents, hashed into run manifests
};

/// Parses and validates; failures raise InvariantError naming the broken rule.
Config load_config(const std::string& path);
Config parse_config(const std::string& text);

/// FNV-1a 64-bit digest, hex encoded.
std::string config_hash(const std::string& text);

}  // namespace bosekms
