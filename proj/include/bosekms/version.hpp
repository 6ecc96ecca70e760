#pragma once

namespace bosekms {
inline constexpr const char* kVersion = "0.1.0";
// Bumped whenever a CSV/JSON output changes shape.
inline constexpr int kSchemaVersion = 1;
}  // namespace bosekms
