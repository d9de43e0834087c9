#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "dstc/hybrid_sim.hpp"
#include "dstc/synthesis.hpp"
#include "dstc/system.hpp"

namespace dstc {

using json = nlohmann::json;

/// Shortest text that reads back to the same double ("nan"/"inf" for non-finite values).
[[nodiscard]] std::string format_double(double v);

/// {"name": "van_der_pol" | "linear_test", "dimension", "P", "c"}.
/// Throws ConfigError on unknown names or malformed entries.
[[nodiscard]] SystemSpec system_from_json(const json& doc);

/// Manifest: {"fallback_index", "sets": [{epsilon, gamma, L, margin, grid_density}, ...]}.
[[nodiscard]] json family_to_json(const ParameterFamily& family);
[[nodiscard]] ParameterFamily family_from_json(const json& doc);

/// One row per recorded flow point: t, j, x_1..x_n, V, U, interval, set_index, fallback.
void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj);

/// One row per decision: j, t_j, h, set_index, epsilon_i, used_fallback, V, C.
void write_decisions_csv(std::ostream& os, const HybridTrajectory& traj);

/// One row per monitor check: monitor, j, slack, pass.
void write_monitors_csv(std::ostream& os, const HybridTrajectory& traj);

[[nodiscard]] json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace dstc
