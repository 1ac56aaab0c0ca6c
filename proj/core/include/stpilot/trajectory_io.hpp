#pragma once

// Plain-text trajectory files: one frame per line, twelve whitespace-separated
// decimal floats holding the row-major 3x4 [R|t]. Lines whose first
// non-blank character is '#' are comments; blank lines are skipped.

#include <filesystem>
#include <iosfwd>

#include "stpilot/geometry.hpp"

namespace stpilot::geometry {

/// Rotations read from text are projected onto SO(3) when they deviate by at
/// most this much (short decimal expansions); larger deviations are rejected.
inline constexpr double kTextRotationTolerance = 1e-4;

Trajectory parse_trajectory(std::istream& in, const std::string& source_name = "<stream>");
void format_trajectory(std::ostream& out, const Trajectory& traj);

Trajectory read_trajectory(const std::filesystem::path& path);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace stpilot::geometry
