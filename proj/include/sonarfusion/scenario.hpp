#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sonarfusion/world.hpp"

namespace sonarfusion {

/// Parses and validates a JSON scenario. Throws ScenarioError naming the
/// offending line or field.
///
/// Required keys: grid, segments, path, firings. Optional: sensor, prior,
/// robot, seed. Unknown keys are rejected at every level.
ScenarioWorld load_scenario(std::string_view text);

ScenarioWorld load_scenario_file(const std::filesystem::path& path);

}  // namespace sonarfusion
