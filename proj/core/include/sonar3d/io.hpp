#pragma once

#include <string>

#include "sonar3d/scene.hpp"
#include "sonar3d/simulator.hpp"

namespace sonar3d {

/// Scene file: {"water_depth": d, "primitives": [...]} where each primitive
/// is a cylinder, box or wall record with a class tag. Angles in degrees.
Scene parse_scene(const std::string& text, const std::string& source = "scene");
Scene load_scene(const std::string& path);

/// Mission file: either waypoints sampled at keyframe_spacing, or an
/// explicit list of keyframes.
Mission parse_mission(const std::string& text, const std::string& source = "mission");
Mission load_mission(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sonar3d
