#include "sonar3d/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "sonar3d/errors.hpp"

namespace sonar3d {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& field,
                       const std::string& what) {
  throw ConfigError(source + ": field '" + field + "': " + what);
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& source,
               const std::string& path) {
  if (!j.is_object()) fail(source, path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail(source, path + "." + key, "unknown field");
  }
}

template <class T>
T required(const json& j, const char* key, const std::string& source, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(source, path + "." + key, "missing");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(source, path + "." + key, "wrong type");
  }
}

template <class T>
T optional(const json& j, const char* key, T fallback, const std::string& source,
           const std::string& path) {
  if (!j.contains(key)) return fallback;
  return required<T>(j, key, source, path);
}

CartesianPoint point3(const json& j, const char* key, const std::string& source,
                      const std::string& path) {
  const auto v = required<std::vector<double>>(j, key, source, path);
  if (v.size() != 3) fail(source, path + "." + key, "expected 3 numbers");
  return {v[0], v[1], v[2]};
}

std::pair<double, double> point2(const json& j, const char* key, const std::string& source,
                                 const std::string& path) {
  const auto v = required<std::vector<double>>(j, key, source, path);
  if (v.size() != 2) fail(source, path + "." + key, "expected 2 numbers");
  return {v[0], v[1]};
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write file: " + path);
  out << text;
  if (!out) throw RuntimeError("write failed: " + path);
}

Scene parse_scene(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  only_keys(j, {"water_depth", "primitives"}, source, "scene");
  Scene scene;
  scene.water_depth = optional<double>(j, "water_depth", 0.0, source, "scene");
  if (!j.contains("primitives") || !j["primitives"].is_array()) {
    fail(source, "primitives", "expected an array");
  }
  int index = 0;
  for (const auto& p : j["primitives"]) {
    const std::string path = "primitives[" + std::to_string(index++) + "]";
    const auto kind = required<std::string>(p, "kind", source, path);
    Primitive prim;
    prim.class_tag = required<std::string>(p, "class", source, path);
    if (kind == "cylinder") {
      only_keys(p, {"kind", "class", "center", "radius", "height"}, source, path);
      prim.shape = Cylinder{point3(p, "center", source, path),
                            required<double>(p, "radius", source, path),
                            required<double>(p, "height", source, path)};
    } else if (kind == "box") {
      only_keys(p, {"kind", "class", "center", "extents", "yaw_deg"}, source, path);
      prim.shape = Box{point3(p, "center", source, path), point3(p, "extents", source, path),
                       deg2rad(optional<double>(p, "yaw_deg", 0.0, source, path))};
    } else if (kind == "wall") {
      only_keys(p, {"kind", "class", "from", "to", "z_range"}, source, path);
      const auto a = point2(p, "from", source, path);
      const auto b = point2(p, "to", source, path);
      const auto z = point2(p, "z_range", source, path);
      prim.shape = Wall{a.first, a.second, b.first, b.second, z.first, z.second};
    } else {
      fail(source, path + ".kind", "unknown primitive kind '" + kind + "'");
    }
    scene.primitives.push_back(std::move(prim));
  }
  try {
    scene.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return scene;
}

Scene load_scene(const std::string& path) { return parse_scene(read_text_file(path), path); }

Mission parse_mission(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  only_keys(j, {"depth", "keyframe_spacing", "waypoints", "keyframes"}, source, "mission");
  const double depth = required<double>(j, "depth", source, "mission");
  const bool has_wp = j.contains("waypoints");
  const bool has_kf = j.contains("keyframes");
  if (has_wp == has_kf) {
    fail(source, "waypoints", "give exactly one of 'waypoints' or 'keyframes'");
  }
  if (has_wp) {
    const double spacing = required<double>(j, "keyframe_spacing", source, "mission");
    if (!(spacing > 0.0)) fail(source, "keyframe_spacing", "must be > 0");
    std::vector<std::pair<double, double>> wps;
    int index = 0;
    for (const auto& w : j["waypoints"]) {
      const std::string path = "waypoints[" + std::to_string(index++) + "]";
      std::vector<double> v;
      try {
        v = w.get<std::vector<double>>();
      } catch (const json::exception&) {
        fail(source, path, "expected [x, y]");
      }
      if (v.size() != 2) fail(source, path, "expected [x, y]");
      wps.emplace_back(v[0], v[1]);
    }
    if (wps.size() < 2) fail(source, "waypoints", "need at least 2 waypoints");
    try {
      return sample_keyframes(wps, spacing, depth);
    } catch (const std::exception& e) {
      fail(source, "waypoints", e.what());
    }
  }
  Mission m;
  m.keyframe_spacing = optional<double>(j, "keyframe_spacing", 0.0, source, "mission");
  int index = 0;
  for (const auto& k : j["keyframes"]) {
    const std::string path = "keyframes[" + std::to_string(index++) + "]";
    only_keys(k, {"x", "y", "yaw_deg"}, source, path);
    m.keyframes.emplace_back(required<double>(k, "x", source, path),
                             required<double>(k, "y", source, path),
                             deg2rad(optional<double>(k, "yaw_deg", 0.0, source, path)), depth);
  }
  if (m.keyframes.empty()) fail(source, "keyframes", "must not be empty");
  return m;
}

Mission load_mission(const std::string& path) { return parse_mission(read_text_file(path), path); }

}  // namespace sonar3d
