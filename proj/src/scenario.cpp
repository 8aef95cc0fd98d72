#include "sonarfusion/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "sonarfusion/error.hpp"

namespace sonarfusion {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError("scenario: " + where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    fail(where, "expected an object");
  }
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) {
      fail(where, "unknown key \"" + item.key() + "\"");
    }
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(where, std::string("missing key \"") + key + "\"");
  }
  return *it;
}

double number(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_number()) {
    fail(where + "." + key, "expected a number");
  }
  return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

int integer(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_number_integer()) {
    fail(where + "." + key, "expected an integer");
  }
  return v.get<int>();
}

const json& array(const json& obj, const char* key) {
  const json& v = require(obj, "<root>", key);
  if (!v.is_array()) {
    fail(key, "expected an array");
  }
  return v;
}

int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

ScenarioWorld load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario: parse error at line " +
                        std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                        e.what());
  }

  reject_unknown(doc, "<root>",
                 {"grid", "segments", "path", "firings", "sensor", "prior", "robot", "seed"});
  ScenarioWorld world;

  const json& grid = require(doc, "<root>", "grid");
  reject_unknown(grid, "grid", {"width", "height", "cell_size"});
  world.grid.width = integer(grid, "grid", "width");
  world.grid.height = integer(grid, "grid", "height");
  world.grid.cell_size = number_or(grid, "grid", "cell_size", 1.0);

  const json& segments = array(doc, "segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string where = "segments[" + std::to_string(i) + "]";
    const json& s = segments[i];
    reject_unknown(s, where, {"x1", "y1", "x2", "y2", "critical_angle_deg"});
    world.segments.push_back({{number(s, where, "x1"), number(s, where, "y1")},
                              {number(s, where, "x2"), number(s, where, "y2")},
                              number_or(s, where, "critical_angle_deg", 60.0)});
  }

  const json& path = array(doc, "path");
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::string where = "path[" + std::to_string(i) + "]";
    const json& p = path[i];
    reject_unknown(p, where, {"x", "y", "heading_deg"});
    world.path.push_back(
        {{number(p, where, "x"), number(p, where, "y")}, number_or(p, where, "heading_deg", 0.0)});
  }

  const json& firings = array(doc, "firings");
  for (std::size_t i = 0; i < firings.size(); ++i) {
    const std::string where = "firings[" + std::to_string(i) + "]";
    const json& f = firings[i];
    reject_unknown(f, where, {"pose", "bearing_deg"});
    world.firings.push_back({integer(f, where, "pose"), number_or(f, where, "bearing_deg", 0.0)});
  }

  if (doc.contains("sensor")) {
    const json& s = doc["sensor"];
    reject_unknown(s, "sensor",
                   {"r_min", "r_max", "epsilon", "beam_half_width_deg", "p_true", "p_dropout",
                    "p_spurious"});
    SensorParams& sp = world.sensor;
    sp.r_min = number_or(s, "sensor", "r_min", sp.r_min);
    sp.r_max = number_or(s, "sensor", "r_max", sp.r_max);
    sp.epsilon = number_or(s, "sensor", "epsilon", sp.epsilon);
    sp.beam_half_width_deg = number_or(s, "sensor", "beam_half_width_deg", sp.beam_half_width_deg);
    sp.p_true = number_or(s, "sensor", "p_true", sp.p_true);
    sp.p_dropout = number_or(s, "sensor", "p_dropout", sp.p_dropout);
    sp.p_spurious = number_or(s, "sensor", "p_spurious", sp.p_spurious);
  }

  // k defaults to a ramp that saturates at 500 cells.
  bool explicit_k = false;
  if (doc.contains("prior")) {
    const json& p = doc["prior"];
    reject_unknown(p, "prior", {"p_min", "p_max", "k", "c"});
    PriorParams& pp = world.prior;
    pp.p_min = number_or(p, "prior", "p_min", pp.p_min);
    pp.p_max = number_or(p, "prior", "p_max", pp.p_max);
    pp.c = number_or(p, "prior", "c", pp.c);
    if (p.contains("k")) {
      pp.k = number(p, "prior", "k");
      explicit_k = true;
    }
  }
  if (!explicit_k) {
    const double cell_area = world.grid.cell_size * world.grid.cell_size;
    world.prior.k = (world.prior.p_max - world.prior.p_min) / (500.0 * cell_area);
  }

  if (doc.contains("robot")) {
    const json& r = doc["robot"];
    reject_unknown(r, "robot", {"radius"});
    world.robot_radius = number_or(r, "robot", "radius", 0.0);
  }

  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    world.seed = s.get<std::uint64_t>();
  }

  try {
    world.validate();
  } catch (const ModelError& e) {
    throw ScenarioError(std::string("scenario: invariant violation: ") + e.what());
  }
  return world;
}

ScenarioWorld load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioError("scenario: cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

}  // namespace sonarfusion
