#include "nlok/geometry_io.hpp"

#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "nlok/error.hpp"

namespace nlok {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("geometry: missing field '") + key + "'", 0, key);
  return j.at(key);
}

Vec2 read_vec2(const json& j, const char* key) {
  const auto v = field(j, key).get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError(std::string("geometry: '") + key + "' needs two entries", 0, key);
  return {v[0], v[1]};
}

}  // namespace

SetGeometry geometry_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("geometry: invalid JSON: ") + e.what());
  }
  try {
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "intervals") {
      std::vector<IntervalSet::Interval> ivs;
      for (const auto& pair : field(j, "intervals")) {
        const auto v = pair.get<std::vector<double>>();
        if (v.size() != 2) throw ConfigError("geometry: each interval needs [a, b]", 0, "intervals");
        ivs.emplace_back(v[0], v[1]);
      }
      return IntervalSet(std::move(ivs));
    }
    if (kind == "ball") {
      return Ball(field(j, "center").get<std::vector<double>>(), field(j, "radius").get<double>());
    }
    if (kind == "star") {
      const Vec2 c = read_vec2(j, "center");
      if (j.contains("samples")) return StarShape2D(c, j.at("samples").get<std::vector<double>>());
      const auto& cj = field(j, "coefficients");
      FourierCoefficients coeffs;
      coeffs.r0 = field(cj, "r0").get<double>();
      if (cj.contains("a")) coeffs.a = cj.at("a").get<std::vector<double>>();
      if (cj.contains("b")) coeffs.b = cj.at("b").get<std::vector<double>>();
      const auto m = j.value("resolution", std::size_t{256});
      return StarShape2D::from_coefficients(c, coeffs, m);
    }
    throw ConfigError("geometry: unknown kind '" + kind + "'", 0, "kind");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("geometry: malformed field: ") + e.what());
  }
}

std::string geometry_to_json(const SetGeometry& set) {
  json j = std::visit(
      Overloaded{[](const IntervalSet& s) {
                   json arr = json::array();
                   for (const auto& [a, b] : s.intervals()) arr.push_back({a, b});
                   return json{{"kind", "intervals"}, {"intervals", arr}};
                 },
                 [](const Ball& b) {
                   return json{{"kind", "ball"},
                               {"center", std::vector<double>(b.center().begin(), b.center().end())},
                               {"radius", b.radius()}};
                 },
                 [](const StarShape2D& s) {
                   return json{{"kind", "star"},
                               {"center", {s.center().x, s.center().y}},
                               {"samples", std::vector<double>(s.samples().begin(), s.samples().end())}};
                 }},
      set);
  return j.dump(2);
}

SetGeometry read_geometry(const std::string& path) {
  if (!std::filesystem::exists(path)) throw FileNotFound(path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return geometry_from_json(ss.str());
}

void write_geometry(const std::string& path, const SetGeometry& set) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write geometry file: " + path);
  out << geometry_to_json(set) << '\n';
}

}  // namespace nlok
