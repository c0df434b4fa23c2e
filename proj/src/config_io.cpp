#include "aoisched/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aoi {

using nlohmann::json;

namespace {

double number(const json& obj, const char* key, std::size_t n) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    throw ConfigError("source " + std::to_string(n + 1) + ": '" + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

SystemConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("sources") || !doc["sources"].is_array())
    throw ConfigError("config needs a top-level 'sources' array");

  std::vector<SourceParams> raw;
  const auto& sources = doc["sources"];
  for (std::size_t n = 0; n < sources.size(); ++n) {
    const auto& obj = sources[n];
    if (!obj.is_object()) throw ConfigError("source " + std::to_string(n + 1) + " is not an object");
    SourceParams src;
    src.mean_service = number(obj, "mean_service", n);
    src.drop_prob = obj.contains("drop_prob") ? number(obj, "drop_prob", n) : 0.0;
    src.weight = obj.contains("weight") ? number(obj, "weight", n) : 1.0;

    const bool has_scov = obj.contains("scov");
    if (has_scov) src.scov = number(obj, "scov", n);
    if (obj.contains("dist")) {
      if (!obj["dist"].is_string())
        throw ConfigError("source " + std::to_string(n + 1) + ": 'dist' must be a string");
      src.dist = parse_dist(obj["dist"].get<std::string>());
      if (!has_scov) src.scov = src.dist == ServiceDist::exponential ? 1.0 : 0.0;
    } else if (src.scov == 0.0) {
      src.dist = ServiceDist::deterministic;
    } else if (src.scov == 1.0) {
      src.dist = ServiceDist::exponential;
    } else {
      src.dist = ServiceDist::gamma;
    }
    raw.push_back(src);
  }
  return validate_config(std::move(raw));
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string dump_config_json(const SystemConfig& config) {
  json sources = json::array();
  for (const auto& src : config.sources()) {
    sources.push_back({{"mean_service", src.mean_service},
                       {"scov", src.scov},
                       {"drop_prob", src.drop_prob},
                       {"weight", src.weight},
                       {"dist", std::string(to_string(src.dist))}});
  }
  return json{{"sources", sources}}.dump(2) + "\n";
}

SystemConfig scenario_config(int scenario, std::size_t num_sources) {
  if (scenario < 1 || scenario > 4) throw ConfigError("scenario must be 1..4");
  if (num_sources == 0) throw ConfigError("scenario needs at least one source");
  std::vector<SourceParams> raw(num_sources);
  for (std::size_t i = 0; i < num_sources; ++i) {
    const auto n = static_cast<double>(i + 1);
    auto& src = raw[i];
    src.weight = n;
    if (scenario == 2) src.drop_prob = 1.0 / (2.0 * n);
    if (scenario == 3) src.mean_service = static_cast<double>((i + 1) % 4 + 1);
    if (scenario == 4) {
      src.dist = ServiceDist::exponential;
      src.scov = 1.0;
    }
  }
  return validate_config(std::move(raw));
}

}  // namespace aoi
