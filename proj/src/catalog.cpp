#include "groundr/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace groundr {

namespace {

ConfigError schema_error(const std::string& path, const std::string& msg) {
  return ConfigError("catalog " + path + ": " + msg);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0; }

}  // namespace

bool DeviceType::can(std::string_view capability) const {
  return std::binary_search(capabilities.begin(), capabilities.end(), capability);
}

Catalog::Catalog(std::vector<DeviceType> devices, std::vector<RobotType> robots,
                 std::map<std::string, std::vector<std::string>> expansions,
                 double pipeline_unit_price, double default_duration_s)
    : devices_(std::move(devices)),
      robots_(std::move(robots)),
      expansions_(std::move(expansions)),
      pipeline_unit_price_(pipeline_unit_price),
      default_duration_s_(default_duration_s) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    auto& d = devices_[i];
    const std::string path = "devices[" + std::to_string(i) + "]";
    if (d.name.empty()) throw schema_error(path + ".name", "must be nonempty");
    if (!names.insert(d.name).second) throw schema_error(path + ".name", "duplicate type name '" + d.name + "'");
    std::sort(d.capabilities.begin(), d.capabilities.end());
    if (std::adjacent_find(d.capabilities.begin(), d.capabilities.end()) != d.capabilities.end())
      throw schema_error(path + ".capabilities", "duplicate capability");
    if (!finite_nonneg(d.price)) throw schema_error(path + ".price", "must be >= 0");
    if (d.capacity < 1) throw schema_error(path + ".capacity", "must be >= 1");
    for (const auto& [cap, dur] : d.durations_s) {
      if (!d.can(cap))
        throw schema_error(path + ".durations." + cap, "key is not one of the capabilities");
      if (!(std::isfinite(dur) && dur > 0))
        throw schema_error(path + ".durations." + cap, "must be > 0");
    }
  }
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    const auto& r = robots_[i];
    const std::string path = "robots[" + std::to_string(i) + "]";
    if (r.name.empty()) throw schema_error(path + ".name", "must be nonempty");
    if (!names.insert(r.name).second) throw schema_error(path + ".name", "duplicate type name '" + r.name + "'");
    if (!finite_nonneg(r.price)) throw schema_error(path + ".price", "must be >= 0");
    if (!finite_nonneg(r.gamma)) throw schema_error(path + ".gamma", "must be >= 0");
    if (!finite_nonneg(r.transport_s)) throw schema_error(path + ".transport_s", "must be >= 0");
  }
  for (const auto& [op, caps] : expansions_) {
    if (caps.empty()) throw schema_error("expansions." + op, "rule must be nonempty");
    for (const auto& c : caps)
      if (c.empty()) throw schema_error("expansions." + op, "empty capability name");
  }
  if (!finite_nonneg(pipeline_unit_price_)) throw schema_error("pipeline_unit_price", "must be >= 0");
  if (!(std::isfinite(default_duration_s_) && default_duration_s_ > 0))
    throw schema_error("default_duration_s", "must be > 0");
}

const DeviceType* Catalog::device(std::string_view name) const {
  for (const auto& d : devices_)
    if (d.name == name) return &d;
  return nullptr;
}

const RobotType* Catalog::robot(std::string_view name) const {
  for (const auto& r : robots_)
    if (r.name == name) return &r;
  return nullptr;
}

std::vector<const DeviceType*> Catalog::capable_devices(std::string_view capability) const {
  std::vector<const DeviceType*> out;
  for (const auto& d : devices_)
    if (d.can(capability)) out.push_back(&d);
  std::sort(out.begin(), out.end(), [](const DeviceType* a, const DeviceType* b) {
    return std::tie(a->price, a->name) < std::tie(b->price, b->name);
  });
  return out;
}

const DeviceType* Catalog::cheapest_capable(std::string_view capability) const {
  auto all = capable_devices(capability);
  return all.empty() ? nullptr : all.front();
}

const RobotType* Catalog::cheapest_robot() const {
  const RobotType* best = nullptr;
  for (const auto& r : robots_)
    if (!best || std::tie(r.price, r.name) < std::tie(best->price, best->name)) best = &r;
  return best;
}

std::vector<std::string> Catalog::expand_operation(std::string_view op_type) const {
  auto it = expansions_.find(std::string(op_type));
  if (it == expansions_.end()) return {std::string(op_type)};
  return it->second;
}

double Catalog::duration_for(const DeviceType& d, std::string_view capability) const {
  auto it = d.durations_s.find(std::string(capability));
  return it == d.durations_s.end() ? default_duration_s_ : it->second;
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw schema_error(path + "." + key, "missing");
  return obj.at(key);
}

double number(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) throw schema_error(path, "expected number");
  return v.get<double>();
}

std::string string(const nlohmann::json& v, const std::string& path) {
  if (!v.is_string()) throw schema_error(path, "expected string");
  return v.get<std::string>();
}

std::vector<std::string> strings(const nlohmann::json& v, const std::string& path) {
  if (!v.is_array()) throw schema_error(path, "expected array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(string(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

Catalog catalog_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw schema_error("$", "expected object");
  std::vector<DeviceType> devices;
  std::vector<RobotType> robots;
  std::map<std::string, std::vector<std::string>> expansions;

  if (doc.contains("devices")) {
    const auto& arr = doc["devices"];
    if (!arr.is_array()) throw schema_error("devices", "expected array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "devices[" + std::to_string(i) + "]";
      const auto& d = arr[i];
      if (!d.is_object()) throw schema_error(path, "expected object");
      DeviceType t;
      t.name = string(require(d, "name", path), path + ".name");
      t.capabilities = strings(require(d, "capabilities", path), path + ".capabilities");
      t.price = number(require(d, "price", path), path + ".price");
      if (d.contains("capacity")) {
        if (!d["capacity"].is_number_integer()) throw schema_error(path + ".capacity", "expected integer");
        t.capacity = d["capacity"].get<int>();
      }
      if (d.contains("durations")) {
        if (!d["durations"].is_object()) throw schema_error(path + ".durations", "expected object");
        for (const auto& [k, v] : d["durations"].items())
          t.durations_s[k] = number(v, path + ".durations." + k);
      }
      devices.push_back(std::move(t));
    }
  }
  if (doc.contains("robots")) {
    const auto& arr = doc["robots"];
    if (!arr.is_array()) throw schema_error("robots", "expected array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "robots[" + std::to_string(i) + "]";
      const auto& r = arr[i];
      if (!r.is_object()) throw schema_error(path, "expected object");
      RobotType t;
      t.name = string(require(r, "name", path), path + ".name");
      t.price = number(require(r, "price", path), path + ".price");
      t.gamma = r.contains("gamma") ? number(r["gamma"], path + ".gamma") : 0.0;
      t.transport_s = r.contains("transport_s") ? number(r["transport_s"], path + ".transport_s") : 0.0;
      robots.push_back(std::move(t));
    }
  }
  if (doc.contains("expansions")) {
    if (!doc["expansions"].is_object()) throw schema_error("expansions", "expected object");
    for (const auto& [k, v] : doc["expansions"].items()) expansions[k] = strings(v, "expansions." + k);
  }
  double pipeline = doc.contains("pipeline_unit_price") ? number(doc["pipeline_unit_price"], "pipeline_unit_price") : 0.0;
  double dflt = doc.contains("default_duration_s") ? number(doc["default_duration_s"], "default_duration_s") : 60.0;
  return Catalog(std::move(devices), std::move(robots), std::move(expansions), pipeline, dflt);
}

nlohmann::json catalog_to_json(const Catalog& cat) {
  nlohmann::json devices = nlohmann::json::array();
  for (const auto& d : cat.devices())
    devices.push_back({{"name", d.name},
                       {"capabilities", d.capabilities},
                       {"price", d.price},
                       {"capacity", d.capacity},
                       {"durations", d.durations_s}});
  nlohmann::json robots = nlohmann::json::array();
  for (const auto& r : cat.robots())
    robots.push_back({{"name", r.name}, {"price", r.price}, {"gamma", r.gamma}, {"transport_s", r.transport_s}});
  return {{"devices", devices},
          {"robots", robots},
          {"expansions", cat.expansions()},
          {"pipeline_unit_price", cat.pipeline_unit_price()},
          {"default_duration_s", cat.default_duration_s()}};
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open catalog file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("catalog " + path.string() + ": " + e.what());
  }
  return catalog_from_json(doc);
}

}  // namespace groundr
