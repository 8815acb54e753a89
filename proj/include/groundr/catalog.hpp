#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "groundr/error.hpp"

namespace groundr {

struct DeviceType {
  std::string name;
  std::vector<std::string> capabilities;  // sorted, unique
  double price = 0;
  int capacity = 1;                        // max concurrently active operations
  std::map<std::string, double> durations_s;

  bool can(std::string_view capability) const;
  bool operator==(const DeviceType&) const = default;
};

struct RobotType {
  std::string name;
  double price = 0;
  double gamma = 0;        // complexity coefficient used by DoF
  double transport_s = 0;  // seconds per transfer hop
  bool operator==(const RobotType&) const = default;
};

/// Grounding vocabulary: what devices and robots exist, what they cost, how
/// long operations take, and how an operation type breaks into capability
/// steps. Immutable once constructed.
class Catalog {
 public:
  Catalog() = default;
  /// Validates every invariant; throws ConfigError naming the offending field.
  Catalog(std::vector<DeviceType> devices, std::vector<RobotType> robots,
          std::map<std::string, std::vector<std::string>> expansions, double pipeline_unit_price,
          double default_duration_s = 60.0);

  const std::vector<DeviceType>& devices() const { return devices_; }
  const std::vector<RobotType>& robots() const { return robots_; }
  const std::map<std::string, std::vector<std::string>>& expansions() const { return expansions_; }
  double pipeline_unit_price() const { return pipeline_unit_price_; }
  double default_duration_s() const { return default_duration_s_; }

  const DeviceType* device(std::string_view name) const;
  const RobotType* robot(std::string_view name) const;

  /// Device types offering `capability`, ordered by (price, name).
  std::vector<const DeviceType*> capable_devices(std::string_view capability) const;
  /// Cheapest capable type (ties by name), or nullptr.
  const DeviceType* cheapest_capable(std::string_view capability) const;
  const RobotType* cheapest_robot() const;

  /// Capability steps an operation type is executed as. Identity when no
  /// rule exists.
  std::vector<std::string> expand_operation(std::string_view op_type) const;

  /// Seconds a device of type `d` spends on one `capability` step.
  double duration_for(const DeviceType& d, std::string_view capability) const;

  bool operator==(const Catalog&) const = default;

 private:
  std::vector<DeviceType> devices_;
  std::vector<RobotType> robots_;
  std::map<std::string, std::vector<std::string>> expansions_;
  double pipeline_unit_price_ = 0;
  double default_duration_s_ = 60.0;
};

/// Schema: {devices:[{name,capabilities,price,capacity,durations}],
///          robots:[{name,price,gamma,transport_s}], expansions:{op:[caps]},
///          pipeline_unit_price, default_duration_s?}
Catalog catalog_from_json(const nlohmann::json& doc);
nlohmann::json catalog_to_json(const Catalog& cat);
Catalog load_catalog(const std::filesystem::path& path);

}  // namespace groundr
