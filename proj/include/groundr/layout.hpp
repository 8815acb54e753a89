#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "groundr/catalog.hpp"
#include "groundr/error.hpp"

namespace groundr {

/// Connection property. `unconnected` exists for completeness of the
/// property set; a Layout never stores it (absence of an edge means it).
enum class Rho { grouped, associated, unconnected };

std::string to_string(Rho rho);
Rho rho_from_string(const std::string& s);

struct Connection {
  std::string from;
  std::string to;
  Rho rho = Rho::grouped;
  std::string robot;  // set iff rho == associated

  bool operator==(const Connection&) const = default;
};

class LayoutError : public Error {
 public:
  using Error::Error;
};

/// Directed property graph of device instances, robot instances and
/// connections. Value type: edits return new layouts.
class Layout {
 public:
  Layout() = default;

  /// Instance id -> type name, ordered by id.
  const std::map<std::string, std::string>& devices() const { return devices_; }
  const std::map<std::string, std::string>& robots() const { return robots_; }
  /// Connections ordered by (from, to, rho).
  std::vector<Connection> connections() const;
  std::size_t connection_count() const { return connections_.size(); }

  bool has_device(const std::string& id) const { return devices_.count(id) != 0; }
  bool has_robot(const std::string& id) const { return robots_.count(id) != 0; }
  bool has_connection(const std::string& from, const std::string& to, Rho rho) const;
  const Connection* find_connection(const std::string& from, const std::string& to, Rho rho) const;

  // Mutators used by builders; each enforces the layout invariants and throws
  // LayoutError on violation.
  void add_device(const std::string& id, const std::string& type);
  void remove_device(const std::string& id);
  void set_device_type(const std::string& id, const std::string& type);
  void add_robot(const std::string& id, const std::string& type);
  void remove_robot(const std::string& id);
  void set_robot_type(const std::string& id, const std::string& type);
  void add_connection(const Connection& c);
  void remove_connection(const std::string& from, const std::string& to, Rho rho);
  /// Adds the associated edge in both directions, skipping directions already present.
  void add_associated_link(const std::string& a, const std::string& b, const std::string& robot);

  /// Smallest unused id of the form `<prefix>.<n>`, n >= 1.
  std::string fresh_id(const std::string& prefix) const;

  std::size_t grouped_count() const;

  bool operator==(const Layout&) const = default;

 private:
  using Key = std::tuple<std::string, std::string, Rho>;
  std::map<std::string, std::string> devices_;
  std::map<std::string, std::string> robots_;
  std::map<Key, Connection> connections_;
};

// ---- edit operators -------------------------------------------------------

enum class EditKind { insertion, deletion, substitution };
enum class EditTarget { device, robot, connection };

/// One atomic layout modification. Every field needed to invert the edit is
/// carried in the payload (e.g. a device deletion records the deleted type).
struct EditOp {
  EditKind kind = EditKind::insertion;
  EditTarget target = EditTarget::device;
  std::string id;             // device/robot instance id
  std::string type;           // inserted/deleted type, or new type for substitution
  std::string previous_type;  // substitution only
  Connection connection;      // connection target; new value for substitution
  Connection previous;        // connection substitution only

  static EditOp insert_device(std::string id, std::string type);
  static EditOp delete_device(std::string id, std::string type);
  static EditOp substitute_device(std::string id, std::string previous_type, std::string type);
  static EditOp insert_robot(std::string id, std::string type);
  static EditOp delete_robot(std::string id, std::string type);
  static EditOp substitute_robot(std::string id, std::string previous_type, std::string type);
  static EditOp insert_connection(Connection c);
  static EditOp delete_connection(Connection c);
  static EditOp substitute_connection(Connection previous, Connection c);

  bool operator==(const EditOp&) const = default;
};

/// Returns a new layout differing from `l` exactly by `e`. Throws LayoutError
/// when the edit does not apply (missing target, duplicate insertion, device
/// or robot still referenced by connections, payload mismatch).
Layout apply_edit(const Layout& l, const EditOp& e);
EditOp inverse(const EditOp& e);
std::string describe(const EditOp& e);

// ---- derived quantities ---------------------------------------------------

/// DoF(r) = c(r) + n(r) + gamma(r): associated device pairs served by the
/// robot, distinct devices it touches, and the robot type's coefficient.
double dof(const std::string& robot_id, const Layout& l, const Catalog& cat);

/// |devices| + |grouped connections| + sum of robot DoF.
double system_complexity(const Layout& l, const Catalog& cat);

/// Device prices + robot prices + grouped connections * pipeline_unit_price.
double cost(const Layout& l, const Catalog& cat);

/// Reachability between device instances over stored connection directions.
class Reachability {
 public:
  explicit Reachability(const Layout& l);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  /// Index of a device id, or -1.
  int index(const std::string& id) const;
  /// True when `to` can be reached from `from` (always for from == to).
  bool reachable(int from, int to) const { return reach_[static_cast<std::size_t>(from) * ids_.size() + static_cast<std::size_t>(to)]; }
  /// Same, restricted to grouped connections only.
  bool piped(int from, int to) const { return pipe_[static_cast<std::size_t>(from) * ids_.size() + static_cast<std::size_t>(to)]; }

 private:
  std::vector<std::string> ids_;
  std::map<std::string, int> index_;
  std::vector<bool> reach_;
  std::vector<bool> pipe_;
};

// ---- io -------------------------------------------------------------------

/// {devices:[{id,type}], robots:[{id,type}], connections:[{from,to,rho,robot?}]}
nlohmann::json layout_to_json(const Layout& l);
Layout layout_from_json(const nlohmann::json& doc);
Layout load_layout(const std::filesystem::path& path);

/// Graphviz digraph; grouped edges solid, associated edges dashed and
/// labeled with the robot id.
std::string export_dot(const Layout& l);

/// Throws LayoutError if any device or robot type is missing from `cat`.
void check_types(const Layout& l, const Catalog& cat);

}  // namespace groundr
