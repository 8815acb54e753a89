#include "groundr/layout.hpp"

#include <deque>
#include <fstream>
#include <set>
#include <sstream>

namespace groundr {

std::string to_string(Rho rho) {
  switch (rho) {
    case Rho::grouped: return "grouped";
    case Rho::associated: return "associated";
    case Rho::unconnected: return "unconnected";
  }
  return "?";
}

Rho rho_from_string(const std::string& s) {
  if (s == "grouped") return Rho::grouped;
  if (s == "associated") return Rho::associated;
  if (s == "unconnected") return Rho::unconnected;
  throw LayoutError("unknown connection property '" + s + "'");
}

// ---- Layout ---------------------------------------------------------------

std::vector<Connection> Layout::connections() const {
  std::vector<Connection> out;
  out.reserve(connections_.size());
  for (const auto& [k, c] : connections_) out.push_back(c);
  return out;
}

bool Layout::has_connection(const std::string& from, const std::string& to, Rho rho) const {
  return connections_.count({from, to, rho}) != 0;
}

const Connection* Layout::find_connection(const std::string& from, const std::string& to, Rho rho) const {
  auto it = connections_.find({from, to, rho});
  return it == connections_.end() ? nullptr : &it->second;
}

void Layout::add_device(const std::string& id, const std::string& type) {
  if (id.empty() || type.empty()) throw LayoutError("device id and type must be nonempty");
  if (devices_.count(id) || robots_.count(id)) throw LayoutError("duplicate instance id '" + id + "'");
  devices_.emplace(id, type);
}

void Layout::remove_device(const std::string& id) {
  if (!devices_.count(id)) throw LayoutError("no device '" + id + "'");
  for (const auto& [k, c] : connections_)
    if (c.from == id || c.to == id)
      throw LayoutError("device '" + id + "' still has connections; delete them first");
  devices_.erase(id);
}

void Layout::set_device_type(const std::string& id, const std::string& type) {
  auto it = devices_.find(id);
  if (it == devices_.end()) throw LayoutError("no device '" + id + "'");
  if (type.empty()) throw LayoutError("device type must be nonempty");
  it->second = type;
}

void Layout::add_robot(const std::string& id, const std::string& type) {
  if (id.empty() || type.empty()) throw LayoutError("robot id and type must be nonempty");
  if (devices_.count(id) || robots_.count(id)) throw LayoutError("duplicate instance id '" + id + "'");
  robots_.emplace(id, type);
}

void Layout::remove_robot(const std::string& id) {
  if (!robots_.count(id)) throw LayoutError("no robot '" + id + "'");
  for (const auto& [k, c] : connections_)
    if (c.robot == id) throw LayoutError("robot '" + id + "' still serves connections; delete them first");
  robots_.erase(id);
}

void Layout::set_robot_type(const std::string& id, const std::string& type) {
  auto it = robots_.find(id);
  if (it == robots_.end()) throw LayoutError("no robot '" + id + "'");
  if (type.empty()) throw LayoutError("robot type must be nonempty");
  it->second = type;
}

void Layout::add_connection(const Connection& c) {
  if (!devices_.count(c.from)) throw LayoutError("connection source '" + c.from + "' is not a device");
  if (!devices_.count(c.to)) throw LayoutError("connection target '" + c.to + "' is not a device");
  if (c.from == c.to) throw LayoutError("self-connection on '" + c.from + "'");
  if (c.rho == Rho::unconnected) throw LayoutError("unconnected pairs are represented by edge absence");
  if (c.rho == Rho::associated) {
    if (!robots_.count(c.robot)) throw LayoutError("associated connection needs an existing robot, got '" + c.robot + "'");
  } else if (!c.robot.empty()) {
    throw LayoutError("grouped connection cannot name a robot");
  }
  auto [it, fresh] = connections_.emplace(Key{c.from, c.to, c.rho}, c);
  if (!fresh)
    throw LayoutError("duplicate connection " + c.from + " -> " + c.to + " (" + to_string(c.rho) + ")");
}

void Layout::remove_connection(const std::string& from, const std::string& to, Rho rho) {
  if (!connections_.erase({from, to, rho}))
    throw LayoutError("no connection " + from + " -> " + to + " (" + to_string(rho) + ")");
}

void Layout::add_associated_link(const std::string& a, const std::string& b, const std::string& robot) {
  if (!has_connection(a, b, Rho::associated)) add_connection({a, b, Rho::associated, robot});
  if (!has_connection(b, a, Rho::associated)) add_connection({b, a, Rho::associated, robot});
}

std::string Layout::fresh_id(const std::string& prefix) const {
  for (std::size_t n = 1;; ++n) {
    std::string id = prefix + "." + std::to_string(n);
    if (!devices_.count(id) && !robots_.count(id)) return id;
  }
}

std::size_t Layout::grouped_count() const {
  std::size_t n = 0;
  for (const auto& [k, c] : connections_) n += c.rho == Rho::grouped;
  return n;
}

// ---- edits ----------------------------------------------------------------

EditOp EditOp::insert_device(std::string id, std::string type) {
  EditOp e;
  e.kind = EditKind::insertion;
  e.target = EditTarget::device;
  e.id = std::move(id);
  e.type = std::move(type);
  return e;
}

EditOp EditOp::delete_device(std::string id, std::string type) {
  EditOp e = insert_device(std::move(id), std::move(type));
  e.kind = EditKind::deletion;
  return e;
}

EditOp EditOp::substitute_device(std::string id, std::string previous_type, std::string type) {
  EditOp e = insert_device(std::move(id), std::move(type));
  e.kind = EditKind::substitution;
  e.previous_type = std::move(previous_type);
  return e;
}

EditOp EditOp::insert_robot(std::string id, std::string type) {
  EditOp e = insert_device(std::move(id), std::move(type));
  e.target = EditTarget::robot;
  return e;
}

EditOp EditOp::delete_robot(std::string id, std::string type) {
  EditOp e = delete_device(std::move(id), std::move(type));
  e.target = EditTarget::robot;
  return e;
}

EditOp EditOp::substitute_robot(std::string id, std::string previous_type, std::string type) {
  EditOp e = substitute_device(std::move(id), std::move(previous_type), std::move(type));
  e.target = EditTarget::robot;
  return e;
}

EditOp EditOp::insert_connection(Connection c) {
  EditOp e;
  e.kind = EditKind::insertion;
  e.target = EditTarget::connection;
  e.connection = std::move(c);
  return e;
}

EditOp EditOp::delete_connection(Connection c) {
  EditOp e = insert_connection(std::move(c));
  e.kind = EditKind::deletion;
  return e;
}

EditOp EditOp::substitute_connection(Connection previous, Connection c) {
  EditOp e = insert_connection(std::move(c));
  e.kind = EditKind::substitution;
  e.previous = std::move(previous);
  return e;
}

Layout apply_edit(const Layout& l, const EditOp& e) {
  Layout out = l;
  auto require_type = [](const std::map<std::string, std::string>& m, const std::string& id,
                         const std::string& type) {
    auto it = m.find(id);
    if (it == m.end()) throw LayoutError("no instance '" + id + "'");
    if (it->second != type)
      throw LayoutError("instance '" + id + "' has type '" + it->second + "', edit expects '" + type + "'");
  };
  switch (e.target) {
    case EditTarget::device:
      switch (e.kind) {
        case EditKind::insertion: out.add_device(e.id, e.type); break;
        case EditKind::deletion:
          require_type(l.devices(), e.id, e.type);
          out.remove_device(e.id);
          break;
        case EditKind::substitution:
          require_type(l.devices(), e.id, e.previous_type);
          out.set_device_type(e.id, e.type);
          break;
      }
      break;
    case EditTarget::robot:
      switch (e.kind) {
        case EditKind::insertion: out.add_robot(e.id, e.type); break;
        case EditKind::deletion:
          require_type(l.robots(), e.id, e.type);
          out.remove_robot(e.id);
          break;
        case EditKind::substitution:
          require_type(l.robots(), e.id, e.previous_type);
          out.set_robot_type(e.id, e.type);
          break;
      }
      break;
    case EditTarget::connection: {
      auto require_conn = [&](const Connection& c) {
        const Connection* found = l.find_connection(c.from, c.to, c.rho);
        if (!found || !(*found == c))
          throw LayoutError("no connection " + c.from + " -> " + c.to + " (" + to_string(c.rho) + ")");
      };
      switch (e.kind) {
        case EditKind::insertion: out.add_connection(e.connection); break;
        case EditKind::deletion:
          require_conn(e.connection);
          out.remove_connection(e.connection.from, e.connection.to, e.connection.rho);
          break;
        case EditKind::substitution:
          require_conn(e.previous);
          if (e.previous.from != e.connection.from || e.previous.to != e.connection.to)
            throw LayoutError("connection substitution must keep its endpoints");
          out.remove_connection(e.previous.from, e.previous.to, e.previous.rho);
          out.add_connection(e.connection);
          break;
      }
      break;
    }
  }
  return out;
}

EditOp inverse(const EditOp& e) {
  EditOp inv = e;
  switch (e.kind) {
    case EditKind::insertion: inv.kind = EditKind::deletion; break;
    case EditKind::deletion: inv.kind = EditKind::insertion; break;
    case EditKind::substitution:
      std::swap(inv.type, inv.previous_type);
      std::swap(inv.connection, inv.previous);
      break;
  }
  return inv;
}

std::string describe(const EditOp& e) {
  static const char* kinds[] = {"insert", "delete", "substitute"};
  std::ostringstream ss;
  ss << kinds[static_cast<int>(e.kind)] << ' ';
  switch (e.target) {
    case EditTarget::device: ss << "device " << e.id << " (" << e.type << ")"; break;
    case EditTarget::robot: ss << "robot " << e.id << " (" << e.type << ")"; break;
    case EditTarget::connection:
      ss << "connection " << e.connection.from << " -> " << e.connection.to << " ("
         << to_string(e.connection.rho);
      if (!e.connection.robot.empty()) ss << " via " << e.connection.robot;
      ss << ")";
      break;
  }
  return ss.str();
}

// ---- derived quantities ---------------------------------------------------

double dof(const std::string& robot_id, const Layout& l, const Catalog& cat) {
  auto it = l.robots().find(robot_id);
  if (it == l.robots().end()) throw LayoutError("unknown robot '" + robot_id + "'");
  const RobotType* type = cat.robot(it->second);
  if (!type) throw LayoutError("robot type '" + it->second + "' is not in the catalog");
  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::string> touched;
  for (const auto& c : l.connections()) {
    if (c.rho != Rho::associated || c.robot != robot_id) continue;
    pairs.insert(std::minmax(c.from, c.to));
    touched.insert(c.from);
    touched.insert(c.to);
  }
  return static_cast<double>(pairs.size()) + static_cast<double>(touched.size()) + type->gamma;
}

double system_complexity(const Layout& l, const Catalog& cat) {
  double total = static_cast<double>(l.devices().size()) + static_cast<double>(l.grouped_count());
  for (const auto& [id, type] : l.robots()) total += dof(id, l, cat);
  return total;
}

double cost(const Layout& l, const Catalog& cat) {
  double total = 0;
  for (const auto& [id, type] : l.devices()) {
    const DeviceType* d = cat.device(type);
    if (!d) throw LayoutError("device type '" + type + "' is not in the catalog");
    total += d->price;
  }
  for (const auto& [id, type] : l.robots()) {
    const RobotType* r = cat.robot(type);
    if (!r) throw LayoutError("robot type '" + type + "' is not in the catalog");
    total += r->price;
  }
  return total + static_cast<double>(l.grouped_count()) * cat.pipeline_unit_price();
}

void check_types(const Layout& l, const Catalog& cat) {
  for (const auto& [id, type] : l.devices())
    if (!cat.device(type)) throw LayoutError("device '" + id + "' has type '" + type + "' missing from the catalog");
  for (const auto& [id, type] : l.robots())
    if (!cat.robot(type)) throw LayoutError("robot '" + id + "' has type '" + type + "' missing from the catalog");
}

Reachability::Reachability(const Layout& l) {
  for (const auto& [id, type] : l.devices()) {
    index_.emplace(id, static_cast<int>(ids_.size()));
    ids_.push_back(id);
  }
  const std::size_t n = ids_.size();
  std::vector<std::vector<int>> all(n), grouped(n);
  for (const auto& c : l.connections()) {
    int a = index_.at(c.from), b = index_.at(c.to);
    all[static_cast<std::size_t>(a)].push_back(b);
    if (c.rho == Rho::grouped) grouped[static_cast<std::size_t>(a)].push_back(b);
  }
  auto closure = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<bool> r(n * n, false);
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s) {
      r[s * n + s] = true;
      stack.assign(1, static_cast<int>(s));
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[static_cast<std::size_t>(u)])
          if (!r[s * n + static_cast<std::size_t>(v)]) {
            r[s * n + static_cast<std::size_t>(v)] = true;
            stack.push_back(v);
          }
      }
    }
    return r;
  };
  reach_ = closure(all);
  pipe_ = closure(grouped);
}

int Reachability::index(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

// ---- io -------------------------------------------------------------------

nlohmann::json layout_to_json(const Layout& l) {
  nlohmann::json devices = nlohmann::json::array(), robots = nlohmann::json::array(),
                 conns = nlohmann::json::array();
  for (const auto& [id, type] : l.devices()) devices.push_back({{"id", id}, {"type", type}});
  for (const auto& [id, type] : l.robots()) robots.push_back({{"id", id}, {"type", type}});
  for (const auto& c : l.connections()) {
    nlohmann::json j = {{"from", c.from}, {"to", c.to}, {"rho", to_string(c.rho)}};
    if (c.rho == Rho::associated) j["robot"] = c.robot;
    conns.push_back(std::move(j));
  }
  return {{"devices", devices}, {"robots", robots}, {"connections", conns}};
}

Layout layout_from_json(const nlohmann::json& doc) {
  auto str = [](const nlohmann::json& o, const char* key, const std::string& path) {
    if (!o.is_object() || !o.contains(key) || !o[key].is_string())
      throw LayoutError("layout " + path + "." + key + ": expected string");
    return o[key].get<std::string>();
  };
  if (!doc.is_object()) throw LayoutError("layout: expected object");
  Layout l;
  auto arr = [&](const char* key) -> const nlohmann::json& {
    static const nlohmann::json empty = nlohmann::json::array();
    if (!doc.contains(key)) return empty;
    if (!doc[key].is_array()) throw LayoutError(std::string("layout ") + key + ": expected array");
    return doc[key];
  };
  std::size_t i = 0;
  for (const auto& d : arr("devices")) {
    const std::string path = "devices[" + std::to_string(i++) + "]";
    l.add_device(str(d, "id", path), str(d, "type", path));
  }
  i = 0;
  for (const auto& r : arr("robots")) {
    const std::string path = "robots[" + std::to_string(i++) + "]";
    l.add_robot(str(r, "id", path), str(r, "type", path));
  }
  i = 0;
  for (const auto& c : arr("connections")) {
    const std::string path = "connections[" + std::to_string(i++) + "]";
    Connection conn{str(c, "from", path), str(c, "to", path), rho_from_string(str(c, "rho", path)), ""};
    if (c.contains("robot")) conn.robot = str(c, "robot", path);
    l.add_connection(conn);
  }
  return l;
}

Layout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open layout file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("layout " + path.string() + ": " + e.what());
  }
  return layout_from_json(doc);
}

std::string export_dot(const Layout& l) {
  std::ostringstream out;
  out << "digraph L {\n";
  for (const auto& [id, type] : l.devices())
    out << "  \"" << id << "\" [shape=box, label=\"" << id << "\\n" << type << "\"];\n";
  for (const auto& c : l.connections()) {
    out << "  \"" << c.from << "\" -> \"" << c.to << "\"";
    if (c.rho == Rho::associated)
      out << " [style=dashed, label=\"" << c.robot << "\"]";
    else
      out << " [style=solid]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace groundr
