#include "groundr/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace groundr {

WeightedGraph::WeightedGraph(std::vector<std::string> names)
    : names_(std::move(names)), w_(names_.size() * names_.size(), 0.0) {}

void WeightedGraph::set_weight(std::size_t i, std::size_t j, double w) {
  if (i >= size() || j >= size()) throw ConfigError("weighted graph: node index out of range");
  if (i == j) throw ConfigError("weighted graph: diagonal must stay zero");
  if (!(std::isfinite(w) && w >= 0)) throw ConfigError("weighted graph: weights must be finite and >= 0");
  w_[i * size() + j] = w;
  w_[j * size() + i] = w;
}

double WeightedGraph::cut_weight(const std::vector<std::vector<std::size_t>>& parts) const {
  std::vector<std::size_t> label(size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t p = 0; p < parts.size(); ++p)
    for (std::size_t v : parts[p]) label[v] = p;
  double total = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      if (label[i] != label[j]) total += weight(i, j);
  return total;
}

WeightedGraph WeightedGraph::induced(const std::vector<std::size_t>& nodes) const {
  std::vector<std::string> names;
  for (std::size_t v : nodes) names.push_back(names_[v]);
  WeightedGraph g(std::move(names));
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      double w = weight(nodes[a], nodes[b]);
      g.w_[a * nodes.size() + b] = w;
      g.w_[b * nodes.size() + a] = w;
    }
  return g;
}

WeightedGraph dependency_graph(const DependencyMatrix& m) {
  WeightedGraph g(m.op_types);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) g.set_weight(i, j, std::max(m.at(i, j), m.at(j, i)));
  return g;
}

namespace {

void normalize(Cut& c) {
  for (auto& p : c.parts) std::sort(p.begin(), p.end());
  std::sort(c.parts.begin(), c.parts.end());
}

}  // namespace

Cut global_min_cut(const WeightedGraph& g) {
  const std::size_t n = g.size();
  if (n < 2) throw ConfigError("global_min_cut needs at least 2 nodes");
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = g.weight(i, j);
  std::vector<std::vector<std::size_t>> merged(n);
  for (std::size_t i = 0; i < n; ++i) merged[i] = {i};
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_side;
  std::vector<double> key(n);
  std::vector<bool> added(n);
  while (active.size() > 1) {
    // Maximum adjacency ordering; ties go to the lowest index.
    std::fill(added.begin(), added.end(), false);
    for (std::size_t v : active) key[v] = 0;
    std::size_t prev = active.front(), last = active.front();
    for (std::size_t step = 0; step < active.size(); ++step) {
      std::size_t pick = n;
      for (std::size_t v : active)
        if (!added[v] && (pick == n || key[v] > key[pick])) pick = v;
      added[pick] = true;
      prev = last;
      last = pick;
      for (std::size_t v : active)
        if (!added[v]) key[v] += w[pick * n + v];
    }
    const double phase_cut = key[last];
    if (phase_cut < best) {
      best = phase_cut;
      best_side = merged[last];
    }
    for (std::size_t v : active) {
      w[prev * n + v] += w[last * n + v];
      w[v * n + prev] = w[prev * n + v];
    }
    w[prev * n + prev] = 0;
    merged[prev].insert(merged[prev].end(), merged[last].begin(), merged[last].end());
    active.erase(std::find(active.begin(), active.end(), last));
  }

  Cut c;
  c.weight = best;
  std::vector<bool> in(n, false);
  for (std::size_t v : best_side) in[v] = true;
  std::vector<std::size_t> other;
  for (std::size_t v = 0; v < n; ++v)
    if (!in[v]) other.push_back(v);
  c.parts = {best_side, other};
  normalize(c);
  return c;
}

Cut k_min_cut(const WeightedGraph& g, std::size_t k) {
  if (k < 1 || k > g.size())
    throw ConfigError("k_min_cut: k=" + std::to_string(k) + " outside [1, " + std::to_string(g.size()) + "]");
  std::vector<std::size_t> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<std::size_t>> comps{all};
  std::map<std::vector<std::size_t>, Cut> cache;  // component -> its min cut in global indices

  auto split_of = [&](const std::vector<std::size_t>& comp) -> const Cut& {
    auto it = cache.find(comp);
    if (it != cache.end()) return it->second;
    Cut local = global_min_cut(g.induced(comp));
    for (auto& part : local.parts)
      for (auto& v : part) v = comp[v];
    normalize(local);
    return cache.emplace(comp, std::move(local)).first->second;
  };

  while (comps.size() < k) {
    std::size_t best = comps.size();
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (comps[i].size() < 2) continue;
      if (best == comps.size()) {
        best = i;
        continue;
      }
      const double wi = split_of(comps[i]).weight, wb = split_of(comps[best]).weight;
      if (wi < wb || (wi == wb && comps[i] < comps[best])) best = i;
    }
    Cut c = split_of(comps[best]);
    comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(best));
    for (auto& part : c.parts) comps.push_back(std::move(part));
    std::sort(comps.begin(), comps.end());
  }
  Cut out;
  out.parts = std::move(comps);
  out.weight = g.cut_weight(out.parts);
  return out;
}

// ---- recursion --------------------------------------------------------------

namespace {

void collect_leaves(const PartitionNode& n, std::vector<std::vector<std::size_t>>& out) {
  if (n.children.empty()) {
    out.push_back(n.members);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

std::size_t node_depth(const PartitionNode& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, 1 + node_depth(c));
  return d;
}

bool contains(const PartitionNode& n, std::size_t v) {
  return std::binary_search(n.members.begin(), n.members.end(), v);
}

void split(const WeightedGraph& g, PartitionNode& node, std::size_t k, std::size_t levels_left) {
  if (levels_left == 0 || node.members.size() < k) return;
  Cut c = k_min_cut(g.induced(node.members), k);
  for (const auto& part : c.parts) {
    PartitionNode child;
    for (std::size_t v : part) child.members.push_back(node.members[v]);
    std::sort(child.members.begin(), child.members.end());
    split(g, child, k, levels_left - 1);
    node.children.push_back(std::move(child));
  }
}

nlohmann::json node_to_json(const PartitionNode& n, const std::vector<std::string>& names) {
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t v : n.members) members.push_back(names[v]);
  nlohmann::json j = {{"members", members}};
  if (!n.children.empty()) {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : n.children) kids.push_back(node_to_json(c, names));
    j["children"] = std::move(kids);
  }
  return j;
}

}  // namespace

std::vector<std::vector<std::size_t>> PartitionTree::leaves() const {
  std::vector<std::vector<std::size_t>> out;
  collect_leaves(root, out);
  return out;
}

std::size_t PartitionTree::depth() const { return node_depth(root); }

std::size_t PartitionTree::split_level(std::size_t a, std::size_t b) const {
  const PartitionNode* n = &root;
  std::size_t level = 0;
  while (!n->children.empty()) {
    const PartitionNode* next = nullptr;
    for (const auto& c : n->children)
      if (contains(c, a)) next = &c;
    if (!next) return 0;
    ++level;
    if (!contains(*next, b)) return level;
    n = next;
  }
  return 0;
}

PartitionTree PartitionTree::single(const WeightedGraph& g) {
  PartitionTree t;
  t.names = g.names();
  t.root.members.resize(g.size());
  std::iota(t.root.members.begin(), t.root.members.end(), 0);
  return t;
}

PartitionTree recursive_partition(const WeightedGraph& g, std::size_t k, std::size_t l) {
  if (k < 2) throw ConfigError("recursive_partition: k must be >= 2");
  if (l < 1) throw ConfigError("recursive_partition: l must be >= 1");
  PartitionTree t = PartitionTree::single(g);
  split(g, t.root, k, l);
  return t;
}

nlohmann::json partition_to_json(const PartitionTree& t) { return node_to_json(t.root, t.names); }

// ---- instantiation ----------------------------------------------------------

Layout instantiate_layout(const PartitionTree& t, const DependencyMatrix& m, const Catalog& cat,
                          const InstantiateOptions& opt) {
  if (t.names != m.op_types) throw ConfigError("instantiate_layout: partition nodes differ from matrix types");
  Layout l;
  const std::size_t n = m.size();
  std::vector<std::string> device_of(n);
  auto leaves = t.leaves();
  for (const auto& leaf : leaves)
    for (std::size_t v : leaf) {
      const DeviceType* d = cat.cheapest_capable(m.op_types[v]);
      if (!d) throw InfeasibleError("no device type offers capability '" + m.op_types[v] + "'");
      device_of[v] = l.fresh_id(d->name);
      l.add_device(device_of[v], d->name);
    }

  for (const auto& leaf : leaves)
    for (std::size_t i : leaf)
      for (std::size_t j : leaf)
        if (i != j && m.at(i, j) > opt.grouped_threshold)
          l.add_connection({device_of[i], device_of[j], Rho::grouped, ""});

  std::map<std::size_t, std::string> robot_of_level;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::max(m.at(i, j), m.at(j, i)) <= opt.grouped_threshold) continue;
      std::size_t level = t.split_level(i, j);
      if (level == 0) continue;
      auto it = robot_of_level.find(level);
      if (it == robot_of_level.end()) {
        const RobotType* r = cat.cheapest_robot();
        if (!r) throw InfeasibleError("cross-group dependencies need a robot but the catalog has none");
        std::string id = l.fresh_id(r->name);
        l.add_robot(id, r->name);
        it = robot_of_level.emplace(level, id).first;
      }
      l.add_associated_link(device_of[i], device_of[j], it->second);
    }
  return l;
}

}  // namespace groundr
