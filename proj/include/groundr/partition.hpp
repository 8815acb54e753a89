#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "groundr/catalog.hpp"
#include "groundr/dependence.hpp"
#include "groundr/layout.hpp"

namespace groundr {

/// Undirected, symmetric, zero-diagonal weighted graph over named nodes.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  double weight(std::size_t i, std::size_t j) const { return w_[i * names_.size() + j]; }
  /// Sets w(i,j) = w(j,i); weights must be finite and >= 0, i != j.
  void set_weight(std::size_t i, std::size_t j, double w);
  /// Sum of weights on edges with endpoints in different parts.
  double cut_weight(const std::vector<std::vector<std::size_t>>& parts) const;
  WeightedGraph induced(const std::vector<std::size_t>& nodes) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> w_;
};

/// w(i,j) = max{m(i,j), m(j,i)}.
WeightedGraph dependency_graph(const DependencyMatrix& m);

struct Cut {
  double weight = 0;
  /// Node-index groups, each sorted, ordered by first element.
  std::vector<std::vector<std::size_t>> parts;
};

/// Minimum-weight bipartition (Stoer-Wagner). Requires >= 2 nodes.
Cut global_min_cut(const WeightedGraph& g);

/// Successive splitting: repeatedly split the component whose minimum cut
/// adds the least weight, until there are k components. Within a factor
/// (2 - 2/k) of the optimal k-cut.
Cut k_min_cut(const WeightedGraph& g, std::size_t k);

struct PartitionNode {
  std::vector<std::size_t> members;  // sorted node indices
  std::vector<PartitionNode> children;
  bool operator==(const PartitionNode&) const = default;
};

/// Hierarchy of k-way splits, at most `depth` levels deep.
struct PartitionTree {
  PartitionNode root;
  std::vector<std::string> names;  // node index -> name

  /// Leaf groups in depth-first order.
  std::vector<std::vector<std::size_t>> leaves() const;
  std::size_t depth() const;
  /// Level at which nodes a and b first land in different groups (1-based),
  /// or 0 when they share a leaf.
  std::size_t split_level(std::size_t a, std::size_t b) const;

  static PartitionTree single(const WeightedGraph& g);
};

/// Depth-l recursion of k_min_cut; components with fewer than k nodes are
/// not split further. Requires k >= 2 and l >= 1.
PartitionTree recursive_partition(const WeightedGraph& g, std::size_t k, std::size_t l);

nlohmann::json partition_to_json(const PartitionTree& t);

struct InstantiateOptions {
  /// Grouped edge i->j inside a leaf when m(i,j) > threshold.
  double grouped_threshold = 0.0;
};

/// One device per leaf member (cheapest capable type, ties by name); grouped
/// edges inside leaves along positive dependency directions; one robot per
/// recursion level serving the cross-group dependency pairs split at that
/// level with associated connections in both directions.
Layout instantiate_layout(const PartitionTree& t, const DependencyMatrix& m, const Catalog& cat,
                          const InstantiateOptions& opt = {});

}  // namespace groundr
