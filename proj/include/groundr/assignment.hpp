#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "groundr/catalog.hpp"
#include "groundr/dependence.hpp"
#include "groundr/layout.hpp"

namespace groundr {

/// Constraint problem behind executability: map each step of an expanded
/// protocol onto a capable device so that every dependence edge connects
/// reachable devices. Device indices refer to Reachability::ids().
class StepProblem {
 public:
  enum class Status { solved, infeasible, budget_exhausted };

  /// `expanded` must already be capability-level (see expand_protocol).
  /// `reach` must outlive the problem.
  StepProblem(const Protocol& expanded, const Layout& l, const Catalog& cat, const Reachability& reach);

  const DependenceGraph& pdg() const { return pdg_; }
  std::size_t size() const { return pdg_.size(); }
  const std::vector<int>& domain(std::size_t step) const { return domains_[step]; }
  const std::vector<std::size_t>& producers(std::size_t step) const { return producers_[step]; }
  const Reachability& reach() const { return *reach_; }

  /// Cheap necessary conditions: an empty domain, or an edge with no
  /// reachable device pair. Returns the first violation in step order.
  std::optional<ExecutabilityFailure> precheck() const;

  /// Exact backtracking with failure memoization. `assignment` holds fixed
  /// devices (or -1) on entry and the completed assignment on success.
  Status solve(std::vector<int>& assignment, std::size_t node_budget) const;

  /// Greedy nearest-capable-device assignment with randomized restarts.
  bool greedy(std::vector<int>& assignment, std::uint64_t seed, std::size_t restarts) const;

 private:
  DependenceGraph pdg_;
  std::vector<std::vector<int>> domains_;
  std::vector<std::vector<std::size_t>> producers_;
  std::vector<std::vector<std::size_t>> live_;  // steps < i with a consumer >= i
  const Reachability* reach_;
};

}  // namespace groundr
