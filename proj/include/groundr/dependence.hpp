#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "groundr/catalog.hpp"
#include "groundr/dsl.hpp"
#include "groundr/layout.hpp"

namespace groundr {

struct DependenceEdge {
  std::size_t producer = 0;  // operation index
  std::size_t consumer = 0;
  std::string resource;
  bool operator==(const DependenceEdge&) const = default;
};

/// Program dependence graph of one straight-line protocol. Edges always
/// point forward in program order.
struct DependenceGraph {
  std::string protocol;
  std::vector<std::string> op_ids;
  std::vector<std::string> op_types;
  std::vector<DependenceEdge> edges;  // ordered by (consumer, precondition order)

  std::size_t size() const { return op_ids.size(); }
  /// Distinct producers of each operation, ascending.
  std::vector<std::vector<std::size_t>> producers() const;
  /// Distinct consumers of each operation, ascending.
  std::vector<std::vector<std::size_t>> consumers() const;
  bool is_acyclic() const;
};

/// Each precondition resource is linked to its most recent prior producer;
/// resources with no producer are environment stock.
DependenceGraph build_pdg(const Protocol& p);

/// Rewrites every operation into its catalog capability steps. Multi-step
/// rules become a chain joined by fresh intermediate resources; the chain
/// inherits the preconditions at its head and the postconditions at its
/// tail, and an explicit duration is split evenly across the steps.
Protocol expand_protocol(const Protocol& p, const Catalog& cat);
Corpus expand_corpus(const Corpus& c, const Catalog& cat);

/// Conditional dependence frequencies p(op_i precedes op_j | op_i).
struct DependencyMatrix {
  std::vector<std::string> op_types;     // sorted
  std::vector<std::size_t> occurrences;  // per type
  std::vector<double> entries;           // row-major, size()^2

  std::size_t size() const { return op_types.size(); }
  double at(std::size_t i, std::size_t j) const { return entries[i * op_types.size() + j]; }
  /// Entry by type names; 0 for unknown types.
  double at(std::string_view from, std::string_view to) const;
  int index_of(std::string_view op_type) const;
  bool operator==(const DependencyMatrix&) const = default;
};

/// entry(i,j) = #(type-i occurrences with >= 1 direct edge to a type-j
/// operation) / #(type-i occurrences).
DependencyMatrix profile_dependencies(const Corpus& c);
/// Same profile over capability steps after catalog expansion.
DependencyMatrix profile_capabilities(const Corpus& c, const Catalog& cat);

/// Header row and column are op types; cells carry 6 decimals.
std::string matrix_to_csv(const DependencyMatrix& m);
nlohmann::json matrix_to_json(const DependencyMatrix& m);

// ---- executability --------------------------------------------------------

enum class FailureCause { missing_capability, no_connecting_path, no_consistent_assignment };
std::string to_string(FailureCause cause);

struct ExecutabilityFailure {
  std::string protocol;
  FailureCause cause = FailureCause::no_consistent_assignment;
  std::string detail;     // capability name, or "A->B" for a path failure
  std::string operation;  // step id(s) involved
};

struct ExecutabilityReport {
  bool verdict = true;
  bool heuristic = false;  // some protocol was decided by the greedy fallback
  std::vector<ExecutabilityFailure> failures;  // protocol name order
  /// Witness: device id per expanded step, for every executable protocol.
  std::map<std::string, std::vector<std::string>> assignments;
};

struct ExecOptions {
  std::size_t exact_max_steps = 64;
  std::size_t exact_max_devices = 64;
  std::size_t node_budget = 200000;
  std::size_t restarts = 16;
  std::uint64_t seed = 0;
};

/// Executable(C, L): every protocol admits an assignment of its capability
/// steps to capable devices such that each dependence edge runs between
/// reachable devices.
ExecutabilityReport check_executable(const Corpus& c, const Layout& l, const Catalog& cat,
                                     const ExecOptions& opt = {});
bool is_executable(const Protocol& p, const Layout& l, const Catalog& cat, const ExecOptions& opt = {});

nlohmann::json report_to_json(const ExecutabilityReport& r);

}  // namespace groundr
