#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "groundr/catalog.hpp"
#include "groundr/dsl.hpp"
#include "groundr/layout.hpp"
#include "groundr/objectives.hpp"
#include "groundr/scheduler.hpp"

namespace groundr {

struct GrowthOptions {
  /// Required speedup of the parallel run over the sequential baseline.
  double sigma = 1.2;
  /// Sliding window of concurrently checked protocols.
  std::size_t max_parallel = 50;
  /// Representatives scheduled before the randomly ordered remainder.
  std::size_t n_representatives = 2;
  ExecOptions exec;
};

struct GrowthStep {
  enum class Action { admit, satisfied, duplicate, revert, exhausted };
  Action action = Action::admit;
  std::string protocol;  // protocol whose admission triggered the step
  std::string device;    // duplicated or reverted device
  std::string added;     // id of the new device for duplicate
  double parallel_s = 0;
  double sequential_s = 0;
};
std::string to_string(GrowthStep::Action a);

struct GrowthResult {
  Layout layout;
  std::vector<GrowthStep> log;
  std::vector<std::string> schedule;  // protocol names in admission order
  bool exhausted = false;
  /// One line per window that never reached the speedup target.
  std::vector<std::string> report;
  std::size_t checks = 0;     // windows of >= 2 protocols examined
  std::size_t satisfied = 0;  // of which reached the target
};

/// Grows the minimal layout of `c` until every admitted window of protocols
/// runs at least sigma times faster in parallel than one after another. The
/// bottleneck device (largest aggregate ready wait, ties by busy time, then
/// id) is duplicated with all its connections; a duplicate that does not
/// shorten the parallel makespan is reverted and its source marked saturated.
/// Each device can be duplicated at most window-size times.
GrowthResult iterative_growth(const Corpus& c, double fraction, const Catalog& cat, std::uint64_t seed,
                              const GrowthOptions& opt = {});

/// Copy of device `id` under a fresh id, with every incident connection cloned.
Layout duplicate_device(const Layout& l, const std::string& id, std::string* added = nullptr);

struct EffObjectiveVector {
  double throughput = 0;            // max
  double response_time = 0;         // min
  double resource_utilization = 0;  // max
  double system_complexity = 0;     // min
  double cost = 0;                  // min
  /// Auxiliary, not optimized: mean share of time an operation class has no
  /// active instance.
  double empty_active_fraction = 0;
  double makespan = 0;  // auxiliary

  std::vector<double> values() const {
    return {throughput, response_time, resource_utilization, system_complexity, cost};
  }
  static const std::vector<std::string>& names();
  static const std::vector<Direction>& directions();
};

struct EffOptions {
  double dt_throughput = 5e4;
  double dt_util = 1e4;
  double cost_max = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::size_t max_parallel = 50;
  ExecOptions exec;
};

struct EffEvaluation {
  bool accepted = true;
  std::string rejection;  // set when !accepted
  EffObjectiveVector objectives;
};

/// Simulates `c` on `l` and scores the trace. A layout over the cost budget
/// is rejected without simulation.
EffEvaluation evaluate_eff(const Layout& l, const Corpus& c, const Catalog& cat, const EffOptions& opt = {});

}  // namespace groundr
