#include "groundr/assignment.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <unordered_set>

namespace groundr {

StepProblem::StepProblem(const Protocol& expanded, const Layout& l, const Catalog& cat,
                         const Reachability& reach)
    : pdg_(build_pdg(expanded)), reach_(&reach) {
  const std::size_t n = pdg_.size();
  std::vector<std::vector<std::string>> device_caps;  // by device index
  for (const auto& id : reach.ids()) {
    const DeviceType* d = cat.device(l.devices().at(id));
    if (!d) throw LayoutError("device '" + id + "' has a type missing from the catalog");
    device_caps.push_back(d->capabilities);
  }
  domains_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < device_caps.size(); ++d)
      if (std::binary_search(device_caps[d].begin(), device_caps[d].end(), pdg_.op_types[i]))
        domains_[i].push_back(static_cast<int>(d));

  producers_ = pdg_.producers();
  auto consumers = pdg_.consumers();
  std::vector<std::size_t> last_use(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c : consumers[i]) last_use[i] = std::max(last_use[i], c);
  live_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (!consumers[j].empty() && last_use[j] >= i) live_[i].push_back(j);
}

std::optional<ExecutabilityFailure> StepProblem::precheck() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (domains_[i].empty())
      return ExecutabilityFailure{pdg_.protocol, FailureCause::missing_capability, pdg_.op_types[i],
                                  pdg_.op_ids[i]};
  for (const auto& e : pdg_.edges) {
    bool any = false;
    for (int a : domains_[e.producer]) {
      for (int b : domains_[e.consumer])
        if (reach_->reachable(a, b)) {
          any = true;
          break;
        }
      if (any) break;
    }
    if (!any)
      return ExecutabilityFailure{pdg_.protocol, FailureCause::no_connecting_path,
                                  pdg_.op_types[e.producer] + "->" + pdg_.op_types[e.consumer],
                                  pdg_.op_ids[e.producer] + "->" + pdg_.op_ids[e.consumer]};
  }
  return std::nullopt;
}

namespace {

struct Search {
  const StepProblem& prob;
  const std::vector<int>& fixed;
  std::vector<int>& out;
  const std::vector<std::vector<std::size_t>>& live;
  std::size_t budget;
  std::size_t nodes = 0;
  bool exhausted = false;
  std::unordered_set<std::string> failed;

  std::string key(std::size_t i) const {
    std::string k = std::to_string(i);
    for (std::size_t j : live[i]) {
      k += ',';
      k += std::to_string(out[j]);
    }
    return k;
  }

  bool compatible(std::size_t i, int d) const {
    for (std::size_t p : prob.producers(i))
      if (!prob.reach().reachable(out[p], d)) return false;
    return true;
  }

  bool dfs(std::size_t i) {
    if (i == prob.size()) return true;
    if (++nodes > budget) {
      exhausted = true;
      return false;
    }
    std::string k = key(i);
    if (failed.count(k)) return false;
    const auto& dom = prob.domain(i);
    if (fixed[i] >= 0) {
      if (std::find(dom.begin(), dom.end(), fixed[i]) != dom.end() && compatible(i, fixed[i])) {
        out[i] = fixed[i];
        if (dfs(i + 1)) return true;
      }
    } else {
      for (int d : dom) {
        if (!compatible(i, d)) continue;
        out[i] = d;
        if (dfs(i + 1)) return true;
        if (exhausted) return false;
      }
    }
    if (exhausted) return false;
    out[i] = -1;
    failed.insert(std::move(k));
    return false;
  }
};

}  // namespace

StepProblem::Status StepProblem::solve(std::vector<int>& assignment, std::size_t node_budget) const {
  assignment.resize(size(), -1);
  const std::vector<int> fixed = assignment;
  Search s{*this, fixed, assignment, live_, node_budget, 0, false, {}};
  if (s.dfs(0)) return Status::solved;
  assignment = fixed;
  return s.exhausted ? Status::budget_exhausted : Status::infeasible;
}

bool StepProblem::greedy(std::vector<int>& assignment, std::uint64_t seed, std::size_t restarts) const {
  assignment.resize(size(), -1);
  const std::vector<int> fixed = assignment;
  std::mt19937_64 rng(seed);
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    std::vector<int> a = fixed;
    bool ok = true;
    for (std::size_t i = 0; i < size() && ok; ++i) {
      std::vector<int> cands;
      for (int d : domains_[i]) {
        if (fixed[i] >= 0 && d != fixed[i]) continue;
        bool reachable = true;
        for (std::size_t p : producers_[i]) reachable = reachable && reach_->reachable(a[p], d);
        if (reachable) cands.push_back(d);
      }
      if (cands.empty()) {
        ok = false;
        break;
      }
      if (r > 0) std::shuffle(cands.begin(), cands.end(), rng);
      // Nearest first: reuse a producer's device when possible.
      int pick = cands.front();
      for (std::size_t p : producers_[i])
        if (std::find(cands.begin(), cands.end(), a[p]) != cands.end()) {
          pick = a[p];
          break;
        }
      a[i] = pick;
    }
    if (ok) {
      assignment = std::move(a);
      return true;
    }
  }
  return false;
}

}  // namespace groundr
