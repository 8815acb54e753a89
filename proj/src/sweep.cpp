#include "groundr/sweep.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace groundr {

namespace {

bool seen(const std::vector<Candidate>& cs, const Layout& l) {
  return std::any_of(cs.begin(), cs.end(), [&](const Candidate& c) { return c.layout && *c.layout == l; });
}

void require_any_feasible(const std::vector<Candidate>& cs, const char* what) {
  if (std::none_of(cs.begin(), cs.end(), [](const Candidate& c) { return c.feasible; })) {
    std::string msg = std::string(what) + ": no feasible candidate";
    if (!cs.empty()) msg += " (first reason: " + cs.front().reason + ")";
    throw InfeasibleError(msg);
  }
}

}  // namespace

std::vector<Candidate> sweep_exec(const Corpus& target, const Corpus& universe, const Corpus& scaling,
                                  const Catalog& cat, const ExecSweep& grid) {
  if (grid.k_values.empty() || grid.l_values.empty()) throw ConfigError("sweep_exec: k and l ranges must be nonempty");
  const DependencyMatrix m = profile_capabilities(target, cat);
  const WeightedGraph g = dependency_graph(m);
  std::vector<Candidate> out;
  for (std::size_t k : grid.k_values) {
    for (std::size_t l : grid.l_values) {
      if (k < 1 || l < 1) throw ConfigError("sweep_exec: k and l must be >= 1");
      Candidate c;
      c.config = {{"k", k}, {"l", l}};
      c.names = ExecObjectiveVector::names();
      c.directions = ExecObjectiveVector::directions();
      c.values.assign(c.names.size(), 0.0);
      try {
        const PartitionTree t = k == 1 ? PartitionTree::single(g) : recursive_partition(g, k, l);
        Layout layout = instantiate_layout(t, m, cat, grid.instantiate);
        if (seen(out, layout)) {
          spdlog::debug("sweep_exec: k={} l={} repeats an earlier layout", k, l);
          continue;
        }
        c.layout = std::move(layout);
        const ExecObjectiveVector v = evaluate_exec(*c.layout, target, universe, scaling, cat);
        c.values = v.values();
        c.auxiliary = {{"pipeline_fraction", v.pipeline_fraction}, {"partition", partition_to_json(t)}};
      } catch (const InfeasibleError& e) {
        c.feasible = false;
        c.reason = e.what();
        spdlog::info("sweep_exec: k={} l={} infeasible: {}", k, l, c.reason);
      }
      out.push_back(std::move(c));
    }
  }
  require_any_feasible(out, "sweep_exec");
  return out;
}

std::vector<Candidate> sweep_eff(const Corpus& c, const Catalog& cat, const EffSweep& grid) {
  if (grid.fractions.empty() || grid.seeds.empty()) throw ConfigError("sweep_eff: fractions and seeds must be nonempty");
  for (double f : grid.fractions)
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("sweep_eff: fractions must lie in [0, 1]");
  std::vector<Candidate> out;
  for (double f : grid.fractions) {
    for (std::uint64_t seed : grid.seeds) {
      Candidate cand;
      cand.config = {{"fraction", f}, {"seed", seed}};
      cand.names = EffObjectiveVector::names();
      cand.directions = EffObjectiveVector::directions();
      cand.values.assign(cand.names.size(), 0.0);
      try {
        GrowthResult grown = iterative_growth(c, f, cat, seed, grid.growth);
        if (seen(out, grown.layout)) {
          spdlog::debug("sweep_eff: fraction={} seed={} repeats an earlier layout", f, seed);
          continue;
        }
        cand.layout = std::move(grown.layout);
        EffOptions eff = grid.eff;
        eff.seed = seed;
        const EffEvaluation ev = evaluate_eff(*cand.layout, c, cat, eff);
        cand.auxiliary = {{"growth_exhausted", grown.exhausted}, {"growth_report", grown.report}};
        if (!ev.accepted) {
          cand.feasible = false;
          cand.reason = ev.rejection;
          spdlog::info("sweep_eff: fraction={} seed={} rejected: {}", f, seed, cand.reason);
        } else {
          cand.values = ev.objectives.values();
          cand.auxiliary["empty_active_fraction"] = ev.objectives.empty_active_fraction;
          cand.auxiliary["makespan"] = ev.objectives.makespan;
        }
      } catch (const InfeasibleError& e) {
        cand.feasible = false;
        cand.reason = e.what();
        spdlog::info("sweep_eff: fraction={} seed={} infeasible: {}", f, seed, cand.reason);
      }
      out.push_back(std::move(cand));
    }
  }
  require_any_feasible(out, "sweep_eff");
  return out;
}

}  // namespace groundr
