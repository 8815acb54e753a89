#pragma once

#include <cstdint>
#include <vector>

#include "groundr/catalog.hpp"
#include "groundr/dsl.hpp"
#include "groundr/growth.hpp"
#include "groundr/pareto.hpp"
#include "groundr/partition.hpp"

namespace groundr {

struct ExecSweep {
  std::vector<std::size_t> k_values{1, 2, 3, 4, 5, 6};
  std::vector<std::size_t> l_values{1, 2, 3};
  InstantiateOptions instantiate;
};

/// One candidate per (k, l) in grid order: partition the capability
/// dependency graph, instantiate, score. Configurations that reproduce an
/// earlier layout are skipped; layouts that cannot execute the target are
/// kept with feasible = false. Throws InfeasibleError when no candidate is
/// feasible.
std::vector<Candidate> sweep_exec(const Corpus& target, const Corpus& universe, const Corpus& scaling,
                                  const Catalog& cat, const ExecSweep& grid = {});

struct EffSweep {
  std::vector<double> fractions{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::uint64_t> seeds{0};
  GrowthOptions growth;
  EffOptions eff;
};

/// One candidate per (fraction, seed): grow, then score on the whole corpus.
/// Identical grown layouts are scored once; over-budget layouts are kept with
/// feasible = false. Throws InfeasibleError when no candidate is feasible.
std::vector<Candidate> sweep_eff(const Corpus& c, const Catalog& cat, const EffSweep& grid = {});

}  // namespace groundr
