#pragma once

#include <string>
#include <vector>

#include "groundr/catalog.hpp"
#include "groundr/dependence.hpp"
#include "groundr/dsl.hpp"
#include "groundr/layout.hpp"

namespace groundr {

enum class Direction { maximize, minimize };

/// Executability-level objectives of one layout.
struct ExecObjectiveVector {
  double flexibility = 0;        // max
  double reliability = 0;        // max
  double scalability = 0;        // min
  double system_complexity = 0;  // min
  double cost = 0;               // min
  /// Auxiliary, not optimized: share of target dependence edges whose witness
  /// devices coincide or are joined by pipelines alone.
  double pipeline_fraction = 0;

  std::vector<double> values() const {
    return {flexibility, reliability, scalability, system_complexity, cost};
  }
  static const std::vector<std::string>& names();
  static const std::vector<Direction>& directions();
};

/// |C* \ C| with C* the universe protocols executable on `l`. Throws
/// InfeasibleError when `l` cannot execute `target`.
double flexibility(const Layout& l, const Corpus& target, const Corpus& universe, const Catalog& cat);

/// Number of grouped connections.
double reliability(const Layout& l);

/// Share of the target's dependence edges realized without robot transport
/// under the executability witness.
double pipeline_fraction(const Layout& l, const Corpus& target, const Catalog& cat);

struct Augmentation {
  Layout layout;
  std::vector<EditOp> edits;
};

/// Greedy edits until `l` executes every protocol of `scaling`: for each
/// failing protocol in name order, insert the cheapest device for each
/// missing capability, then insert directed associated connections (adding
/// the cheapest robot first when the layout has none) for the dependence
/// edges a repair assignment leaves unreachable. Throws InfeasibleError for a
/// capability no catalog device offers.
Augmentation augment_for(const Layout& l, const Corpus& scaling, const Catalog& cat);

/// Edit count of augment_for; an upper bound on the minimal edit distance.
double scalability(const Layout& l, const Corpus& scaling, const Catalog& cat);

ExecObjectiveVector evaluate_exec(const Layout& l, const Corpus& target, const Corpus& universe,
                                  const Corpus& scaling, const Catalog& cat);

}  // namespace groundr
