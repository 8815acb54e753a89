#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "groundr/layout.hpp"
#include "groundr/objectives.hpp"

namespace groundr {

/// One evaluated configuration of a sweep.
struct Candidate {
  nlohmann::json config;  // e.g. {"k":2,"l":1} or {"fraction":0.5,"seed":3}
  std::vector<double> values;
  std::vector<std::string> names;
  std::vector<Direction> directions;
  nlohmann::json auxiliary = nlohmann::json::object();
  std::optional<Layout> layout;
  std::string layout_path;
  bool feasible = true;
  std::string reason;  // why the candidate is infeasible
};

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// a is at least as good as b everywhere and strictly better somewhere.
bool dominates(const std::vector<double>& a, const std::vector<double>& b, const std::vector<Direction>& dirs);
/// Same on candidates; throws ConfigError when their objective schemas differ.
bool dominates(const Candidate& a, const Candidate& b);

/// Indices (ascending) of the feasible candidates no feasible candidate
/// dominates. Throws ConfigError on an empty or schema-inconsistent input.
std::vector<std::size_t> pareto_indices(const std::vector<Candidate>& cs);
std::vector<Candidate> pareto_front(const std::vector<Candidate>& cs);

/// Highest weighted sum of min-max normalized, direction-aligned objectives;
/// ties go to the smallest config. Throws ConfigError on an empty front or
/// invalid weights.
std::size_t select_by_preference(const std::vector<Candidate>& front, const std::vector<double>& weights);

/// Rank correlation with average ranks for ties; NaN when either side is
/// constant or fewer than two points are given.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// {config, objectives:[{name, value, direction:"max"|"min"}], auxiliary,
///  feasible, layout_path, reason?, layout?}
nlohmann::json candidate_to_json(const Candidate& c);
Candidate candidate_from_json(const nlohmann::json& doc);
nlohmann::json candidates_to_json(const std::vector<Candidate>& cs);
std::vector<Candidate> candidates_from_json(const nlohmann::json& doc);

/// Two-column projection (plus config) of the feasible candidates.
std::string projection_csv(const std::vector<Candidate>& cs, const std::string& x, const std::string& y);

}  // namespace groundr
