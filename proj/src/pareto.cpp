#include "groundr/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace groundr {

std::string to_string(Direction d) { return d == Direction::maximize ? "max" : "min"; }

Direction direction_from_string(const std::string& s) {
  if (s == "max") return Direction::maximize;
  if (s == "min") return Direction::minimize;
  throw ConfigError("unknown objective direction '" + s + "' (expected max or min)");
}

namespace {

double aligned(double v, Direction d) { return d == Direction::maximize ? v : -v; }

void check_schema(const Candidate& a, const Candidate& b) {
  if (a.names != b.names || a.directions != b.directions || a.values.size() != b.values.size() ||
      a.values.size() != a.names.size() || a.values.size() != a.directions.size())
    throw ConfigError("candidates have different objective schemas");
}

}  // namespace

bool dominates(const std::vector<double>& a, const std::vector<double>& b, const std::vector<Direction>& dirs) {
  if (a.size() != b.size() || a.size() != dirs.size()) throw ConfigError("objective vectors differ in length");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = aligned(a[i], dirs[i]), y = aligned(b[i], dirs[i]);
    if (x < y) return false;
    if (x > y) strict = true;
  }
  return strict;
}

bool dominates(const Candidate& a, const Candidate& b) {
  check_schema(a, b);
  return dominates(a.values, b.values, a.directions);
}

std::vector<std::size_t> pareto_indices(const std::vector<Candidate>& cs) {
  if (cs.empty()) throw ConfigError("pareto front of an empty candidate set");
  for (const auto& c : cs) check_schema(cs.front(), c);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (cs[i].feasible) order.push_back(i);
  const auto& dirs = cs.front().directions;
  // A dominator is lexicographically larger after alignment, so it is visited
  // first; comparing against the current front alone is enough.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const double x = aligned(cs[a].values[k], dirs[k]), y = aligned(cs[b].values[k], dirs[k]);
      if (x != y) return x > y;
    }
    return a < b;
  });
  std::vector<std::size_t> front;
  for (std::size_t i : order) {
    bool dominated = false;
    for (std::size_t f : front)
      if (dominates(cs[f].values, cs[i].values, dirs)) {
        dominated = true;
        break;
      }
    if (!dominated) front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  return front;
}

std::vector<Candidate> pareto_front(const std::vector<Candidate>& cs) {
  std::vector<Candidate> out;
  for (std::size_t i : pareto_indices(cs)) out.push_back(cs[i]);
  return out;
}

std::size_t select_by_preference(const std::vector<Candidate>& front, const std::vector<double>& weights) {
  if (front.empty()) throw ConfigError("cannot select from an empty front");
  for (const auto& c : front) check_schema(front.front(), c);
  const std::size_t m = front.front().values.size();
  if (weights.size() != m)
    throw ConfigError("expected " + std::to_string(m) + " weights, got " + std::to_string(weights.size()));
  bool any = false;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw ConfigError("weights must be finite and nonnegative");
    any = any || w > 0;
  }
  if (!any) throw ConfigError("weights must not all be zero");

  std::vector<double> lo(m, std::numeric_limits<double>::infinity()), hi(m, -std::numeric_limits<double>::infinity());
  for (const auto& c : front)
    for (std::size_t k = 0; k < m; ++k) {
      lo[k] = std::min(lo[k], c.values[k]);
      hi[k] = std::max(hi[k], c.values[k]);
    }
  const auto& dirs = front.front().directions;
  auto score = [&](const Candidate& c) {
    double s = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (hi[k] <= lo[k]) continue;
      const double t = (c.values[k] - lo[k]) / (hi[k] - lo[k]);
      s += weights[k] * (dirs[k] == Direction::maximize ? t : 1.0 - t);
    }
    return s;
  };
  constexpr double tie = 1e-9;
  std::size_t best = 0;
  double best_score = score(front[0]);
  for (std::size_t i = 1; i < front.size(); ++i) {
    const double s = score(front[i]);
    if (s > best_score + tie || (std::abs(s - best_score) <= tie && front[i].config < front[best].config)) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("spearman: samples differ in length");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (x.size() < 2) return nan;
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return nan;
  return sxy / std::sqrt(sxx * syy);
}

nlohmann::json candidate_to_json(const Candidate& c) {
  nlohmann::json objectives = nlohmann::json::array();
  for (std::size_t i = 0; i < c.names.size(); ++i)
    objectives.push_back({{"name", c.names[i]}, {"value", c.values[i]}, {"direction", to_string(c.directions[i])}});
  nlohmann::json j = {{"config", c.config},       {"objectives", objectives}, {"auxiliary", c.auxiliary},
                      {"feasible", c.feasible},   {"layout_path", c.layout_path}};
  if (!c.feasible) j["reason"] = c.reason;
  if (c.layout) j["layout"] = layout_to_json(*c.layout);
  return j;
}

Candidate candidate_from_json(const nlohmann::json& doc) {
  try {
    Candidate c;
    c.config = doc.at("config");
    for (const auto& o : doc.at("objectives")) {
      c.names.push_back(o.at("name").get<std::string>());
      c.values.push_back(o.at("value").get<double>());
      c.directions.push_back(direction_from_string(o.at("direction").get<std::string>()));
    }
    if (doc.contains("auxiliary")) c.auxiliary = doc.at("auxiliary");
    c.feasible = doc.value("feasible", true);
    c.layout_path = doc.value("layout_path", "");
    c.reason = doc.value("reason", "");
    if (doc.contains("layout")) c.layout = layout_from_json(doc.at("layout"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed candidate: ") + e.what());
  }
}

nlohmann::json candidates_to_json(const std::vector<Candidate>& cs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cs) arr.push_back(candidate_to_json(c));
  return arr;
}

std::vector<Candidate> candidates_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ConfigError("candidate file must hold a JSON array");
  std::vector<Candidate> out;
  for (const auto& j : doc) out.push_back(candidate_from_json(j));
  return out;
}

std::string projection_csv(const std::vector<Candidate>& cs, const std::string& x, const std::string& y) {
  std::ostringstream out;
  out << "config," << x << ',' << y << '\n';
  for (const auto& c : cs) {
    if (!c.feasible) continue;
    auto ix = std::find(c.names.begin(), c.names.end(), x);
    auto iy = std::find(c.names.begin(), c.names.end(), y);
    if (ix == c.names.end() || iy == c.names.end())
      throw ConfigError("objective '" + (ix == c.names.end() ? x : y) + "' not in candidate schema");
    std::string cfg = c.config.dump();
    std::replace(cfg.begin(), cfg.end(), ',', ';');
    out << cfg << ',' << format_number(c.values[static_cast<std::size_t>(ix - c.names.begin())]) << ','
        << format_number(c.values[static_cast<std::size_t>(iy - c.names.begin())]) << '\n';
  }
  return out.str();
}

}  // namespace groundr
