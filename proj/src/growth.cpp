#include "groundr/growth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <spdlog/spdlog.h>

namespace groundr {

std::string to_string(GrowthStep::Action a) {
  switch (a) {
    case GrowthStep::Action::admit: return "admit";
    case GrowthStep::Action::satisfied: return "satisfied";
    case GrowthStep::Action::duplicate: return "duplicate";
    case GrowthStep::Action::revert: return "revert";
    case GrowthStep::Action::exhausted: return "exhausted";
  }
  return "?";
}

Layout duplicate_device(const Layout& l, const std::string& id, std::string* added) {
  if (!l.has_device(id)) throw LayoutError("cannot duplicate unknown device '" + id + "'");
  Layout out = l;
  const std::string& type = l.devices().at(id);
  const std::string copy = out.fresh_id(type);
  out.add_device(copy, type);
  for (const auto& c : l.connections()) {
    if (c.from == id) out.add_connection({copy, c.to, c.rho, c.robot});
    if (c.to == id) out.add_connection({c.from, copy, c.rho, c.robot});
  }
  if (added) *added = copy;
  return out;
}

namespace {

std::vector<const Protocol*> admission_order(const Corpus& c, std::size_t n, std::size_t n_rep, std::uint64_t seed) {
  std::vector<const Protocol*> order;
  if (n == 0) return order;
  std::set<std::string> taken;
  const Corpus reps = sample_representatives(c, std::min(n_rep, n), seed);
  for (const auto& r : reps.protocols) {
    order.push_back(c.find(r.name));
    taken.insert(r.name);
  }
  std::vector<const Protocol*> rest;
  for (const auto& p : c.protocols)
    if (!taken.count(p.name)) rest.push_back(&p);
  std::sort(rest.begin(), rest.end(), [](const Protocol* a, const Protocol* b) { return a->name < b->name; });
  std::mt19937_64 rng(seed);
  std::shuffle(rest.begin(), rest.end(), rng);
  for (const Protocol* p : rest) {
    if (order.size() >= n) break;
    order.push_back(p);
  }
  return order;
}

struct Bottleneck {
  std::string device;
  std::int64_t wait = 0;
  std::int64_t busy = 0;
};

std::vector<Bottleneck> rank_bottlenecks(const ScheduleTrace& tr) {
  std::map<std::string, Bottleneck> by_device;
  for (const auto& op : tr.ops) {
    auto& b = by_device[op.device];
    b.device = op.device;
    b.wait += op.start_us - op.push_us;
    b.busy += op.pop_us - op.start_us;
  }
  std::vector<Bottleneck> out;
  for (auto& [id, b] : by_device)
    if (b.wait > 0) out.push_back(b);
  std::sort(out.begin(), out.end(), [](const Bottleneck& a, const Bottleneck& b) {
    if (a.wait != b.wait) return a.wait > b.wait;
    if (a.busy != b.busy) return a.busy > b.busy;
    return a.device < b.device;
  });
  return out;
}

}  // namespace

GrowthResult iterative_growth(const Corpus& c, double fraction, const Catalog& cat, std::uint64_t seed,
                              const GrowthOptions& opt) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("growth fraction must lie in [0, 1]");
  if (!(opt.sigma > 0.0)) throw ConfigError("growth sigma must be > 0");
  if (opt.max_parallel < 1) throw ConfigError("growth max_parallel must be >= 1");

  GrowthResult res;
  res.layout = minimal_layout(c, cat);
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(c.size()) - 1e-9));
  const auto order = admission_order(c, n, std::max<std::size_t>(opt.n_representatives, 1), seed);

  SimulationOptions sim;
  sim.seed = seed;
  sim.exec = opt.exec;

  std::map<std::string, std::string> origin;  // device id -> id it was cloned from
  std::map<std::string, std::size_t> copies;  // origin id -> duplicates made
  std::map<std::string, double> alone;  // makespan of a single protocol on the current layout
  auto origin_of = [&](const std::string& id) {
    auto it = origin.find(id);
    return it == origin.end() ? id : it->second;
  };

  std::vector<const Protocol*> active;
  for (const Protocol* p : order) {
    active.push_back(p);
    res.schedule.push_back(p->name);
    res.log.push_back({GrowthStep::Action::admit, p->name, "", "", 0, 0});
    const std::size_t begin = active.size() > opt.max_parallel ? active.size() - opt.max_parallel : 0;
    Corpus window;
    window.role = CorpusRole::schedule_subset;
    for (std::size_t i = begin; i < active.size(); ++i) window.protocols.push_back(*active[i]);
    if (window.size() < 2) continue;
    ++res.checks;

    auto sequential = [&] {
      double sum = 0;
      for (const auto& q : window.protocols) {
        auto it = alone.find(q.name);
        if (it == alone.end()) {
          Corpus one;
          one.protocols.push_back(q);
          it = alone.emplace(q.name, makespan(simulate(res.layout, one, cat, sim))).first;
        }
        sum += it->second;
      }
      return sum;
    };

    std::set<std::string> saturated;  // duplicates that did not help this window
    ScheduleTrace tr = simulate(res.layout, window, cat, sim);
    for (;;) {
      const double par = makespan(tr);
      const double seq = sequential();
      if (par * opt.sigma <= seq * (1 + 1e-12)) {
        ++res.satisfied;
        res.log.push_back({GrowthStep::Action::satisfied, p->name, "", "", par, seq});
        break;
      }
      std::string pick;
      for (const auto& b : rank_bottlenecks(tr)) {
        const std::string o = origin_of(b.device);
        if (saturated.count(b.device) || copies[o] >= window.size()) continue;
        pick = b.device;
        break;
      }
      if (pick.empty()) {
        res.exhausted = true;
        res.log.push_back({GrowthStep::Action::exhausted, p->name, "", "", par, seq});
        res.report.push_back("window ending at '" + p->name + "' (" + std::to_string(window.size()) +
                             " protocols): parallel makespan " + format_number(par) + " s vs sequential " +
                             format_number(seq) + " s, speedup " + format_number(seq / par) + " < " +
                             format_number(opt.sigma) + " with no duplicable bottleneck left");
        spdlog::warn("growth: {}", res.report.back());
        break;
      }
      std::string added;
      Layout grown = duplicate_device(res.layout, pick, &added);
      ScheduleTrace next = simulate(grown, window, cat, sim);
      if (makespan(next) < par) {
        origin[added] = origin_of(pick);
        ++copies[origin_of(pick)];
        res.layout = std::move(grown);
        tr = std::move(next);
        alone.clear();
        res.log.push_back({GrowthStep::Action::duplicate, p->name, pick, added, makespan(tr), seq});
        spdlog::debug("growth: duplicated {} as {} (makespan {} -> {})", pick, added, par, makespan(tr));
      } else {
        saturated.insert(pick);
        res.log.push_back({GrowthStep::Action::revert, p->name, pick, added, par, seq});
      }
    }
  }
  return res;
}

const std::vector<std::string>& EffObjectiveVector::names() {
  static const std::vector<std::string> n{"throughput", "response_time", "resource_utilization", "system_complexity",
                                          "cost"};
  return n;
}

const std::vector<Direction>& EffObjectiveVector::directions() {
  static const std::vector<Direction> d{Direction::maximize, Direction::minimize, Direction::maximize,
                                        Direction::minimize, Direction::minimize};
  return d;
}

EffEvaluation evaluate_eff(const Layout& l, const Corpus& c, const Catalog& cat, const EffOptions& opt) {
  EffEvaluation ev;
  const double price = cost(l, cat);
  if (price > opt.cost_max) {
    ev.accepted = false;
    ev.rejection = "cost " + format_number(price) + " exceeds budget " + format_number(opt.cost_max);
    return ev;
  }
  SimulationOptions sim;
  sim.seed = opt.seed;
  sim.max_parallel = opt.max_parallel;
  sim.exec = opt.exec;
  const ScheduleTrace tr = simulate(l, c, cat, sim);
  auto& v = ev.objectives;
  v.throughput = throughput(tr, opt.dt_throughput);
  v.response_time = response_time(tr);
  v.resource_utilization = resource_utilization(tr, opt.dt_util);
  v.system_complexity = system_complexity(l, cat);
  v.cost = price;
  v.empty_active_fraction = empty_active_fraction(tr, opt.dt_util);
  v.makespan = makespan(tr);
  return ev;
}

}  // namespace groundr
