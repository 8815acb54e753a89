// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "fixtures.hpp"
#include "groundr/corpusgen.hpp"
#include "groundr/growth.hpp"
#include "groundr/pareto.hpp"
#include "groundr/sweep.hpp"
#include "oracles.hpp"

using namespace groundr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome dependency_profiling() {
  const auto m = profile_dependencies(fixtures::hand_corpus());
  bool exact = m.op_types == std::vector<std::string>{"A", "B", "C"};
  for (std::size_t i = 0; exact && i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const std::string pair = m.op_types[i] + m.op_types[j];
      const double want = pair == "AB" || pair == "AC" ? 0.5 : pair == "BC" ? 1.0 : 0.0;
      exact = exact && m.at(i, j) == want;
    }
  return {exact, "A->B " + num(m.at("A", "B")) + ", A->C " + num(m.at("A", "C")) + ", B->C " + num(m.at("B", "C"))};
}

Outcome min_cut_exactness() {
  std::mt19937_64 rng(2024);
  std::size_t mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng() % 9;
    const WeightedGraph g = fixtures::random_graph(rng, n);
    if (global_min_cut(g).weight != oracle::min_bipartition(g)) ++mismatches;
  }
  return {mismatches == 0, "200 graphs, " + std::to_string(mismatches) + " mismatches"};
}

Outcome k_cut_bound() {
  std::mt19937_64 rng(2025);
  std::size_t violations = 0;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 3 + rng() % 6;
    const WeightedGraph g = fixtures::random_graph(rng, n);
    for (std::size_t k : {2u, 3u}) {
      const double got = k_min_cut(g, k).weight, opt = oracle::min_k_partition(g, k);
      const double bound = (2.0 - 2.0 / static_cast<double>(k)) * opt;
      if (got > bound + 1e-9) ++violations;
      if (opt > 0) worst = std::max(worst, got / opt);
    }
  }
  return {violations == 0,
          "100 graphs x k in {2,3}, " + std::to_string(violations) + " violations, worst ratio " + num(worst)};
}

Outcome synthesis_soundness() {
  std::size_t layouts = 0, failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GenParams gp;
    gp.seed = seed;
    gp.n_protocols = 10 + seed % 11;
    gp.n_op_types = 6 + seed % 7;
    gp.min_ops = 2;
    gp.max_ops = 8;
    gp.reverse_prob = 0.25;
    CatalogParams cp;
    cp.seed = seed;
    cp.expansion_prob = seed % 3 == 0 ? 0.3 : 0.0;
    const Corpus c = generate_corpus(gp);
    const Catalog cat = generate_catalog(c, cp);
    const auto m = profile_capabilities(c, cat);
    const WeightedGraph g = dependency_graph(m);
    for (std::size_t k = 1; k <= 4 && k <= g.size(); ++k)
      for (std::size_t l = 1; l <= 2; ++l) {
        const PartitionTree t = k == 1 ? PartitionTree::single(g) : recursive_partition(g, k, l);
        ++layouts;
        if (!check_executable(c, instantiate_layout(t, m, cat), cat).verdict) ++failures;
      }
  }
  return {failures == 0, std::to_string(layouts) + " layouts, " + std::to_string(failures) + " not executable"};
}

Outcome executability_monotonicity() {
  std::mt19937_64 rng(2026);
  std::size_t violations = 0, device_edits = 0, connection_edits = 0;
  for (int i = 0; i < 500; ++i) {
    const Catalog cat = fixtures::random_catalog(rng, 3 + rng() % 4);
    const std::size_t caps = cat.devices().size();
    const Corpus c = fixtures::random_corpus(rng, caps, 1 + rng() % 4, 5);
    Layout l = fixtures::random_layout(rng, cat, 0.35);
    if (!check_executable(c, l, cat).verdict) l = minimal_layout(c, cat);
    Layout m = l;
    std::vector<std::string> ids;
    for (const auto& [id, t] : l.devices()) ids.push_back(id);
    std::vector<std::pair<std::string, std::string>> open;
    for (const auto& a : ids)
      for (const auto& b : ids)
        if (a != b && !l.has_connection(a, b, Rho::grouped)) open.push_back({a, b});
    if (rng() % 2 || open.empty()) {
      const auto& d = cat.devices()[rng() % caps];
      m.add_device(m.fresh_id(d.name), d.name);
      ++device_edits;
    } else {
      const auto& [a, b] = open[rng() % open.size()];
      if (rng() % 2 && !l.has_connection(a, b, Rho::associated)) {
        if (l.robots().empty()) m.add_robot("R.1", "R");
        m.add_connection({a, b, Rho::associated, m.robots().begin()->first});
      } else {
        m.add_connection({a, b, Rho::grouped, ""});
      }
      ++connection_edits;
    }
    if (check_executable(c, l, cat).verdict && !check_executable(c, m, cat).verdict) ++violations;
  }
  return {violations == 0, "500 cases (" + std::to_string(device_edits) + " device, " +
                               std::to_string(connection_edits) + " connection insertions), " +
                               std::to_string(violations) + " true->false flips"};
}

Outcome scheduler_invariants() {
  std::mt19937_64 rng(2027);
  std::size_t violations = 0, events = 0;
  std::string first;
  for (int i = 0; i < 100; ++i) {
    const Catalog cat = fixtures::random_catalog(rng, 3 + rng() % 5);
    const Corpus c = fixtures::random_corpus(rng, cat.devices().size(), 2 + rng() % 8, 7);
    Layout l = minimal_layout(c, cat);
    if (i % 2) {
      l.add_robot("R.1", "R");
      for (const auto& conn : Layout(l).connections())
        if (conn.rho == Rho::grouped && rng() % 2) {
          l.remove_connection(conn.from, conn.to, conn.rho);
          if (!l.has_connection(conn.from, conn.to, Rho::associated))
            l.add_connection({conn.from, conn.to, Rho::associated, "R.1"});
        }
    }
    if (i % 3 == 0) {
      const auto devices = l.devices();
      for (const auto& [id, t] : devices)
        if (rng() % 3 == 0) l = duplicate_device(l, id);
    }
    SimulationOptions opt;
    opt.seed = static_cast<std::uint64_t>(i);
    opt.max_parallel = i % 4;
    const ScheduleTrace a = simulate(l, c, cat, opt);
    events += a.events.size();
    auto bad = oracle::trace_violations(a, l, c, cat);
    if (trace_to_jsonl(a) != trace_to_jsonl(simulate(l, c, cat, opt))) bad.push_back("rerun differs");
    if (!bad.empty() && first.empty()) first = bad.front();
    violations += bad.size();
  }
  return {violations == 0, "100 simulations, " + std::to_string(events) + " events, " + std::to_string(violations) +
                               " violations" + (first.empty() ? "" : " (" + first + ")")};
}

Outcome hand_schedule() {
  const Catalog cat = fixtures::sample_catalog();
  const ScheduleTrace tr = simulate(fixtures::minimal_abc(), fixtures::two_p1(), cat);
  Layout dup = fixtures::minimal_abc();
  for (const char* id : {"D_A.1", "D_B.1", "D_C.1"}) dup = duplicate_device(dup, id);
  const ScheduleTrace fast = simulate(dup, fixtures::two_p1(), cat);
  const double util = resource_utilization(tr, 55);
  const bool ok = makespan(tr) == 55 && makespan(fast) == 35 && response_time(tr) == 15 &&
                  std::abs(util - 70.0 / 165.0) <= 1e-9;
  return {ok, "makespan " + num(makespan(tr)) + " / duplicated " + num(makespan(fast)) + ", response " +
                  num(response_time(tr)) + ", utilization " + num(util)};
}

Outcome pareto_exactness() {
  std::mt19937_64 rng(2028);
  std::size_t mismatches = 0, points = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t dims = 2 + rng() % 4, n = 1 + rng() % 500;
    std::vector<Direction> d;
    for (std::size_t j = 0; j < dims; ++j) d.push_back(rng() % 2 ? Direction::maximize : Direction::minimize);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const bool grid = i % 2;
    std::vector<Candidate> cs;
    std::vector<std::vector<double>> vs;
    for (std::size_t k = 0; k < n; ++k) {
      Candidate c;
      for (std::size_t j = 0; j < dims; ++j) {
        c.values.push_back(grid ? std::floor(u(rng) * 8) : u(rng));
        c.names.push_back("f" + std::to_string(j));
      }
      c.directions = d;
      vs.push_back(c.values);
      cs.push_back(std::move(c));
    }
    points += n;
    const auto got = pareto_indices(cs);
    if (std::set<std::size_t>(got.begin(), got.end()) != oracle::pareto(vs, d)) ++mismatches;
  }
  return {mismatches == 0, "50 sets, " + std::to_string(points) + " vectors, " + std::to_string(mismatches) +
                               " mismatches"};
}

std::vector<double> column(const std::vector<Candidate>& cs, const std::string& name, double sign = 1.0) {
  std::vector<double> out;
  for (const auto& c : cs) {
    const auto it = std::find(c.names.begin(), c.names.end(), name);
    out.push_back(sign * c.values[static_cast<std::size_t>(it - c.names.begin())]);
  }
  return out;
}

Outcome tradeoffs() {
  GenParams gp;
  gp.seed = 42;
  gp.n_protocols = 120;
  gp.n_op_types = 18;
  gp.n_clusters = 4;
  const GeneratedSuite s = generate_suite(gp);

  const auto exec = sweep_exec(s.target, s.universe, s.scaling, s.catalog);
  const auto exec_front = pareto_front(exec);
  const double rho_fr = spearman(column(exec_front, "flexibility"), column(exec_front, "reliability"));

  // At sigma 1.2 the minimal layout already satisfies every window, so nothing grows.
  EffSweep grid;
  grid.seeds = {0, 1, 2};
  grid.growth.sigma = 4.0;
  std::vector<Candidate> eff;
  for (const auto& c : sweep_eff(s.target, s.catalog, grid))
    if (c.feasible) eff.push_back(c);
  const double rho_tr = spearman(column(eff, "throughput"), column(eff, "response_time", -1.0));

  const bool a = rho_fr <= -0.5, b = rho_tr <= -0.5;
  return {a && b, "flexibility/reliability rho " + num(rho_fr) + " over " + std::to_string(exec_front.size()) +
                      " front points (" + (a ? "ok" : "FAIL") + "); throughput/response rho " + num(rho_tr) +
                      " over " + std::to_string(eff.size()) + " sweep points (" + (b ? "ok" : "FAIL") + ")"};
}

Outcome growth_termination() {
  std::size_t satisfied_runs = 0, reported_runs = 0, problems = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GenParams gp;
    gp.seed = 1000 + seed;
    gp.n_protocols = 8 + seed % 9;
    gp.n_op_types = 6 + seed % 5;
    gp.min_ops = 2;
    gp.max_ops = 6;
    const Corpus c = generate_corpus(gp);
    const Catalog cat = generate_catalog(c, {seed});
    GrowthOptions opt;
    opt.sigma = 1.2 + 0.2 * static_cast<double>(seed % 5);
    opt.max_parallel = 3 + seed % 6;
    const GrowthResult r = iterative_growth(c, 1.0, cat, seed, opt);

    // duplicate cap: every original device cloned at most window-size times
    std::map<std::string, std::string> origin;
    std::map<std::string, std::size_t> copies;
    for (const auto& st : r.log)
      if (st.action == GrowthStep::Action::duplicate) {
        const std::string o = origin.count(st.device) ? origin[st.device] : st.device;
        origin[st.added] = o;
        if (++copies[o] > opt.max_parallel) ++problems;
      }
    if (r.satisfied + r.report.size() != r.checks) ++problems;
    if (r.exhausted != !r.report.empty()) ++problems;

    // independent check of the last window on the final layout
    const std::size_t w = std::min(opt.max_parallel, r.schedule.size());
    Corpus last;
    for (std::size_t i = r.schedule.size() - w; i < r.schedule.size(); ++i)
      last.protocols.push_back(*c.find(r.schedule[i]));
    SimulationOptions sim;
    sim.seed = seed;
    const double par = makespan(simulate(r.layout, last, cat, sim));
    double seq = 0;
    for (const auto& p : last.protocols) {
      Corpus one;
      one.protocols = {p};
      seq += makespan(simulate(r.layout, one, cat, sim));
    }
    const bool reached = par * opt.sigma <= seq * (1 + 1e-12);
    const bool last_reported = r.log.back().action == GrowthStep::Action::exhausted;
    if (!reached && !last_reported) ++problems;
    (r.report.empty() ? satisfied_runs : reported_runs) += 1;
  }
  return {problems == 0, "50 runs: " + std::to_string(satisfied_runs) + " reached sigma everywhere, " +
                             std::to_string(reported_runs) + " with exhaustion reports, " + std::to_string(problems) +
                             " silent failures or cap breaches"};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  const std::vector<Criterion> criteria{
      {1, "dependency profiling exactness", 1, dependency_profiling},
      {2, "min-cut exactness", 10, min_cut_exactness},
      {3, "k-cut approximation bound", 60, k_cut_bound},
      {4, "synthesis soundness", 120, synthesis_soundness},
      {5, "executability monotonicity", 0, executability_monotonicity},
      {6, "scheduler invariants", 120, scheduler_invariants},
      {7, "hand schedule reproduction", 0, hand_schedule},
      {8, "pareto exactness", 0, pareto_exactness},
      {9, "qualitative trade-offs", 300, tradeoffs},
      {10, "growth termination", 0, growth_termination},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] criterion %d: %s (%.2f s%s): %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                c.limit_s > 0 ? (" of " + num(c.limit_s) + " s").c_str() : "", o.detail.c_str(),
                in_time ? "" : "; over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
