#include "groundr/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "groundr/assignment.hpp"

namespace groundr {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::pop: return "pop";
    case EventKind::push: return "push";
    case EventKind::start: return "start";
  }
  return "?";
}

std::int64_t to_microseconds(double seconds) { return std::llround(seconds * 1e6); }

std::string op_instance_class(const Operation& op) {
  auto joined = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  return op.op_type + "[" + joined(op.preconditions) + "|" + joined(op.postconditions) + "]";
}

namespace {

struct Hop {
  std::string robot;
  std::int64_t transport_us = 0;
  int from = 0;
  int to = 0;
};

// Transfer routes between devices, minimizing robot hops (grouped hops are free).
class Router {
 public:
  Router(const Layout& l, const Catalog& cat, const Reachability& reach) : reach_(reach) {
    adj_.resize(reach.size());
    for (const auto& c : l.connections()) {
      Edge e{reach.index(c.to), c.rho == Rho::associated, c.robot, 0};
      if (e.robot_hop) e.transport_us = to_microseconds(cat.robot(l.robots().at(c.robot))->transport_s);
      adj_[static_cast<std::size_t>(reach.index(c.from))].push_back(std::move(e));
    }
  }

  const std::vector<Hop>& route(int from, int to) {
    auto key = std::make_pair(from, to);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<Hop> hops;
    if (from != to && !reach_.piped(from, to)) hops = search(from, to);
    return cache_.emplace(key, std::move(hops)).first->second;
  }

 private:
  struct Edge {
    int to;
    bool robot_hop;
    std::string robot;
    std::int64_t transport_us;
  };

  std::vector<Hop> search(int from, int to) const {
    const std::size_t n = adj_.size();
    std::vector<std::size_t> dist(n, std::numeric_limits<std::size_t>::max());
    std::vector<std::pair<int, const Edge*>> parent(n, {-1, nullptr});
    std::deque<int> dq{from};
    dist[static_cast<std::size_t>(from)] = 0;
    while (!dq.empty()) {
      int u = dq.front();
      dq.pop_front();
      for (const auto& e : adj_[static_cast<std::size_t>(u)]) {
        std::size_t nd = dist[static_cast<std::size_t>(u)] + (e.robot_hop ? 1 : 0);
        if (nd < dist[static_cast<std::size_t>(e.to)]) {
          dist[static_cast<std::size_t>(e.to)] = nd;
          parent[static_cast<std::size_t>(e.to)] = {u, &e};
          if (e.robot_hop)
            dq.push_back(e.to);
          else
            dq.push_front(e.to);
        }
      }
    }
    if (dist[static_cast<std::size_t>(to)] == std::numeric_limits<std::size_t>::max())
      throw std::logic_error("simulate: no route between assigned devices");
    std::vector<Hop> hops;
    for (int v = to; v != from;) {
      auto [u, e] = parent[static_cast<std::size_t>(v)];
      if (e->robot_hop) hops.push_back({e->robot, e->transport_us, u, v});
      v = u;
    }
    std::reverse(hops.begin(), hops.end());
    return hops;
  }

  const Reachability& reach_;
  std::vector<std::vector<Edge>> adj_;
  std::map<std::pair<int, int>, std::vector<Hop>> cache_;
};

struct ProtocolRun {
  const Protocol* source = nullptr;
  Protocol expanded;
  std::unique_ptr<StepProblem> problem;
  std::vector<std::vector<std::size_t>> consumers;
  std::vector<std::size_t> pending;  // unpopped producers per step
  std::vector<int> device;           // claimed device per step, -1 before claim
  std::vector<std::int64_t> push_us, start_us, pop_us;
  std::vector<std::string> classes;
  std::size_t remaining = 0;
};

using OpKey = std::tuple<std::int64_t, std::size_t, std::size_t>;  // (time, protocol rank, step)

class Simulator {
 public:
  Simulator(const Layout& l, const Corpus& c, const Catalog& cat, const SimulationOptions& opt)
      : layout_(l), cat_(cat), opt_(opt), reach_(l), router_(l, cat, reach_) {
    for (const auto& id : reach_.ids()) {
      const DeviceType* t = cat.device(l.devices().at(id));
      types_.push_back(t);
      slots_.push_back({id, t->capacity});
    }
    active_.assign(slots_.size(), 0);
    freed_at_.assign(slots_.size(), 0);

    std::vector<const Protocol*> ordered;
    for (const auto& p : c.protocols) ordered.push_back(&p);
    std::sort(ordered.begin(), ordered.end(), [](const Protocol* a, const Protocol* b) { return a->name < b->name; });
    for (const Protocol* p : ordered) {
      ProtocolRun run;
      run.source = p;
      run.expanded = expand_protocol(*p, cat);
      run.problem = std::make_unique<StepProblem>(run.expanded, l, cat, reach_);
      run.consumers = run.problem->pdg().consumers();
      const std::size_t n = run.expanded.operations.size();
      for (std::size_t i = 0; i < n; ++i) {
        run.pending.push_back(run.problem->producers(i).size());
        run.classes.push_back(op_instance_class(run.expanded.operations[i]));
      }
      run.device.assign(n, -1);
      run.push_us.assign(n, -1);
      run.start_us.assign(n, -1);
      run.pop_us.assign(n, -1);
      run.remaining = n;
      runs_.push_back(std::move(run));
    }
  }

  ScheduleTrace run() {
    std::int64_t now = 0;
    admit(now);
    dispatch(now);
    while (!running_.empty()) {
      now = std::get<0>(running_.top());
      while (!running_.empty() && std::get<0>(running_.top()) == now) {
        auto [t, rank, step] = running_.top();
        running_.pop();
        complete(rank, step, now);
      }
      admit(now);
      dispatch(now);
    }
    if (!ready_.empty() || next_admit_ < runs_.size())
      throw std::logic_error("simulate: schedule deadlocked with operations still pending");
    return assemble();
  }

 private:
  void push(std::size_t rank, std::size_t step, std::int64_t now) {
    runs_[rank].push_us[step] = now;
    ready_.insert({now, rank, step});
  }

  void admit(std::int64_t now) {
    while (next_admit_ < runs_.size() && (opt_.max_parallel == 0 || in_flight_ < opt_.max_parallel)) {
      auto& run = runs_[next_admit_];
      if (run.remaining > 0) {
        ++in_flight_;
        for (std::size_t i = 0; i < run.pending.size(); ++i)
          if (run.pending[i] == 0) push(next_admit_, i, now);
      }
      ++next_admit_;
    }
  }

  void complete(std::size_t rank, std::size_t step, std::int64_t now) {
    auto& run = runs_[rank];
    const auto d = static_cast<std::size_t>(run.device[step]);
    --active_[d];
    freed_at_[d] = now;
    for (std::size_t c : run.consumers[step])
      if (--run.pending[c] == 0) push(rank, c, now);
    if (--run.remaining == 0) --in_flight_;
  }

  bool feasible(ProtocolRun& run, std::size_t step, int device) const {
    std::vector<int> fixed = run.device;
    fixed[step] = device;
    switch (run.problem->solve(fixed, opt_.exec.node_budget)) {
      case StepProblem::Status::solved: return true;
      case StepProblem::Status::infeasible: return false;
      case StepProblem::Status::budget_exhausted: break;
    }
    fixed = run.device;
    fixed[step] = device;
    return run.problem->greedy(fixed, opt_.exec.seed, opt_.exec.restarts);
  }

  void dispatch(std::int64_t now) {
    for (auto it = ready_.begin(); it != ready_.end();) {
      auto [pushed, rank, step] = *it;
      if (try_claim(rank, step, now))
        it = ready_.erase(it);
      else
        ++it;
    }
  }

  bool try_claim(std::size_t rank, std::size_t step, std::int64_t now) {
    auto& run = runs_[rank];
    const StepProblem& prob = *run.problem;
    std::vector<int> cands;
    for (int d : prob.domain(step)) {
      if (active_[static_cast<std::size_t>(d)] >= slots_[static_cast<std::size_t>(d)].capacity) continue;
      bool ok = true;
      for (std::size_t p : prob.producers(step)) ok = ok && reach_.reachable(run.device[p], d);
      if (ok) cands.push_back(d);
    }
    std::sort(cands.begin(), cands.end(), [&](int a, int b) {
      return std::make_pair(freed_at_[static_cast<std::size_t>(a)], a) <
             std::make_pair(freed_at_[static_cast<std::size_t>(b)], b);
    });
    for (int d : cands) {
      if (!feasible(run, step, d)) continue;
      claim(rank, step, d, now);
      return true;
    }
    return false;
  }

  void claim(std::size_t rank, std::size_t step, int d, std::int64_t now) {
    auto& run = runs_[rank];
    const auto& op = run.expanded.operations[step];
    run.device[step] = d;
    ++active_[static_cast<std::size_t>(d)];

    std::int64_t inputs_ready = now;
    for (std::size_t p : run.problem->producers(step)) {
      std::int64_t cursor = now;
      for (const Hop& hop : router_.route(run.device[p], d)) {
        std::int64_t& free_at = robot_free_[hop.robot];
        const std::int64_t begin = std::max(cursor, free_at);
        const std::int64_t end = begin + hop.transport_us;
        free_at = end;
        cursor = end;
        transfers_.push_back({hop.robot, begin, end, run.source->name, op.id, reach_.ids()[static_cast<std::size_t>(hop.from)],
                              reach_.ids()[static_cast<std::size_t>(hop.to)]});
      }
      inputs_ready = std::max(inputs_ready, cursor);
    }
    const double dur_s = op.duration_s ? *op.duration_s : cat_.duration_for(*types_[static_cast<std::size_t>(d)], op.op_type);
    const std::int64_t dur = std::max<std::int64_t>(1, to_microseconds(dur_s));
    run.start_us[step] = inputs_ready;
    run.pop_us[step] = inputs_ready + dur;
    running_.push({run.pop_us[step], rank, step});
  }

  ScheduleTrace assemble() const {
    ScheduleTrace tr;
    tr.devices = slots_;
    struct Keyed {
      TraceEvent e;
      std::size_t rank, step;
    };
    std::vector<Keyed> events;
    for (std::size_t r = 0; r < runs_.size(); ++r) {
      const auto& run = runs_[r];
      for (std::size_t i = 0; i < run.expanded.operations.size(); ++i) {
        const std::string& dev = reach_.ids()[static_cast<std::size_t>(run.device[i])];
        const std::string& id = run.expanded.operations[i].id;
        tr.ops.push_back({run.source->name, id, run.classes[i], dev, run.push_us[i], run.start_us[i], run.pop_us[i]});
        events.push_back({{run.push_us[i], EventKind::push, run.source->name, id, run.classes[i], dev}, r, i});
        events.push_back({{run.start_us[i], EventKind::start, run.source->name, id, run.classes[i], dev}, r, i});
        events.push_back({{run.pop_us[i], EventKind::pop, run.source->name, id, run.classes[i], dev}, r, i});
        tr.horizon_us = std::max(tr.horizon_us, run.pop_us[i]);
      }
    }
    std::sort(events.begin(), events.end(), [](const Keyed& a, const Keyed& b) {
      return std::tie(a.e.t_us, a.e.kind, a.rank, a.step) < std::tie(b.e.t_us, b.e.kind, b.rank, b.step);
    });
    for (auto& k : events) tr.events.push_back(std::move(k.e));
    tr.transfers = transfers_;
    std::sort(tr.transfers.begin(), tr.transfers.end(), [](const Transfer& a, const Transfer& b) {
      return std::tie(a.begin_us, a.robot, a.protocol, a.op) < std::tie(b.begin_us, b.robot, b.protocol, b.op);
    });
    return tr;
  }

  const Layout& layout_;
  const Catalog& cat_;
  SimulationOptions opt_;
  Reachability reach_;
  Router router_;
  std::vector<const DeviceType*> types_;
  std::vector<DeviceSlot> slots_;
  std::vector<int> active_;
  std::vector<std::int64_t> freed_at_;
  std::map<std::string, std::int64_t> robot_free_;
  std::vector<ProtocolRun> runs_;
  std::set<OpKey> ready_;
  std::priority_queue<OpKey, std::vector<OpKey>, std::greater<>> running_;
  std::vector<Transfer> transfers_;
  std::size_t next_admit_ = 0;
  std::size_t in_flight_ = 0;
};

}  // namespace

ScheduleTrace simulate(const Layout& l, const Corpus& protocols, const Catalog& cat, const SimulationOptions& opt) {
  check_types(l, cat);
  auto report = check_executable(protocols, l, cat, opt.exec);
  if (!report.verdict) {
    const auto& f = report.failures.front();
    throw InfeasibleError("cannot simulate: protocol '" + f.protocol + "' is not executable (" + to_string(f.cause) +
                          ": " + f.detail + ")");
  }
  return Simulator(l, protocols, cat, opt).run();
}

// ---- metrics --------------------------------------------------------------

double makespan(const ScheduleTrace& tr) { return to_seconds(tr.horizon_us); }

double throughput(const ScheduleTrace& tr, double window_s) {
  if (!(window_s > 0)) throw ConfigError("throughput window must be > 0");
  const std::int64_t w = to_microseconds(window_s);
  double n = 0;
  for (const auto& e : tr.events)
    if (e.kind != EventKind::start && e.t_us >= 0 && e.t_us <= w) ++n;
  return n;
}

double response_time(const ScheduleTrace& tr) {
  if (tr.ops.empty()) return 0.0;
  std::int64_t total = 0;
  for (const auto& op : tr.ops) total += op.pop_us - op.push_us;
  return to_seconds(total) / static_cast<double>(tr.ops.size());
}

double resource_utilization(const ScheduleTrace& tr, double window_s) {
  if (!(window_s > 0)) throw ConfigError("utilization window must be > 0");
  if (tr.devices.empty()) return 0.0;
  const std::int64_t w = to_microseconds(window_s);
  std::map<std::string, std::int64_t> busy;
  for (const auto& op : tr.ops) {
    const std::int64_t lo = std::max<std::int64_t>(op.start_us, 0), hi = std::min(op.pop_us, w);
    if (hi > lo) busy[op.device] += hi - lo;
  }
  double sum = 0;
  for (const auto& d : tr.devices)
    sum += static_cast<double>(busy[d.id]) / (static_cast<double>(d.capacity) * static_cast<double>(w));
  return sum / static_cast<double>(tr.devices.size());
}

double empty_active_fraction(const ScheduleTrace& tr, double window_s) {
  if (!(window_s > 0)) throw ConfigError("window must be > 0");
  const std::int64_t w = to_microseconds(window_s);
  std::map<std::string, std::vector<std::pair<std::int64_t, int>>> sweeps;  // class -> (t, +1/-1)
  for (const auto& op : tr.ops) {
    auto& s = sweeps[op.op_class];
    s.push_back({op.start_us, +1});
    s.push_back({op.pop_us, -1});
  }
  if (sweeps.empty()) return 1.0;
  double total = 0;
  for (auto& [cls, s] : sweeps) {
    std::sort(s.begin(), s.end());
    std::int64_t empty = 0, last = 0;
    int active = 0;
    for (const auto& [t, delta] : s) {
      const std::int64_t tt = std::min(std::max<std::int64_t>(t, 0), w);
      if (active == 0) empty += tt - last;
      last = tt;
      active += delta;
    }
    if (active == 0) empty += w - last;
    total += static_cast<double>(empty) / static_cast<double>(w);
  }
  return total / static_cast<double>(sweeps.size());
}

std::string trace_to_jsonl(const ScheduleTrace& tr) {
  std::string out;
  for (const auto& e : tr.events) {
    nlohmann::ordered_json j = {{"t_us", e.t_us},       {"kind", to_string(e.kind)}, {"protocol", e.protocol},
                                {"op", e.op},           {"class", e.op_class},       {"resource", e.resource}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---- minimal layout ---------------------------------------------------------

Layout minimal_layout(const Corpus& c, const Catalog& cat) {
  const DependencyMatrix m = profile_capabilities(c, cat);
  Layout l;
  std::map<std::string, std::string> instance_of_type;
  std::vector<std::string> device_of(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const DeviceType* d = cat.cheapest_capable(m.op_types[i]);
    if (!d) throw InfeasibleError("no device type offers capability '" + m.op_types[i] + "'");
    auto it = instance_of_type.find(d->name);
    if (it == instance_of_type.end()) {
      std::string id = l.fresh_id(d->name);
      l.add_device(id, d->name);
      it = instance_of_type.emplace(d->name, id).first;
    }
    device_of[i] = it->second;
  }
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m.at(i, j) > 0 && device_of[i] != device_of[j] && !l.has_connection(device_of[i], device_of[j], Rho::grouped))
        l.add_connection({device_of[i], device_of[j], Rho::grouped, ""});
  return l;
}

// ---- representatives --------------------------------------------------------

Corpus sample_representatives(const Corpus& c, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m > c.size())
    throw ConfigError("sample_representatives: m=" + std::to_string(m) + " outside [1, " + std::to_string(c.size()) + "]");
  std::vector<const Protocol*> ps;
  for (const auto& p : c.protocols) ps.push_back(&p);
  std::sort(ps.begin(), ps.end(), [](const Protocol* a, const Protocol* b) { return a->name < b->name; });
  const std::size_t n = ps.size();

  std::set<std::string> type_set;
  for (const Protocol* p : ps)
    for (const auto& op : p->operations) type_set.insert(op.op_type);
  const std::vector<std::string> types(type_set.begin(), type_set.end());
  std::vector<std::vector<double>> feat(n, std::vector<double>(types.size(), 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& op : ps[i]->operations) {
      auto k = static_cast<std::size_t>(std::lower_bound(types.begin(), types.end(), op.op_type) - types.begin());
      feat[i][k] += 1.0;
    }
    if (!ps[i]->operations.empty())
      for (auto& x : feat[i]) x /= static_cast<double>(ps[i]->operations.size());
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 0;
      for (std::size_t k = 0; k < types.size(); ++k) d += std::abs(feat[i][k] - feat[j][k]);
      dist[i * n + j] = dist[j * n + i] = d;
    }

  auto total_cost = [&](const std::vector<std::size_t>& medoids) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t md : medoids) best = std::min(best, dist[i * n + md]);
      s += best;
    }
    return s;
  };
  auto sorted = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> medoids = sorted({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m)});
  double current = total_cost(medoids);

  // Swap refinement on (cost, medoid indices); indices follow name order.
  constexpr double eps = 1e-12;
  for (bool improved = true; improved;) {
    improved = false;
    std::vector<std::size_t> best_set = medoids;
    double best_cost = current;
    std::vector<bool> is_medoid(n, false);
    for (std::size_t md : medoids) is_medoid[md] = true;
    for (std::size_t slot = 0; slot < m; ++slot)
      for (std::size_t h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        std::vector<std::size_t> trial = medoids;
        trial[slot] = h;
        trial = sorted(std::move(trial));
        const double cost = total_cost(trial);
        if (cost < best_cost - eps || (std::abs(cost - best_cost) <= eps && trial < best_set)) {
          best_cost = cost;
          best_set = std::move(trial);
        }
      }
    if (best_set != medoids) {
      medoids = std::move(best_set);
      current = best_cost;
      improved = true;
    }
  }

  Corpus out;
  out.role = CorpusRole::schedule_subset;
  for (std::size_t md : medoids) out.protocols.push_back(*ps[md]);
  return out;
}

}  // namespace groundr
