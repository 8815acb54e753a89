#include "groundr/objectives.hpp"

#include <algorithm>
#include <set>

#include "groundr/assignment.hpp"

namespace groundr {

const std::vector<std::string>& ExecObjectiveVector::names() {
  static const std::vector<std::string> n{"flexibility", "reliability", "scalability", "system_complexity", "cost"};
  return n;
}

const std::vector<Direction>& ExecObjectiveVector::directions() {
  static const std::vector<Direction> d{Direction::maximize, Direction::maximize, Direction::minimize,
                                        Direction::minimize, Direction::minimize};
  return d;
}

namespace {

void require_executable(const Layout& l, const Corpus& target, const Catalog& cat) {
  auto report = check_executable(target, l, cat);
  if (!report.verdict) {
    const auto& f = report.failures.front();
    throw InfeasibleError("layout cannot execute the target corpus: protocol '" + f.protocol + "' fails with " +
                          to_string(f.cause) + " (" + f.detail + ")");
  }
}

}  // namespace

double flexibility(const Layout& l, const Corpus& target, const Corpus& universe, const Catalog& cat) {
  require_executable(l, target, cat);
  std::set<std::string> in_target;
  for (const auto& p : target.protocols) in_target.insert(p.name);
  Corpus extras;
  for (const auto& p : universe.protocols)
    if (!in_target.count(p.name)) extras.protocols.push_back(p);
  auto report = check_executable(extras, l, cat);
  return static_cast<double>(extras.size() - report.failures.size());
}

double reliability(const Layout& l) { return static_cast<double>(l.grouped_count()); }

double pipeline_fraction(const Layout& l, const Corpus& target, const Catalog& cat) {
  auto report = check_executable(target, l, cat);
  Reachability reach(l);
  std::size_t edges = 0, piped = 0;
  for (const auto& p : target.protocols) {
    auto it = report.assignments.find(p.name);
    if (it == report.assignments.end()) continue;
    auto g = build_pdg(expand_protocol(p, cat));
    for (const auto& e : g.edges) {
      ++edges;
      int a = reach.index(it->second[e.producer]), b = reach.index(it->second[e.consumer]);
      piped += reach.piped(a, b);
    }
  }
  return edges == 0 ? 1.0 : static_cast<double>(piped) / static_cast<double>(edges);
}

namespace {

// Assigns every step, preferring devices that keep the most incoming
// dependence edges reachable; unreachable edges remain for repair.
std::vector<int> repair_assignment(const StepProblem& prob) {
  std::vector<int> a(prob.size(), -1);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    int best = -1;
    std::size_t best_broken = 0;
    for (int d : prob.domain(i)) {
      std::size_t broken = 0;
      for (std::size_t p : prob.producers(i)) broken += !prob.reach().reachable(a[p], d);
      if (best < 0 || broken < best_broken) {
        best = d;
        best_broken = broken;
      }
    }
    a[i] = best;
  }
  return a;
}

}  // namespace

Augmentation augment_for(const Layout& l, const Corpus& scaling, const Catalog& cat) {
  Augmentation out{l, {}};
  auto apply = [&](EditOp e) {
    out.layout = apply_edit(out.layout, e);
    out.edits.push_back(std::move(e));
  };

  std::vector<const Protocol*> ordered;
  for (const auto& p : scaling.protocols) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const Protocol* a, const Protocol* b) { return a->name < b->name; });

  for (const Protocol* p : ordered) {
    if (is_executable(*p, out.layout, cat)) continue;
    const Protocol expanded = expand_protocol(*p, cat);

    // Missing capabilities first.
    std::set<std::string> present;
    for (const auto& [id, type] : out.layout.devices())
      for (const auto& c : cat.device(type)->capabilities) present.insert(c);
    for (const auto& op : expanded.operations) {
      if (present.count(op.op_type)) continue;
      const DeviceType* d = cat.cheapest_capable(op.op_type);
      if (!d) throw InfeasibleError("cannot scale: no device type offers capability '" + op.op_type + "'");
      apply(EditOp::insert_device(out.layout.fresh_id(d->name), d->name));
      for (const auto& c : d->capabilities) present.insert(c);
    }
    if (is_executable(*p, out.layout, cat)) continue;

    // Then connections, one unreachable dependence edge at a time.
    Reachability reach(out.layout);
    StepProblem prob(expanded, out.layout, cat, reach);
    std::vector<int> a = repair_assignment(prob);
    std::vector<std::string> ids;
    for (int d : a) ids.push_back(reach.ids()[static_cast<std::size_t>(d)]);
    for (const auto& e : prob.pdg().edges) {
      const std::string& from = ids[e.producer];
      const std::string& to = ids[e.consumer];
      Reachability now(out.layout);
      if (now.reachable(now.index(from), now.index(to))) continue;
      if (out.layout.robots().empty()) {
        const RobotType* r = cat.cheapest_robot();
        if (!r) throw InfeasibleError("cannot scale: connections need a robot but the catalog has none");
        apply(EditOp::insert_robot(out.layout.fresh_id(r->name), r->name));
      }
      const std::string& robot = out.layout.robots().begin()->first;
      apply(EditOp::insert_connection({from, to, Rho::associated, robot}));
    }
  }
  return out;
}

double scalability(const Layout& l, const Corpus& scaling, const Catalog& cat) {
  return static_cast<double>(augment_for(l, scaling, cat).edits.size());
}

ExecObjectiveVector evaluate_exec(const Layout& l, const Corpus& target, const Corpus& universe,
                                  const Corpus& scaling, const Catalog& cat) {
  ExecObjectiveVector v;
  v.flexibility = flexibility(l, target, universe, cat);  // also enforces Executable(target, l)
  v.reliability = reliability(l);
  v.scalability = scalability(l, scaling, cat);
  v.system_complexity = system_complexity(l, cat);
  v.cost = cost(l, cat);
  v.pipeline_fraction = pipeline_fraction(l, target, cat);
  return v;
}

}  // namespace groundr
