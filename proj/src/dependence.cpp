#include "groundr/dependence.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "groundr/assignment.hpp"

namespace groundr {

std::vector<std::vector<std::size_t>> DependenceGraph::producers() const {
  std::vector<std::vector<std::size_t>> out(size());
  for (const auto& e : edges) out[e.consumer].push_back(e.producer);
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

std::vector<std::vector<std::size_t>> DependenceGraph::consumers() const {
  std::vector<std::vector<std::size_t>> out(size());
  for (const auto& e : edges) out[e.producer].push_back(e.consumer);
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

bool DependenceGraph::is_acyclic() const {
  return std::all_of(edges.begin(), edges.end(), [](const DependenceEdge& e) { return e.producer < e.consumer; });
}

DependenceGraph build_pdg(const Protocol& p) {
  DependenceGraph g;
  g.protocol = p.name;
  std::map<std::string, std::size_t> last_producer;
  for (std::size_t i = 0; i < p.operations.size(); ++i) {
    const auto& op = p.operations[i];
    g.op_ids.push_back(op.id);
    g.op_types.push_back(op.op_type);
    for (const auto& r : op.preconditions) {
      auto it = last_producer.find(r);
      if (it != last_producer.end()) g.edges.push_back({it->second, i, r});
    }
    for (const auto& r : op.postconditions) last_producer[r] = i;
  }
  return g;
}

Protocol expand_protocol(const Protocol& p, const Catalog& cat) {
  Protocol out{p.name, {}};
  for (const auto& op : p.operations) {
    auto caps = cat.expand_operation(op.op_type);
    if (caps.size() == 1) {
      Operation step = op;
      step.op_type = caps.front();
      out.operations.push_back(std::move(step));
      continue;
    }
    const std::size_t n = caps.size();
    for (std::size_t k = 0; k < n; ++k) {
      Operation step;
      step.id = op.id + "." + std::to_string(k + 1);
      step.op_type = caps[k];
      step.parameters = op.parameters;
      step.preconditions = k == 0 ? op.preconditions : std::vector<std::string>{op.id + "~" + std::to_string(k)};
      step.postconditions = k + 1 == n ? op.postconditions : std::vector<std::string>{op.id + "~" + std::to_string(k + 1)};
      if (op.duration_s) step.duration_s = *op.duration_s / static_cast<double>(n);
      out.operations.push_back(std::move(step));
    }
  }
  return out;
}

Corpus expand_corpus(const Corpus& c, const Catalog& cat) {
  Corpus out;
  out.role = c.role;
  for (const auto& p : c.protocols) out.protocols.push_back(expand_protocol(p, cat));
  return out;
}

// ---- profiling ------------------------------------------------------------

double DependencyMatrix::at(std::string_view from, std::string_view to) const {
  int i = index_of(from), j = index_of(to);
  if (i < 0 || j < 0) return 0.0;
  return at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

int DependencyMatrix::index_of(std::string_view op_type) const {
  auto it = std::lower_bound(op_types.begin(), op_types.end(), op_type);
  if (it == op_types.end() || *it != op_type) return -1;
  return static_cast<int>(it - op_types.begin());
}

DependencyMatrix profile_dependencies(const Corpus& c) {
  std::set<std::string> types;
  for (const auto& p : c.protocols)
    for (const auto& op : p.operations) types.insert(op.op_type);
  DependencyMatrix m;
  m.op_types.assign(types.begin(), types.end());
  const std::size_t n = m.op_types.size();
  m.occurrences.assign(n, 0);
  std::vector<std::size_t> hits(n * n, 0);
  for (const auto& p : c.protocols) {
    auto g = build_pdg(p);
    auto consumers = g.consumers();
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto ti = static_cast<std::size_t>(m.index_of(g.op_types[i]));
      ++m.occurrences[ti];
      std::set<std::size_t> targets;
      for (std::size_t c2 : consumers[i]) targets.insert(static_cast<std::size_t>(m.index_of(g.op_types[c2])));
      for (std::size_t tj : targets) ++hits[ti * n + tj];
    }
  }
  m.entries.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (m.occurrences[i] > 0)
        m.entries[i * n + j] = static_cast<double>(hits[i * n + j]) / static_cast<double>(m.occurrences[i]);
  return m;
}

DependencyMatrix profile_capabilities(const Corpus& c, const Catalog& cat) {
  return profile_dependencies(expand_corpus(c, cat));
}

std::string matrix_to_csv(const DependencyMatrix& m) {
  std::ostringstream out;
  out << "op_type";
  for (const auto& t : m.op_types) out << ',' << t;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.op_types[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6f", m.at(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json matrix_to_json(const DependencyMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return {{"op_types", m.op_types}, {"occurrences", m.occurrences}, {"matrix", rows}};
}

// ---- executability --------------------------------------------------------

std::string to_string(FailureCause cause) {
  switch (cause) {
    case FailureCause::missing_capability: return "missing-capability";
    case FailureCause::no_connecting_path: return "no-connecting-path";
    case FailureCause::no_consistent_assignment: return "no-consistent-assignment";
  }
  return "?";
}

namespace {

struct ProtocolVerdict {
  std::optional<ExecutabilityFailure> failure;
  std::vector<int> assignment;
  bool heuristic = false;
};

ProtocolVerdict decide(const Protocol& p, const Layout& l, const Catalog& cat, const Reachability& reach,
                       const ExecOptions& opt) {
  ProtocolVerdict v;
  StepProblem prob(expand_protocol(p, cat), l, cat, reach);
  if ((v.failure = prob.precheck())) return v;
  auto no_assignment = [&] {
    return ExecutabilityFailure{p.name, FailureCause::no_consistent_assignment,
                                "no assignment satisfies every dependence edge", ""};
  };
  bool exact = prob.size() <= opt.exact_max_steps && reach.size() <= opt.exact_max_devices;
  if (exact) {
    switch (prob.solve(v.assignment, opt.node_budget)) {
      case StepProblem::Status::solved: return v;
      case StepProblem::Status::infeasible: v.failure = no_assignment(); return v;
      case StepProblem::Status::budget_exhausted: break;
    }
  }
  v.heuristic = true;
  v.assignment.assign(prob.size(), -1);
  if (!prob.greedy(v.assignment, opt.seed, opt.restarts)) v.failure = no_assignment();
  return v;
}

}  // namespace

ExecutabilityReport check_executable(const Corpus& c, const Layout& l, const Catalog& cat, const ExecOptions& opt) {
  check_types(l, cat);
  Reachability reach(l);
  std::vector<const Protocol*> ordered;
  for (const auto& p : c.protocols) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const Protocol* a, const Protocol* b) { return a->name < b->name; });

  ExecutabilityReport report;
  for (const Protocol* p : ordered) {
    ProtocolVerdict v = decide(*p, l, cat, reach, opt);
    report.heuristic = report.heuristic || v.heuristic;
    if (v.failure) {
      report.failures.push_back(std::move(*v.failure));
      continue;
    }
    std::vector<std::string> ids;
    for (int d : v.assignment) ids.push_back(reach.ids()[static_cast<std::size_t>(d)]);
    report.assignments.emplace(p->name, std::move(ids));
  }
  report.verdict = report.failures.empty();
  return report;
}

bool is_executable(const Protocol& p, const Layout& l, const Catalog& cat, const ExecOptions& opt) {
  Reachability reach(l);
  return !decide(p, l, cat, reach, opt).failure;
}

nlohmann::json report_to_json(const ExecutabilityReport& r) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"protocol", f.protocol},
                        {"cause", to_string(f.cause)},
                        {"detail", f.detail},
                        {"operation", f.operation}});
  return {{"verdict", r.verdict}, {"heuristic", r.heuristic}, {"failures", failures}, {"assignments", r.assignments}};
}

}  // namespace groundr
