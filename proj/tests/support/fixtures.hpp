#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "groundr/catalog.hpp"
#include "groundr/dsl.hpp"
#include "groundr/layout.hpp"
#include "groundr/partition.hpp"

namespace fixtures {

inline std::filesystem::path dir() { return GROUNDR_FIXTURES; }

inline groundr::Catalog sample_catalog() { return groundr::load_catalog(dir() / "sample_catalog.json"); }

inline groundr::Catalog sample_catalog(double pipeline_unit_price) {
  const auto c = sample_catalog();
  return groundr::Catalog(c.devices(), c.robots(), c.expansions(), pipeline_unit_price);
}

/// H = {P1: A -> B -> C, P2: A -> C}.
inline groundr::Corpus hand_corpus() { return groundr::parse_corpus(dir() / "hand"); }

inline groundr::Protocol p1(const std::string& name = "P1") {
  return groundr::parse_protocol("protocol " + name + "\n op A out r1\n op B in r1 out r2\n op C in r2 out r3\nend\n");
}

inline groundr::Corpus two_p1() {
  groundr::Corpus c;
  c.protocols = {p1("P1a"), p1("P1b")};
  return c;
}

/// D_A, D_B, D_C joined by grouped A->B, A->C, B->C.
inline groundr::Layout minimal_abc() {
  groundr::Layout l;
  l.add_device("D_A.1", "D_A");
  l.add_device("D_B.1", "D_B");
  l.add_device("D_C.1", "D_C");
  l.add_connection({"D_A.1", "D_B.1", groundr::Rho::grouped, ""});
  l.add_connection({"D_A.1", "D_C.1", groundr::Rho::grouped, ""});
  l.add_connection({"D_B.1", "D_C.1", groundr::Rho::grouped, ""});
  return l;
}

inline groundr::WeightedGraph random_graph(std::mt19937_64& rng, std::size_t n, double zero_prob = 0.3) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
  groundr::WeightedGraph g(names);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (u(rng) >= zero_prob) g.set_weight(i, j, std::round(u(rng) * 20.0) / 4.0);
  return g;
}

/// Catalog over capabilities c0..c{n-1}; some types carry two capabilities.
inline groundr::Catalog random_catalog(std::mt19937_64& rng, std::size_t n_caps) {
  std::vector<groundr::DeviceType> devices;
  std::uniform_int_distribution<int> price(1, 50), dur(1, 30), coin(0, 1);
  for (std::size_t i = 0; i < n_caps; ++i) {
    groundr::DeviceType d;
    d.name = "T" + std::to_string(i);
    d.capabilities = {"c" + std::to_string(i)};
    if (coin(rng) && n_caps > 1) d.capabilities.push_back("c" + std::to_string((i + 1) % n_caps));
    std::sort(d.capabilities.begin(), d.capabilities.end());
    d.price = price(rng) * 100.0;
    d.capacity = 1 + coin(rng);
    for (const auto& c : d.capabilities) d.durations_s[c] = dur(rng);
    devices.push_back(d);
  }
  std::vector<groundr::RobotType> robots{{"R", 5000, 2, 3}};
  return groundr::Catalog(devices, robots, {}, 100);
}

/// Protocols over c0..c{n-1} with chained and stock inputs.
inline groundr::Corpus random_corpus(std::mt19937_64& rng, std::size_t n_caps, std::size_t n_protocols,
                                     std::size_t max_ops = 5) {
  groundr::Corpus c;
  std::uniform_int_distribution<std::size_t> cap(0, n_caps - 1), len(1, max_ops);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t p = 0; p < n_protocols; ++p) {
    groundr::Protocol proto;
    proto.name = "q" + std::to_string(p);
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
      groundr::Operation op;
      op.id = groundr::default_operation_id(i);
      op.op_type = "c" + std::to_string(cap(rng));
      if (i > 0 && u(rng) < 0.8) {
        std::uniform_int_distribution<std::size_t> from(0, i - 1);
        op.preconditions.push_back("x" + std::to_string(u(rng) < 0.7 ? i - 1 : from(rng)));
      } else {
        op.preconditions.push_back("stock" + std::to_string(i));
      }
      op.postconditions.push_back("x" + std::to_string(i));
      if (u(rng) < 0.3) op.duration_s = std::round(u(rng) * 20.0) + 1.0;
      proto.operations.push_back(op);
    }
    c.protocols.push_back(proto);
  }
  return c;
}

/// Random layout: one or two instances per catalog type, random grouped and
/// associated connections.
inline groundr::Layout random_layout(std::mt19937_64& rng, const groundr::Catalog& cat, double edge_prob = 0.3) {
  groundr::Layout l;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& d : cat.devices()) {
    l.add_device(l.fresh_id(d.name), d.name);
    if (u(rng) < 0.2) l.add_device(l.fresh_id(d.name), d.name);
  }
  std::vector<std::string> ids;
  for (const auto& [id, t] : l.devices()) ids.push_back(id);
  const bool robot = u(rng) < 0.5;
  if (robot) l.add_robot("R.1", "R");
  for (const auto& a : ids)
    for (const auto& b : ids) {
      if (a == b) continue;
      if (u(rng) < edge_prob) l.add_connection({a, b, groundr::Rho::grouped, ""});
      if (robot && u(rng) < edge_prob / 3 && !l.has_connection(a, b, groundr::Rho::associated))
        l.add_associated_link(a, b, "R.1");
    }
  return l;
}

}  // namespace fixtures
