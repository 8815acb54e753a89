#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "groundr/pareto.hpp"
#include "groundr/sweep.hpp"
#include "oracles.hpp"

using namespace groundr;

namespace {

const std::vector<Direction> kMax2{Direction::maximize, Direction::maximize};

Candidate make(std::vector<double> v, std::vector<Direction> d, nlohmann::json config = nlohmann::json::object()) {
  Candidate c;
  c.config = std::move(config);
  c.values = std::move(v);
  c.directions = std::move(d);
  for (std::size_t i = 0; i < c.values.size(); ++i) c.names.push_back("f" + std::to_string(i));
  return c;
}

std::vector<Candidate> random_set(std::mt19937_64& rng, std::size_t n, const std::vector<Direction>& d) {
  std::uniform_int_distribution<int> coarse(0, 9);
  std::uniform_real_distribution<double> fine(0.0, 1.0);
  const bool grid = rng() % 2;
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v;
    for (std::size_t j = 0; j < d.size(); ++j) v.push_back(grid ? coarse(rng) : fine(rng));
    out.push_back(make(v, d, {{"i", i}}));
  }
  return out;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_SUITE("pareto") {
  TEST_CASE("dominance examples") {
    CHECK(dominates({3, 1}, {2, 1}, kMax2));
    CHECK_FALSE(dominates({1, 2}, {2, 1}, kMax2));
    CHECK_FALSE(dominates({2, 1}, {1, 2}, kMax2));
    CHECK_FALSE(dominates({2, 2}, {2, 2}, kMax2));
    const std::vector<Direction> mixed{Direction::maximize, Direction::minimize};
    CHECK(dominates({3, 1}, {3, 2}, mixed));
    CHECK_FALSE(dominates({3, 2}, {3, 1}, mixed));
  }

  TEST_CASE("dominance needs a shared schema") {
    const Candidate a = make({1, 2}, kMax2);
    Candidate b = make({1, 2}, {Direction::maximize, Direction::minimize});
    CHECK_THROWS_AS(dominates(a, b), ConfigError);
    b = make({1, 2, 3}, {Direction::maximize, Direction::maximize, Direction::maximize});
    CHECK_THROWS_AS(dominates(a, b), ConfigError);
  }

  TEST_CASE("front examples") {
    CHECK(pareto_indices({make({1, 2}, kMax2), make({2, 1}, kMax2)}) == std::vector<std::size_t>{0, 1});
    CHECK(pareto_indices({make({1, 2}, kMax2), make({2, 1}, kMax2), make({2, 2}, kMax2)}) ==
          std::vector<std::size_t>{2});
    CHECK(pareto_indices({make({1, 1}, kMax2), make({1, 1}, kMax2)}) == std::vector<std::size_t>{0, 1});
    CHECK_THROWS_AS(pareto_indices({}), ConfigError);
  }

  TEST_CASE("infeasible candidates never enter the front") {
    std::vector<Candidate> cs{make({1, 1}, kMax2), make({5, 5}, kMax2)};
    cs[1].feasible = false;
    CHECK(pareto_indices(cs) == std::vector<std::size_t>{0});
    CHECK(pareto_front(cs).size() == 1);
  }

  TEST_CASE("front equals the brute-force filter") {
    std::mt19937_64 rng(501);
    for (int i = 0; i < 40; ++i) {
      std::vector<Direction> d;
      const std::size_t dims = 2 + i % 4;
      for (std::size_t j = 0; j < dims; ++j) d.push_back(rng() % 2 ? Direction::maximize : Direction::minimize);
      const auto cs = random_set(rng, 1 + rng() % 300, d);
      std::vector<std::vector<double>> vs;
      for (const auto& c : cs) vs.push_back(c.values);
      const auto front = pareto_indices(cs);
      REQUIRE(as_set(front) == oracle::pareto(vs, d));
      for (std::size_t a : front)
        for (std::size_t b : front) CHECK_FALSE(dominates(cs[a], cs[b]));
    }
  }

  TEST_CASE("front membership ignores input order") {
    std::mt19937_64 rng(503);
    const std::vector<Direction> d{Direction::maximize, Direction::minimize, Direction::maximize};
    auto cs = random_set(rng, 120, d);
    std::set<std::string> before;
    for (const auto& c : pareto_front(cs)) before.insert(c.config.dump());
    std::shuffle(cs.begin(), cs.end(), rng);
    std::set<std::string> after;
    for (const auto& c : pareto_front(cs)) after.insert(c.config.dump());
    CHECK(before == after);
  }

  TEST_CASE("selection examples") {
    const std::vector<Candidate> f{make({0, 1}, kMax2, {{"k", 2}}), make({1, 0}, kMax2, {{"k", 1}})};
    CHECK(select_by_preference(f, {1, 0}) == 1);
    CHECK(select_by_preference(f, {0, 1}) == 0);
    CHECK(select_by_preference(f, {1, 1}) == 1);  // tie, {"k":1} sorts first
    CHECK(select_by_preference({make({3, 3}, kMax2)}, {1, 1}) == 0);
    CHECK_THROWS_AS(select_by_preference({}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(select_by_preference(f, {0, 0}), ConfigError);
    CHECK_THROWS_AS(select_by_preference(f, {-1, 2}), ConfigError);
    CHECK_THROWS_AS(select_by_preference(f, {1}), ConfigError);
  }

  TEST_CASE("selection respects directions") {
    const std::vector<Direction> d{Direction::minimize, Direction::maximize};
    const std::vector<Candidate> f{make({5, 1}, d, {{"i", 0}}), make({1, 0}, d, {{"i", 1}})};
    CHECK(select_by_preference(f, {1, 0}) == 1);
    CHECK(select_by_preference(f, {0, 1}) == 0);
  }

  TEST_CASE("selection is invariant under positive rescaling of one objective") {
    std::mt19937_64 rng(509);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
      const std::vector<Direction> d{Direction::maximize, Direction::minimize, Direction::maximize};
      auto cs = random_set(rng, 2 + rng() % 20, d);
      const std::vector<double> w{u(rng), u(rng), u(rng)};
      const std::size_t pick = select_by_preference(cs, w);
      const std::size_t j = rng() % 3;
      const double s = u(rng);
      for (auto& c : cs) c.values[j] *= s;
      CHECK(select_by_preference(cs, w) == pick);
    }
  }

  TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
    CHECK(std::isnan(spearman({1}, {1})));
    CHECK(spearman({1, 2, 2, 3}, {1, 2, 2, 3}) == doctest::Approx(1.0));
    std::mt19937_64 rng(521);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      std::vector<double> x, y;
      for (std::size_t k = 0; k < 3 + static_cast<std::size_t>(i % 20); ++k) {
        x.push_back(u(rng));
        y.push_back(u(rng) + 0.5 * x.back());
      }
      CHECK(spearman(x, y) == doctest::Approx(oracle::spearman_no_ties(x, y)).epsilon(1e-12));
    }
  }

  TEST_CASE("candidate json round trip keeps objective order") {
    Candidate c = make({3, 1.5}, {Direction::maximize, Direction::minimize}, {{"k", 2}, {"l", 1}});
    c.names = {"zeta", "alpha"};
    c.auxiliary = {{"note", "x"}};
    c.layout_path = "layouts/k2_l1.json";
    c.layout = fixtures::minimal_abc();
    const auto j = candidate_to_json(c);
    CHECK(j["objectives"][0]["name"] == "zeta");
    CHECK(j["objectives"][1]["direction"] == "min");
    const Candidate back = candidate_from_json(j);
    CHECK(back.names == c.names);
    CHECK(back.values == c.values);
    CHECK(back.directions == c.directions);
    CHECK(back.config == c.config);
    CHECK(back.layout == c.layout);
    CHECK(candidates_from_json(candidates_to_json({c, c})).size() == 2);
    CHECK_THROWS_AS(direction_from_string("up"), ConfigError);
  }

  TEST_CASE("projection csv") {
    Candidate a = make({1, 2}, kMax2, {{"k", 1}, {"l", 2}});
    Candidate b = make({3, 4}, kMax2, {{"k", 3}});
    b.feasible = false;
    const std::string csv = projection_csv({a, b}, "f0", "f1");
    CHECK(csv.rfind("config,f0,f1\n", 0) == 0);
    CHECK(csv.find("3,4") == std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK_THROWS_AS(projection_csv({a}, "f0", "nope"), ConfigError);
  }

  TEST_CASE("executability sweep over the hand corpus") {
    const Catalog cat = fixtures::sample_catalog();
    const Corpus h = fixtures::hand_corpus();
    ExecSweep one;
    one.k_values = {1};
    one.l_values = {1};
    const auto single = sweep_exec(h, h, h, cat, one);
    REQUIRE(single.size() == 1);
    CHECK(single[0].layout->robots().empty());
    CHECK(single[0].values[1] == 3);  // three pipelines

    ExecSweep grid;
    grid.k_values = {1, 2, 3};
    grid.l_values = {1, 2};
    const auto cs = sweep_exec(h, h, h, cat, grid);
    bool split = false;
    for (const auto& c : cs)
      split = split || (c.layout->robots().size() == 1 && c.layout->has_connection("D_B.1", "D_C.1", Rho::grouped) &&
                        c.values[1] == 1);
    CHECK(split);
    for (const auto& c : cs) {
      CHECK(c.values.size() == 5);
      CHECK(c.feasible);
    }
  }

  TEST_CASE("executability sweep with an uncoverable capability") {
    Corpus c;
    c.protocols = {parse_protocol("protocol z\n op Zap out r\n op A in r\nend")};
    CHECK_THROWS_AS(sweep_exec(c, c, c, fixtures::sample_catalog()), InfeasibleError);
  }

  TEST_CASE("efficiency sweep") {
    const Catalog cat = fixtures::sample_catalog();
    EffSweep only_min;
    only_min.fractions = {0};
    const auto m = sweep_eff(fixtures::two_p1(), cat, only_min);
    REQUIRE(m.size() == 1);
    CHECK(*m[0].layout == minimal_layout(fixtures::two_p1(), cat));

    EffSweep two;
    two.fractions = {0, 1};
    two.growth.sigma = 2;
    const auto cs = sweep_eff(fixtures::two_p1(), cat, two);
    REQUIRE(cs.size() == 2);
    CHECK(cs[1].layout->devices().size() > cs[0].layout->devices().size());

    EffSweep broke;
    broke.eff.cost_max = 0;
    CHECK_THROWS_AS(sweep_eff(fixtures::two_p1(), cat, broke), InfeasibleError);
  }
}
