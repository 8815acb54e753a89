#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "groundr/layout.hpp"

using namespace groundr;

namespace {

Catalog catalog_with_gamma(double gamma) {
  const Catalog base = fixtures::sample_catalog();
  return Catalog(base.devices(), {{"R", 5000, gamma, 0}}, {}, base.pipeline_unit_price());
}

Layout devices(std::size_t n) {
  Layout l;
  for (std::size_t i = 0; i < n; ++i) l.add_device("d" + std::to_string(i), "D_A");
  return l;
}

std::vector<EditOp> applicable_edits(const Layout& l) {
  std::vector<EditOp> out;
  out.push_back(EditOp::insert_device(l.fresh_id("D_C"), "D_C"));
  out.push_back(EditOp::insert_robot(l.fresh_id("R"), "R"));
  for (const auto& [id, type] : l.devices()) {
    out.push_back(EditOp::substitute_device(id, type, type == "D_A" ? "D_B" : "D_A"));
    bool isolated = true;
    for (const auto& c : l.connections()) isolated = isolated && c.from != id && c.to != id;
    if (isolated) out.push_back(EditOp::delete_device(id, type));
  }
  for (const auto& c : l.connections()) {
    out.push_back(EditOp::delete_connection(c));
    if (c.rho == Rho::grouped && !l.robots().empty()) {
      Connection assoc{c.from, c.to, Rho::associated, l.robots().begin()->first};
      if (!l.has_connection(c.from, c.to, Rho::associated)) out.push_back(EditOp::substitute_connection(c, assoc));
    }
  }
  for (const auto& [a, ta] : l.devices())
    for (const auto& [b, tb] : l.devices())
      if (a != b && !l.has_connection(a, b, Rho::grouped))
        out.push_back(EditOp::insert_connection({a, b, Rho::grouped, ""}));
  return out;
}

}  // namespace

TEST_SUITE("layout") {
  TEST_CASE("dof: three associated connections over four devices, gamma 2") {
    Layout l = devices(4);
    l.add_robot("r", "R");
    l.add_connection({"d0", "d1", Rho::associated, "r"});
    l.add_connection({"d2", "d3", Rho::associated, "r"});
    l.add_connection({"d0", "d2", Rho::associated, "r"});
    CHECK(dof("r", l, catalog_with_gamma(2)) == 9);
  }

  TEST_CASE("dof: idle robot with gamma 0") {
    Layout l = devices(2);
    l.add_robot("r", "R");
    CHECK(dof("r", l, catalog_with_gamma(0)) == 0);
  }

  TEST_CASE("dof: one link, gamma 1") {
    Layout l = devices(2);
    l.add_robot("r", "R");
    l.add_associated_link("d0", "d1", "r");
    CHECK(l.connection_count() == 2);
    CHECK(dof("r", l, catalog_with_gamma(1)) == 4);
  }

  TEST_CASE("dof rejects unknown robots and ignores other robots' links") {
    Layout l = devices(3);
    l.add_robot("r", "R");
    l.add_robot("s", "R");
    l.add_associated_link("d0", "d1", "r");
    l.add_associated_link("d1", "d2", "s");
    CHECK(dof("r", l, catalog_with_gamma(0)) == 3);
    CHECK_THROWS_AS(dof("nope", l, catalog_with_gamma(0)), LayoutError);
  }

  TEST_CASE("dof is invariant under device relabeling") {
    Layout a = devices(4), b;
    for (const char* id : {"w", "x", "y", "z"}) b.add_device(id, "D_B");
    a.add_robot("r", "R");
    b.add_robot("r", "R");
    a.add_associated_link("d0", "d1", "r");
    a.add_associated_link("d1", "d3", "r");
    b.add_associated_link("z", "y", "r");
    b.add_associated_link("y", "w", "r");
    CHECK(dof("r", a, catalog_with_gamma(2)) == dof("r", b, catalog_with_gamma(2)));
  }

  TEST_CASE("system complexity") {
    const Catalog cat = catalog_with_gamma(2);
    CHECK(system_complexity(Layout{}, cat) == 0);

    Layout five = devices(5);
    five.add_connection({"d0", "d1", Rho::grouped, ""});
    five.add_connection({"d1", "d2", Rho::grouped, ""});
    five.add_connection({"d2", "d3", Rho::grouped, ""});
    five.add_connection({"d3", "d4", Rho::grouped, ""});
    five.add_robot("r", "R");
    five.add_connection({"d0", "d1", Rho::associated, "r"});
    five.add_connection({"d2", "d3", Rho::associated, "r"});
    five.add_connection({"d0", "d2", Rho::associated, "r"});
    REQUIRE(dof("r", five, cat) == 9);
    CHECK(system_complexity(five, cat) == 18);

    Layout three = devices(3);
    three.add_connection({"d0", "d1", Rho::grouped, ""});
    three.add_connection({"d1", "d2", Rho::grouped, ""});
    CHECK(system_complexity(three, cat) == 5);
  }

  TEST_CASE("cost: devices, robot and pipelines") {
    // A price-free relay device carries the third pipeline, so the device
    // prices stay at 1000 + 500.
    const Catalog base = fixtures::sample_catalog();
    auto devs = base.devices();
    devs.push_back({"D_free", {"F"}, 0, 1, {}});
    const Catalog priced(devs, base.robots(), {}, 100);
    const Catalog free_pipes(devs, base.robots(), {}, 0);
    Layout l;
    l.add_device("a", "D_A");
    l.add_device("b", "D_B");
    l.add_device("f", "D_free");
    l.add_robot("r", "R");
    l.add_connection({"a", "b", Rho::grouped, ""});
    l.add_connection({"b", "f", Rho::grouped, ""});
    l.add_connection({"f", "a", Rho::grouped, ""});
    CHECK(cost(Layout{}, priced) == 0);
    CHECK(cost(l, priced) == 6800);
    CHECK(cost(l, free_pipes) == 6500);

    Layout unknown;
    unknown.add_device("x", "D_missing");
    CHECK_THROWS_AS(cost(unknown, priced), LayoutError);
    CHECK_THROWS_AS(check_types(unknown, priced), LayoutError);
  }

  TEST_CASE("complexity and cost grow strictly under device insertion") {
    const Catalog cat = fixtures::sample_catalog();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
      const Layout l = fixtures::random_layout(rng, cat);
      for (const auto& d : cat.devices()) {
        const Layout m = apply_edit(l, EditOp::insert_device(l.fresh_id(d.name), d.name));
        CHECK(system_complexity(m, cat) > system_complexity(l, cat));
        CHECK(cost(m, cat) > cost(l, cat));
      }
    }
  }

  TEST_CASE("insert into empty layout") {
    const Layout l = apply_edit(Layout{}, EditOp::insert_device("x", "D_X"));
    CHECK(l.devices().size() == 1);
  }

  TEST_CASE("deleting a connected device is an error") {
    const Layout l = fixtures::minimal_abc();
    CHECK_THROWS_AS(apply_edit(l, EditOp::delete_device("D_A.1", "D_A")), LayoutError);
    Layout robot = l;
    robot.add_robot("r", "R");
    robot.add_associated_link("D_A.1", "D_C.1", "r");
    CHECK_THROWS_AS(apply_edit(robot, EditOp::delete_robot("r", "R")), LayoutError);
  }

  TEST_CASE("substitution keeps id and connections") {
    const Layout l = fixtures::minimal_abc();
    const Layout m = apply_edit(l, EditOp::substitute_device("D_A.1", "D_A", "D_A2"));
    CHECK(m.devices().at("D_A.1") == "D_A2");
    CHECK(m.connections() == l.connections());
    CHECK(l.devices().at("D_A.1") == "D_A");  // original untouched
  }

  TEST_CASE("inapplicable edits are rejected") {
    const Layout l = fixtures::minimal_abc();
    CHECK_THROWS_AS(apply_edit(l, EditOp::insert_device("D_A.1", "D_A")), LayoutError);
    CHECK_THROWS_AS(apply_edit(l, EditOp::delete_device("ghost", "D_A")), LayoutError);
    CHECK_THROWS_AS(apply_edit(l, EditOp::substitute_device("D_A.1", "D_B", "D_C")), LayoutError);
    CHECK_THROWS_AS(apply_edit(l, EditOp::insert_connection({"D_A.1", "D_B.1", Rho::grouped, ""})), LayoutError);
    CHECK_THROWS_AS(apply_edit(l, EditOp::insert_connection({"D_A.1", "ghost", Rho::grouped, ""})), LayoutError);
    CHECK_THROWS_AS(apply_edit(l, EditOp::insert_connection({"D_B.1", "D_A.1", Rho::associated, "none"})),
                    LayoutError);
    CHECK_THROWS_AS(apply_edit(l, EditOp::insert_connection({"D_B.1", "D_A.1", Rho::unconnected, ""})), LayoutError);
  }

  TEST_CASE("apply then inverse restores the layout") {
    const Catalog cat = fixtures::sample_catalog();
    std::mt19937_64 rng(5);
    std::size_t checked = 0;
    for (int i = 0; i < 40; ++i) {
      const Layout l = fixtures::random_layout(rng, cat);
      for (const auto& e : applicable_edits(l)) {
        const Layout m = apply_edit(l, e);
        REQUIRE(apply_edit(m, inverse(e)) == l);
        CHECK_FALSE(describe(e).empty());
        ++checked;
      }
    }
    CHECK(checked > 100);
  }

  TEST_CASE("fresh ids") {
    Layout l;
    CHECK(l.fresh_id("D_A") == "D_A.1");
    l.add_device("D_A.1", "D_A");
    l.add_device("D_A.3", "D_A");
    CHECK(l.fresh_id("D_A") == "D_A.2");
  }

  TEST_CASE("reachability follows stored directions") {
    Layout l = fixtures::minimal_abc();
    const Reachability r(l);
    const int a = r.index("D_A.1"), b = r.index("D_B.1"), c = r.index("D_C.1");
    CHECK(r.reachable(a, c));
    CHECK_FALSE(r.reachable(c, a));
    CHECK(r.piped(a, b));
    CHECK(r.index("ghost") == -1);

    l.add_robot("r", "R");
    l.add_associated_link("D_C.1", "D_A.1", "r");
    const Reachability r2(l);
    CHECK(r2.reachable(r2.index("D_C.1"), r2.index("D_B.1")));
    CHECK_FALSE(r2.piped(r2.index("D_C.1"), r2.index("D_A.1")));
  }

  TEST_CASE("json round trip") {
    const Catalog cat = fixtures::sample_catalog();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
      const Layout l = fixtures::random_layout(rng, cat);
      CHECK(layout_from_json(layout_to_json(l)) == l);
    }
    CHECK_THROWS_AS(layout_from_json({{"devices", 3}}), LayoutError);
  }

  TEST_CASE("dot export") {
    CHECK(export_dot(Layout{}) == "digraph L {\n}\n");

    Layout two;
    two.add_device("a", "D_A");
    two.add_device("b", "D_B");
    two.add_connection({"a", "b", Rho::grouped, ""});
    const std::string dot = export_dot(two);
    CHECK(dot.find("\"a\" -> \"b\" [style=solid]") != std::string::npos);
    CHECK(dot.find("dashed") == std::string::npos);

    two.add_robot("arm", "R");
    two.add_associated_link("a", "b", "arm");
    const std::string with_robot = export_dot(two);
    CHECK(with_robot.find("\"b\" -> \"a\" [style=dashed, label=\"arm\"]") != std::string::npos);
    CHECK(export_dot(two) == with_robot);
  }

  TEST_CASE("rho names") {
    CHECK(to_string(Rho::grouped) == "grouped");
    CHECK(rho_from_string("associated") == Rho::associated);
    CHECK_THROWS(rho_from_string("glued"));
  }
}
