#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "loadcons/geo.hpp"
#include "loadcons/pathgen.hpp"

using namespace loadcons;
using fixture::make_load;

namespace {

// Four origins a few miles apart, far west of the destination.
Network cluster_network(std::vector<Load> loads) {
  std::vector<Terminal> terminals{{"P1", 40.0, -100.0}, {"P2", 40.0, -100.1}, {"P3", 40.1, -100.0},
                                  {"P4", 40.1, -100.1}, {"D", 40.0, -80.0}};
  std::vector<Sort> sorts;
  for (const auto& t : terminals) sorts.push_back({t.id, "S1", 0, 1439});
  return Network(std::move(terminals), std::move(sorts), std::move(loads));
}

std::size_t count(const pathgen::PathSet& ps, const std::string& id) { return ps.by_load.at(id).size(); }

}  // namespace

TEST_CASE("leg cost") {
  pathgen::CostModel m;
  m.fixed_dispatch = 25.0;
  CHECK(pathgen::cost(0.0, "std", m) == 25.0);
  CHECK(pathgen::cost(250.0, "std", {}) == 250.0);
  pathgen::CostModel r;
  r.rates = {{"large", 2.0}};
  r.fixed_dispatch = 100.0;
  CHECK(pathgen::cost(250.0, "large", r) == 600.0);
  CHECK(pathgen::cost(250.0, "other", r) == 350.0);
  CHECK_FALSE(r.knows("other"));
  CHECK_THROWS_AS(pathgen::cost(-1.0, "std", r), ContractViolation);
}

TEST_CASE("operational feasibility") {
  auto travel = [](const std::string& a, const std::string& b) { return a == b ? 0.0 : 90.0; };
  const auto l = make_load("L", "A", "S1", 480, 1, 10.0);
  CHECK(pathgen::kappa_op(l, make_load("H", "B", "S1", 610, 1, 10.0), travel, 30.0));
  CHECK_FALSE(pathgen::kappa_op(l, make_load("H", "B", "S1", 599, 1, 10.0), travel, 30.0));
  CHECK(pathgen::kappa_op(l, make_load("H", "A", "S1", 481, 1, 10.0), travel));
  CHECK_FALSE(pathgen::kappa_op(l, make_load("H", "B", "S1", 480, 1, 10.0), travel));
  CHECK_THROWS_AS(pathgen::kappa_op(l, make_load("H", "B", "S1", 900, 2, 10.0), travel), ContractViolation);
  CHECK_THROWS_AS(pathgen::kappa_op(l, make_load("H", "B", "S1", 900, 1, 10.0, 100.0, "C"), travel),
                  ContractViolation);
}

TEST_CASE("selecting loads covered by candidates") {
  const auto a = make_load("A1", "A", "S1", 600, 1, 10.0);
  const auto b = make_load("B1", "B", "S1", 600, 1, 10.0);
  CHECK(pathgen::select_lc({a, b}, {}).empty());
  mining::CandidateSet c;
  c.items = {mining::abstract_load(a), mining::AbstractPoint{{"C", "S1"}, 1, 1}};
  const auto lc = pathgen::select_lc({a, b}, {c});
  REQUIRE(lc.size() == 1);
  CHECK(lc[0].id == "A1");
}

TEST_CASE("path sets") {
  const std::vector<Load> loads{make_load("L1", "A", "S1", 600, 1, 30.0), make_load("L2", "B", "S2", 1200, 1, 40.0)};
  const auto net = fixture::line_network(loads);
  const auto travel = geo::network_travel(net);
  const auto dist = geo::network_distance(net);

  SUBCASE("no hubs leaves the direct paths") {
    const auto ps = pathgen::generate_paths(loads, {}, {}, travel, dist, {});
    CHECK(count(ps, "L1") == 1);
    CHECK(count(ps, "L2") == 1);
    CHECK(ps.consolidation_paths() == 0);
    const auto& d = ps.by_load.at("L1")[0];
    CHECK(d.kind == pathgen::PathKind::direct);
    CHECK(d.detour_cost == 0.0);
    CHECK(!d.hub.has_value());
    CHECK(d.last_leg_origin == Node{"A", "S1"});
    CHECK(d.last_leg_cost == doctest::Approx(dist("A", "D")));
  }

  SUBCASE("the earlier load can reach the later one's origin") {
    const auto ps = pathgen::generate_paths(loads, {{"B", "S2"}}, {}, travel, dist, {});
    REQUIRE(count(ps, "L1") == 2);
    CHECK(count(ps, "L2") == 1);
    const auto& p = ps.by_load.at("L1")[1];
    CHECK(p.kind == pathgen::PathKind::consolidation);
    CHECK(p.hub == Node{"B", "S2"});
    CHECK(p.last_leg_origin == Node{"B", "S2"});
    CHECK(p.hub_load_id == "L2");
    CHECK(p.detour_cost == doctest::Approx(dist("A", "B")));
    CHECK(p.last_leg_cost == doctest::Approx(dist("B", "D")));
  }

  SUBCASE("co-membership filter needs a shared candidate") {
    pathgen::PathGenConfig cfg;
    cfg.require_comembership = true;
    CHECK(count(pathgen::generate_paths(loads, {{"B", "S2"}}, {}, travel, dist, cfg), "L1") == 1);
    mining::CandidateSet c;
    c.items = {mining::abstract_load(loads[0]), mining::abstract_load(loads[1])};
    std::sort(c.items.begin(), c.items.end());
    CHECK(count(pathgen::generate_paths(loads, {{"B", "S2"}}, {c}, travel, dist, cfg), "L1") == 2);
  }

  SUBCASE("dwell time can rule a hub out") {
    pathgen::PathGenConfig cfg;
    cfg.dwell_minutes = 600.0;
    CHECK(count(pathgen::generate_paths(loads, {{"B", "S2"}}, {}, travel, dist, cfg), "L1") == 1);
  }
}

TEST_CASE("four loads with the last two origins as hubs") {
  const std::vector<Load> loads{make_load("L1", "P1", "S1", 600, 1, 10.0, 100.0, "D"),
                                make_load("L2", "P2", "S1", 700, 1, 10.0, 100.0, "D"),
                                make_load("L3", "P3", "S1", 800, 1, 10.0, 100.0, "D"),
                                make_load("L4", "P4", "S1", 900, 1, 10.0, 100.0, "D")};
  const auto net = cluster_network(loads);
  const auto ps = pathgen::generate_paths(loads, {{"P3", "S1"}, {"P4", "S1"}}, {}, geo::network_travel(net),
                                          geo::network_distance(net), {});
  CHECK(count(ps, "L1") == 3);
  CHECK(count(ps, "L2") == 3);
  CHECK(count(ps, "L3") == 2);
  CHECK(count(ps, "L4") == 1);
  CHECK(ps.by_load.at("L3")[1].hub_load_id == "L4");
}

TEST_CASE("latest feasible hub load is chosen per hub node") {
  const std::vector<Load> loads{make_load("L1", "P1", "S1", 600, 1, 10.0, 100.0, "D"),
                                make_load("L2", "P2", "S1", 700, 1, 10.0, 100.0, "D"),
                                make_load("L3", "P2", "S1", 900, 1, 10.0, 100.0, "D")};
  const auto net = cluster_network(loads);
  const auto ps = pathgen::generate_paths(loads, {{"P2", "S1"}}, {}, geo::network_travel(net),
                                          geo::network_distance(net), {});
  REQUIRE(count(ps, "L1") == 2);
  CHECK(ps.by_load.at("L1")[1].hub_load_id == "L3");
}

TEST_CASE("random path sets match a pairwise scan") {
  std::mt19937_64 rng(8);
  const auto net = cluster_network({});
  const auto travel = geo::network_travel(net);
  const auto dist = geo::network_distance(net);
  std::uniform_int_distribution<int> origin(1, 4), dep(0, 300), day(1, 2), n_loads(1, 20);
  for (int round = 0; round < 40; ++round) {
    std::vector<Load> loads;
    const int n = n_loads(rng);
    for (int i = 0; i < n; ++i) {
      loads.push_back(make_load("L" + std::to_string(100 + i), "P" + std::to_string(origin(rng)), "S1",
                                600 + dep(rng), day(rng), 10.0, 100.0, "D"));
    }
    std::set<Node> hubs;
    for (int h = 1; h <= 4; ++h) {
      if (rng() % 2) hubs.insert({"P" + std::to_string(h), "S1"});
    }
    const auto ps = pathgen::generate_paths(loads, hubs, {}, travel, dist, {});
    for (const auto& l : loads) {
      std::set<Node> reach;
      for (const auto& h : loads) {
        if (&h == &l || h.origin == l.origin || !hubs.count(h.origin) || h.due_day != l.due_day) continue;
        if (l.departure + travel(l.origin.terminal, h.origin.terminal) <= h.departure) reach.insert(h.origin);
      }
      const auto& paths = ps.by_load.at(l.id);
      CHECK(paths.size() == reach.size() + 1);
      CHECK(paths[0].kind == pathgen::PathKind::direct);
      for (std::size_t k = 1; k < paths.size(); ++k) {
        CHECK(reach.count(*paths[k].hub) == 1);
        const Load* hub_load = nullptr;
        for (const auto& h : loads) {
          if (h.id == paths[k].hub_load_id) hub_load = &h;
        }
        REQUIRE(hub_load != nullptr);
        CHECK(pathgen::kappa_op(l, *hub_load, travel));
        CHECK(paths[k].detour_miles + paths[k].last_leg_miles >= paths[0].last_leg_miles - 1e-6);
      }
    }
  }
}

TEST_CASE("unknown trailer types warn") {
  pathgen::PathGenConfig cfg;
  cfg.costs.rates = {{"std", 1.5}};
  auto l = make_load("L1", "A", "S1", 600, 1, 10.0, 160.0);
  const auto net = fixture::line_network({l});
  const auto ps = pathgen::generate_paths({l}, {}, {}, geo::network_travel(net), geo::network_distance(net), cfg);
  CHECK(ps.warnings.size() == 1);
}
