#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "loadcons/solver.hpp"

using namespace loadcons;
using fixture::direct;
using fixture::via;

namespace {

bool has(const std::vector<solver::PlanViolation>& v, const std::string& constraint) {
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.constraint == constraint; });
}

// Every path choice times every trailer subset, checked against the model
// directly. Small instances only.
double enumerate_optimum(const solver::Instance& inst) {
  const std::size_t n = inst.loads.size();
  std::vector<std::size_t> choice(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<double> demand(inst.nodes.size(), 0.0), cap(inst.nodes.size(), 0.0);
      double cost = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        const auto& p = inst.paths[l][choice[l]];
        const std::size_t node = inst.oll[l][choice[l]];
        cost += p.detour_cost;
        demand[node] += inst.loads[l].volume;
        if (mask >> l & 1u) {
          cost += p.last_leg_cost;
          cap[node] += inst.loads[l].capacity;
        }
      }
      bool ok = true;
      for (std::size_t k = 0; k < inst.nodes.size(); ++k) {
        if (inst.constrained[k] && demand[k] > cap[k] + 1e-9) ok = false;
      }
      if (ok) best = std::min(best, cost);
    }
    std::size_t l = 0;
    while (l < n && ++choice[l] == inst.paths[l].size()) choice[l++] = 0;
    if (l == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("two loads share one trailer") {
  const auto inst = fixture::two_load_instance();
  REQUIRE(inst.loads.size() == 2);
  CHECK(inst.path_count() == 3);
  const auto plan = solver::solve_exact(inst);
  CHECK(plan.optimal);
  CHECK(plan.objective == doctest::Approx(110.0));
  CHECK(plan.active_trailers() == 1);
  CHECK(plan.choices(2) == std::vector<std::size_t>{1, 0});
  // Both trailers cost the same at OB; the lower load index wins the tie.
  CHECK(plan.assignments[0].active);
  CHECK(solver::verify_plan(inst, plan).empty());
  CHECK(solver::solve_bruteforce(inst).objective == doctest::Approx(110.0));
}

TEST_CASE("a pair that overflows the trailer stays apart") {
  std::vector<solver::InstanceLoad> loads{{"A", 70.0, 100.0, 0}, {"B", 40.0, 100.0, 100}};
  std::vector<std::vector<pathgen::Path>> paths{{direct("A", "OA", 100.0), via("A", "OB", "B", 10.0, 100.0)},
                                                {direct("B", "OB", 100.0)}};
  const auto inst = solver::build_instance(std::move(loads), std::move(paths));
  const auto plan = solver::solve_exact(inst);
  CHECK(plan.objective == doctest::Approx(200.0));
  CHECK(plan.choices(2) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("single load goes direct with its trailer") {
  const auto inst = solver::build_instance({{"A", 10.0, 100.0, 0}}, {{direct("A", "OA", 42.0)}});
  const auto plan = solver::solve_exact(inst);
  CHECK(plan.objective == 42.0);
  CHECK(plan.active_trailers() == 1);
  CHECK(plan.optimal);
}

TEST_CASE("empty instance") {
  const auto inst = solver::build_instance({}, {});
  CHECK(solver::solve_exact(inst).objective == 0.0);
  CHECK(solver::solve_bruteforce(inst).objective == 0.0);
}

TEST_CASE("instance contracts") {
  CHECK_THROWS_AS(solver::build_instance({{"A", 10.0, 100.0, 0}}, {}), ContractViolation);
  CHECK_THROWS_AS(solver::build_instance({{"A", 10.0, 100.0, 0}}, {{via("A", "OB", "B", 1.0, 1.0)}}),
                  ContractViolation);
  CHECK_THROWS_AS(
      solver::build_instance({{"A", 10.0, 100.0, 0}}, {{direct("A", "OA", 1.0), direct("A", "OA", 2.0)}}),
      ContractViolation);
  CHECK(solver::parse_capacity_scope("paper") == solver::CapacityScope::hubs);
  CHECK(solver::to_string(solver::CapacityScope::all) == "all");
  CHECK_THROWS_AS(solver::parse_capacity_scope("some"), ConfigError);

  std::vector<solver::InstanceLoad> many;
  std::vector<std::vector<pathgen::Path>> paths;
  for (int i = 0; i < 11; ++i) {
    many.push_back({"L" + std::to_string(10 + i), 10.0, 100.0, 0});
    paths.push_back({direct(many.back().id, "O", 10.0)});
  }
  CHECK_THROWS_AS(solver::solve_bruteforce(solver::build_instance(many, paths)), ContractViolation);
}

TEST_CASE("capacity scope") {
  // With the hub-only scope a non-hub origin carries no capacity row.
  std::vector<solver::InstanceLoad> loads{{"A", 30.0, 100.0, 0}, {"B", 40.0, 100.0, 100}};
  std::vector<std::vector<pathgen::Path>> paths{{direct("A", "OA", 100.0), via("A", "OB", "B", 10.0, 100.0)},
                                                {direct("B", "OB", 100.0)}};
  const auto all = solver::build_instance(loads, paths);
  CHECK(std::count(all.constrained.begin(), all.constrained.end(), 1) == 2);
  const auto hub_only = solver::build_instance(loads, paths, solver::CapacityScope::hubs, {{"OB", "S1"}});
  REQUIRE(hub_only.nodes.size() == 2);
  CHECK(hub_only.nodes[0] == Node{"OA", "S1"});
  CHECK(hub_only.constrained == std::vector<char>{0, 1});
  CHECK(solver::solve_exact(hub_only).objective == doctest::Approx(100.0));
  CHECK(enumerate_optimum(hub_only) == doctest::Approx(100.0));
}

TEST_CASE("best cover") {
  using solver::Trailer;
  const std::vector<Trailer> t{{0, 100.0, 50.0}, {1, 100.0, 60.0}, {2, 160.0, 70.0}};
  auto c = solver::best_cover(t, 150.0);
  CHECK(c.feasible);
  CHECK(c.cost == 70.0);
  CHECK(c.chosen == std::vector<std::size_t>{2});
  c = solver::best_cover(t, 250.0);
  CHECK(c.cost == 120.0);
  CHECK(c.chosen == std::vector<std::size_t>{0, 2});
  CHECK_FALSE(solver::best_cover(t, 400.0).feasible);
  c = solver::best_cover(t, 0.0);
  CHECK(c.feasible);
  CHECK(c.chosen.empty());

  const std::vector<Trailer> tie{{0, 100.0, 50.0}, {1, 100.0, 50.0}, {2, 200.0, 100.0}};
  CHECK(solver::best_cover(tie, 150.0).chosen == std::vector<std::size_t>{2});
  const std::vector<Trailer> tie2{{3, 100.0, 50.0}, {1, 100.0, 50.0}};
  CHECK(solver::best_cover(tie2, 80.0).chosen == std::vector<std::size_t>{1});
}

TEST_CASE("plan verification") {
  const auto inst = fixture::two_load_instance();
  auto plan = solver::make_plan(inst, {1, 0}, {0, 1});
  CHECK(plan.objective == doctest::Approx(110.0));
  CHECK(solver::objective_of(inst, plan) == doctest::Approx(110.0));
  CHECK(solver::verify_plan(inst, plan).empty());

  SUBCASE("missing trailer") {
    plan = solver::make_plan(inst, {1, 0}, {0, 0});
    CHECK(has(solver::verify_plan(inst, plan), "capacity"));
  }
  SUBCASE("trailer without route") {
    plan.assignments[0].routed = false;
    plan.assignments[0].active = true;
    const auto v = solver::verify_plan(inst, plan);
    CHECK(has(v, "trailer-without-route"));
    CHECK(has(v, "one-path"));
  }
  SUBCASE("bad index") {
    plan.assignments[0].path = 7;
    CHECK(has(solver::verify_plan(inst, plan), "path-index"));
  }
  SUBCASE("routed twice") {
    plan.assignments.push_back({1, 0, true, false});
    CHECK(has(solver::verify_plan(inst, plan), "one-path"));
  }
  SUBCASE("stale objective") {
    plan.objective += 1.0;
    CHECK(has(solver::verify_plan(inst, plan), "objective"));
  }
}

TEST_CASE("random instances match full enumeration") {
  std::mt19937_64 rng(20);
  fixture::RandomInstanceSpec spec;
  spec.max_loads = 5;
  for (int round = 0; round < 150; ++round) {
    spec.integer_costs = round % 3 != 0;
    const auto inst = fixture::random_instance(rng, spec);
    const double expect = enumerate_optimum(inst);
    const auto exact = solver::solve_exact(inst);
    CAPTURE(round);
    CHECK(exact.optimal);
    CHECK(exact.objective == doctest::Approx(expect));
    CHECK(solver::verify_plan(inst, exact).empty());
    const auto brute = solver::solve_bruteforce(inst);
    CHECK(brute.objective == doctest::Approx(expect));
    CHECK(brute.active_trailers() == exact.active_trailers());
    CHECK(brute.choices(inst.loads.size()) == exact.choices(inst.loads.size()));
  }
}

TEST_CASE("larger random instances agree with brute force") {
  std::mt19937_64 rng(21);
  fixture::RandomInstanceSpec spec;
  spec.min_loads = 6;
  spec.max_loads = 9;
  spec.max_nodes = 4;
  for (int round = 0; round < 40; ++round) {
    const auto inst = fixture::random_instance(rng, spec);
    const auto exact = solver::solve_exact(inst);
    const auto brute = solver::solve_bruteforce(inst);
    CAPTURE(round);
    CHECK(exact.objective == doctest::Approx(brute.objective));
    CHECK(solver::verify_plan(inst, exact).empty());
    CHECK(solver::verify_plan(inst, brute).empty());
  }
}

TEST_CASE("more paths never raise the optimum") {
  std::mt19937_64 rng(22);
  fixture::RandomInstanceSpec spec;
  spec.max_loads = 7;
  spec.random_scope = false;
  for (int round = 0; round < 40; ++round) {
    const auto inst = fixture::random_instance(rng, spec);
    std::vector<std::vector<pathgen::Path>> direct_only;
    for (const auto& p : inst.paths) direct_only.push_back({p[0]});
    const auto reduced = solver::build_instance(inst.loads, direct_only);
    const double full = solver::solve_exact(inst).objective;
    const double base = solver::solve_exact(reduced).objective;
    CHECK(full <= base + 1e-9);
    double tl = 0.0;
    for (const auto& p : direct_only) tl += p[0].last_leg_cost;
    CHECK(base <= tl + 1e-9);
  }
}

TEST_CASE("budgets and warm starts") {
  std::mt19937_64 rng(23);
  fixture::RandomInstanceSpec spec;
  spec.min_loads = 8;
  spec.max_loads = 10;
  for (int round = 0; round < 10; ++round) {
    const auto inst = fixture::random_instance(rng, spec);
    std::vector<std::size_t> zero(inst.loads.size(), 0);
    const auto tl = solver::make_plan(inst, zero, std::vector<char>(inst.loads.size(), 1));
    REQUIRE(solver::verify_plan(inst, tl).empty());
    solver::Budget tight;
    tight.max_nodes = 1;
    const auto cut = solver::solve_exact(inst, tight, {tl});
    CHECK(solver::verify_plan(inst, cut).empty());
    CHECK(cut.objective <= tl.objective + 1e-9);
    const auto full = solver::solve_exact(inst, {}, {tl});
    CHECK(full.optimal);
    CHECK(full.objective <= cut.objective + 1e-9);
  }
}

TEST_CASE("solving is deterministic") {
  std::mt19937_64 rng(24);
  fixture::RandomInstanceSpec spec;
  spec.max_loads = 10;
  for (int round = 0; round < 10; ++round) {
    const auto inst = fixture::random_instance(rng, spec);
    const auto a = solver::solve_exact(inst);
    const auto b = solver::solve_exact(inst);
    CHECK(a.objective == b.objective);
    CHECK(a.choices(inst.loads.size()) == b.choices(inst.loads.size()));
    CHECK(a.active_trailers() == b.active_trailers());
  }
}
