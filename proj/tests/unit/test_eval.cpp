#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "loadcons/baseline.hpp"
#include "loadcons/eval.hpp"

using namespace loadcons;
using fixture::direct;
using fixture::via;

namespace {

using eval::Metric;

// Four partial loads at four origins; A can ride with B at OB.
struct Day {
  eval::InstanceInfo info;
  solver::Instance instance;
};

Day four_loads() {
  Day d;
  d.info.destination = {"D", "S1"};
  d.info.due_day = 8;
  d.info.tier = "high";
  for (const auto& [id, origin] : std::vector<std::pair<std::string, std::string>>{
           {"A", "OA"}, {"B", "OB"}, {"C", "OC"}, {"E", "OE"}}) {
    d.info.loads.push_back(fixture::make_load(id, origin, "S1", 600, 8, 30.0));
  }
  d.info.filtered_paths = 2;
  d.info.unfiltered_paths = 5;
  d.instance = solver::build_instance(
      {{"A", 30.0, 100.0, 600}, {"B", 30.0, 100.0, 600}, {"C", 30.0, 100.0, 600}, {"E", 30.0, 100.0, 600}},
      {{direct("A", "OA", 100.0), via("A", "OB", "B", 10.0, 100.0)},
       {direct("B", "OB", 100.0), via("B", "OC", "C", 10.0, 100.0)},
       {direct("C", "OC", 100.0)},
       {direct("E", "OE", 100.0)}});
  return d;
}

eval::TrainingIndex training() {
  const auto a = mining::abstract_load(fixture::make_load("A", "OA", "S1", 600, 8, 30.0));
  const auto b = mining::abstract_load(fixture::make_load("B", "OB", "S1", 600, 8, 30.0));
  const auto c = mining::abstract_load(fixture::make_load("C", "OC", "S1", 600, 8, 30.0));
  mining::TransactionGroups g;
  g[{{"D", "S1"}, day_of_week(8)}] = {{a, b}, {a, b, c}, {b, c}, {a}};
  return eval::TrainingIndex(g);
}

}  // namespace

TEST_CASE("method and normalisation names") {
  CHECK(eval::to_string(eval::Method::spot) == "SPOT");
  CHECK(eval::parse_method("NNCH") == eval::Method::nnch);
  CHECK_THROWS(eval::parse_method("LP"));
  CHECK(eval::parse_normalize("cross-tier") == eval::Normalize::cross_tier);
  CHECK(eval::to_string(eval::Normalize::within) == "within");
  CHECK_THROWS(eval::parse_normalize("global"));
}

TEST_CASE("co-occurrence over training transactions") {
  const auto t = training();
  const auto a = mining::abstract_load(fixture::make_load("A", "OA", "S1", 600, 8, 30.0));
  const auto b = mining::abstract_load(fixture::make_load("B", "OB", "S1", 600, 8, 30.0));
  const mining::GroupKey g{{"D", "S1"}, day_of_week(8)};
  CHECK(*t.cooccurrence(g, a, b) == doctest::Approx(0.5));
  CHECK(*t.cooccurrence(g, b, a) == doctest::Approx(0.5));
  CHECK_FALSE(t.cooccurrence({{"D", "S1"}, day_of_week(9)}, a, b).has_value());
}

TEST_CASE("metrics of one consolidated pair") {
  const auto d = four_loads();
  const auto plan = solver::make_plan(d.instance, {1, 0, 0, 0}, {0, 1, 1, 1});
  const auto m = eval::evaluate_plan(d.info, d.instance, plan, eval::Method::spot, training());
  CHECK(m.loads_cut == 1);
  CHECK(*m.value(Metric::loads_cut_pct) == doctest::Approx(25.0));
  CHECK(*m.value(Metric::coverage_pct) == doctest::Approx(50.0));
  CHECK(*m.value(Metric::cp_ratio_pct) == doctest::Approx(25.0));
  CHECK(*m.value(Metric::daily_loads_per_cp) == doctest::Approx(2.0));
  CHECK(*m.value(Metric::num_paths_pct) == doctest::Approx(40.0));
  CHECK(*m.value(Metric::path_freq_pct) == doctest::Approx(50.0));
  CHECK(*m.value(Metric::travel_distance_pct) == doctest::Approx(310.0 / 400.0 * 100.0));
  CHECK(*m.value(Metric::cost_reduction_pct) == doctest::Approx(22.5));
}

TEST_CASE("two-load cost reduction") {
  const auto inst = fixture::two_load_instance();
  eval::InstanceInfo info;
  info.destination = {"D", "S1"};
  info.tier = "low";
  info.loads = {fixture::make_load("A", "OA", "S1", 0, 1, 30.0), fixture::make_load("B", "OB", "S1", 100, 1, 40.0)};
  const auto m = eval::evaluate_plan(info, inst, solver::solve_exact(inst), eval::Method::spot, {});
  CHECK(*m.value(Metric::cost_reduction_pct) == doctest::Approx(45.0));
  CHECK(*m.value(Metric::travel_distance_pct) == doctest::Approx(55.0));
  CHECK_FALSE(m.value(Metric::path_freq_pct).has_value());
  CHECK_FALSE(m.value(Metric::num_paths_pct).has_value());
}

TEST_CASE("TL is the reference point") {
  const auto d = four_loads();
  const auto m = eval::evaluate_plan(d.info, d.instance, baseline::plan_tl(d.instance), eval::Method::tl, {});
  CHECK(*m.value(Metric::travel_distance_pct) == 100.0);
  CHECK(*m.value(Metric::cost_reduction_pct) == 0.0);
  CHECK(*m.value(Metric::loads_cut_pct) == 0.0);
  CHECK(*m.value(Metric::coverage_pct) == 0.0);
  CHECK_FALSE(m.value(Metric::daily_loads_per_cp).has_value());
}

TEST_CASE("infeasible plans are refused") {
  const auto d = four_loads();
  const auto bad = solver::make_plan(d.instance, {1, 0, 0, 0}, {0, 0, 1, 1});
  CHECK_THROWS_AS(eval::distance_and_cost(bad, d.instance), ContractViolation);
  auto info = d.info;
  info.loads.pop_back();
  CHECK_THROWS_AS(eval::evaluate_plan(info, d.instance, baseline::plan_tl(d.instance), eval::Method::tl, {}),
                  ContractViolation);
}

TEST_CASE("report aggregation") {
  auto d = four_loads();
  auto day = [&](std::int64_t due, const std::string& tier, eval::Method method, const solver::Plan& plan) {
    auto info = d.info;
    info.due_day = due;
    info.tier = tier;
    return eval::evaluate_plan(info, d.instance, plan, method, {});
  };
  const auto tl = baseline::plan_tl(d.instance);
  const auto pair = solver::make_plan(d.instance, {1, 0, 0, 0}, {0, 1, 1, 1});
  const auto none = tl;
  std::vector<eval::DayMetrics> days{day(9, "high", eval::Method::spot, pair), day(8, "high", eval::Method::tl, tl),
                                     day(8, "high", eval::Method::spot, none), day(9, "high", eval::Method::tl, tl),
                                     day(8, "low", eval::Method::tl, tl)};
  SUBCASE("missing method") { CHECK_THROWS_AS(eval::compare_report(days, eval::Normalize::within, {}), DataError); }

  days.pop_back();
  const auto r = eval::compare_report(days, eval::Normalize::within, {{"seed", 7}});
  CHECK(r.days.front().due_day == 8);
  CHECK(r.days.front().method == eval::Method::tl);
  CHECK(*r.mean("high", eval::Method::spot, Metric::loads_cut_pct) == doctest::Approx(12.5));
  CHECK(*r.mean("all", eval::Method::tl, Metric::travel_distance_pct) == doctest::Approx(100.0));
  CHECK_FALSE(r.mean("mid", eval::Method::tl, Metric::loads_cut_pct).has_value());

  SUBCASE("order independent") {
    std::reverse(days.begin(), days.end());
    CHECK(eval::compare_report(days, eval::Normalize::within, {{"seed", 7}}).to_json() == r.to_json());
  }
  SUBCASE("duplicates") {
    days.push_back(days.front());
    CHECK_THROWS_AS(eval::compare_report(days, eval::Normalize::within, {}), DataError);
  }
  SUBCASE("cross-tier needs the reference tier") {
    CHECK_THROWS_AS(eval::compare_report(days, eval::Normalize::cross_tier, {}, "mid"), ConfigError);
    const auto x = eval::compare_report(days, eval::Normalize::cross_tier, {}, "high");
    CHECK(*x.mean("high", eval::Method::tl, Metric::travel_distance_pct) == doctest::Approx(100.0));
  }
  SUBCASE("serialised forms") {
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j.at("config").at("seed") == 7);
    CHECK(j.at("aggregates").size() == 4);
    CHECK(j.at("instances").size() == 4);
    CHECK(r.to_text().find("SPOT") != std::string::npos);
  }
}
