#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "loadcons/model.hpp"

using namespace loadcons;

TEST_CASE("transit days count whole days from the departure day") {
  auto l = fixture::make_load("L", "A", "S1", 600, 2, 10.0);
  CHECK(transit_days(l) == 2);
  l.departure = 1440;
  l.due_day = 1;
  CHECK(transit_days(l) == 0);
  l.departure = 2000;
  l.due_day = 3;
  CHECK(transit_days(l) == 2);
  l.due_day = 0;
  CHECK_THROWS_AS(transit_days(l), InvalidLoad);
}

TEST_CASE("day_of floors towards minus infinity") {
  CHECK(day_of(0) == 0);
  CHECK(day_of(1439) == 0);
  CHECK(day_of(1440) == 1);
  CHECK(day_of(-1) == -1);
  CHECK(day_of(-1440) == -1);
  CHECK(day_of(-1441) == -2);
  for (std::int64_t t = -5000; t < 5000; t += 37) CHECK(day_of(t) <= day_of(t + 37));
  CHECK(day_of_week(7) == 0);
  CHECK(day_of_week(-1) == 6);
}

TEST_CASE("partial uses a strict threshold") {
  CHECK(is_partial(fixture::make_load("L", "A", "S1", 0, 0, 79.0)));
  CHECK_FALSE(is_partial(fixture::make_load("L", "A", "S1", 0, 0, 80.0)));
  CHECK(is_partial(fixture::make_load("L", "A", "S1", 0, 0, 0.0, 50.0)));
  CHECK_THROWS_AS(is_partial(fixture::make_load("L", "A", "S1", 0, 0, 0.0, 0.0)), InvalidLoad);
  // lowering volume never turns a partial load full
  bool partial = false;
  for (double v = 100.0; v >= 0.0; v -= 0.5) {
    const bool p = is_partial(fixture::make_load("L", "A", "S1", 0, 0, v));
    CHECK((p || !partial));
    partial = p;
  }
  CHECK(partial);
}

TEST_CASE("validation") {
  SUBCASE("empty network is clean") { CHECK(validate_network(Network()).ok()); }

  SUBCASE("undeclared origin sort") {
    auto net = fixture::line_network({fixture::make_load("L1", "A", "S9", 600, 1, 10.0)});
    const auto r = validate_network(net);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].record == "load:L1");
    CHECK(r.violations[0].rule == "origin sort undeclared");
  }

  SUBCASE("volume above capacity") {
    auto net = fixture::line_network({fixture::make_load("L1", "A", "S1", 600, 1, 120.0)});
    const auto r = validate_network(net);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].rule == "volume exceeds capacity");
  }

  SUBCASE("early departure is only a warning") {
    auto net = fixture::line_network({fixture::make_load("L1", "A", "S1", 100, 1, 10.0)});
    const auto r = validate_network(net);
    CHECK(r.ok());
    CHECK(r.warnings.size() == 1);
  }

  SUBCASE("idempotent and order independent") {
    std::vector<Load> loads{fixture::make_load("L1", "A", "S9", 600, 1, 10.0),
                            fixture::make_load("L2", "B", "S1", 600, 1, 200.0),
                            fixture::make_load("L3", "C", "S2", 1300, 0, 10.0),
                            fixture::make_load("L1", "A", "S1", 600, 1, 10.0)};
    const auto a = validate_network(fixture::line_network(loads));
    std::mt19937 rng(3);
    std::shuffle(loads.begin(), loads.end(), rng);
    const auto b = validate_network(fixture::line_network(loads));
    const auto c = validate_network(fixture::line_network(loads));
    auto key = [](const ValidationReport& r) {
      std::vector<std::string> k;
      for (const auto& v : r.violations) k.push_back(v.record + "|" + v.rule);
      return k;
    };
    CHECK(key(a) == key(b));
    CHECK(key(b) == key(c));
    CHECK(a.violations.size() == 3);
  }
}

TEST_CASE("network lookups") {
  auto net = fixture::line_network({fixture::make_load("L1", "A", "S1", 600, 1, 10.0)});
  REQUIRE(net.find_terminal("C") != nullptr);
  CHECK(net.find_terminal("C")->lon == doctest::Approx(-90.0));
  CHECK(net.find_terminal("Z") == nullptr);
  REQUIRE(net.find_sort({"B", "S2"}) != nullptr);
  CHECK(net.find_sort({"B", "S2"})->dep_minutes == 1200);
  CHECK(net.find_load("L1") != nullptr);
  const auto other = net.with_loads({});
  CHECK(other.loads().empty());
  CHECK(other.terminals().size() == 4);
}
