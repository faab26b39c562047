#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "loadcons/datagen.hpp"
#include "loadcons/io.hpp"

using namespace loadcons;
namespace fs = std::filesystem;

namespace {

datagen::GenConfig small(std::uint64_t seed = 7) {
  datagen::GenConfig c;
  c.seed = seed;
  c.days = 35;
  c.n_terminals = 30;
  return c;
}

double partial_share(const std::vector<Load>& loads) {
  std::size_t n = 0;
  for (const auto& l : loads) n += is_partial(l) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(loads.size());
}

std::vector<Load> history(int weeks) {
  std::vector<Load> out;
  for (int d = 0; d < weeks * 7; ++d) {
    Load l;
    l.id = "L" + std::to_string(1000 + d);
    l.due_day = d + 2;
    l.departure = d * 1440LL;
    out.push_back(l);
  }
  return out;
}

}  // namespace

TEST_CASE("generation is fixed by the seed") {
  const auto a = datagen::generate(small());
  const auto b = datagen::generate(small());
  std::ostringstream la, lb;
  io::write_loads(la, a.network.loads());
  io::write_loads(lb, b.network.loads());
  CHECK(la.str() == lb.str());
  CHECK(datagen::format_tiers(a.tiers) == datagen::format_tiers(b.tiers));

  const auto c = datagen::generate(small(8));
  std::ostringstream lc;
  io::write_loads(lc, c.network.loads());
  CHECK(lc.str() != la.str());
}

TEST_CASE("generated data is valid") {
  const auto g = datagen::generate(small());
  CHECK_FALSE(g.network.loads().empty());
  CHECK(validate_network(g.network).violations.empty());
  CHECK(g.tiers.size() == static_cast<std::size_t>(small().n_destinations()));
  for (const auto& t : g.network.terminals()) {
    CHECK(t.lat >= 25.0);
    CHECK(t.lat <= 49.0);
    CHECK(t.lon >= -124.0);
    CHECK(t.lon <= -67.0);
  }
  std::set<std::string> terminals_with_sorts;
  for (const auto& s : g.network.sorts()) {
    terminals_with_sorts.insert(s.terminal);
    const int window = ((s.dep_minutes - s.arr_minutes) % 1440 + 1440) % 1440;
    CHECK(window >= 180);
    CHECK(window <= 240);
  }
  CHECK(terminals_with_sorts.size() == g.network.terminals().size());
}

TEST_CASE("partial share") {
  auto c = small();
  c.partial_fraction = 0.0;
  CHECK(partial_share(datagen::generate(c).network.loads()) == 0.0);

  datagen::GenConfig full;
  full.days = 180;
  const double share = partial_share(datagen::generate(full).network.loads());
  CHECK(share >= 0.36);
  CHECK(share <= 0.42);
}

TEST_CASE("generator config") {
  auto c = small();
  c.partial_fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(datagen::generate(c), ConfigError);
  c = small();
  c.tiers.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small();
  c.days = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  const auto p = datagen::parse_gen_config(R"({"seed": 3, "days": 14, "tiers": [{"name": "only", "destinations": 2, "loads_per_day": 5}]})");
  CHECK(p.seed == 3);
  CHECK(p.days == 14);
  CHECK(p.n_destinations() == 2);
  CHECK_THROWS_AS(datagen::parse_gen_config(R"({"sed": 3})"), ConfigError);
}

TEST_CASE("written files round-trip") {
  const auto dir = fs::temp_directory_path() / "loadcons_test_datagen";
  fs::remove_all(dir);
  const auto g = datagen::generate(small());
  datagen::write_generated(dir, g);
  const auto back = io::read_network(dir);
  CHECK(back.loads().size() == g.network.loads().size());
  CHECK(datagen::parse_tiers(io::read_file(dir / "tiers.csv")) == g.tiers);
  CHECK_THROWS_AS(datagen::parse_tiers("dest,tier\n"), DataError);
  CHECK_THROWS_AS(datagen::parse_tiers("destination,tier\nT1,high\n"), DataError);
  fs::remove_all(dir);
}

TEST_CASE("chronological split") {
  const auto h = history(26);
  const auto s = datagen::split_train_test(h, 3);
  CHECK(s.train.size() == 23 * 7);
  CHECK(s.test.size() == 3 * 7);
  std::int64_t max_train = 0, min_test = 1 << 30;
  for (const auto& l : s.train) max_train = std::max(max_train, l.due_day);
  for (const auto& l : s.test) min_test = std::min(min_test, l.due_day);
  CHECK(max_train < min_test);

  CHECK(datagen::split_train_test(h, 0).train.size() == h.size());
  CHECK_THROWS_AS(datagen::split_train_test(history(2), 3), DataError);
  CHECK_THROWS_AS(datagen::split_train_test(history(3), 3), DataError);
  CHECK_THROWS_AS(datagen::split_train_test(h, -1), ConfigError);
}

TEST_CASE("worked example fixture") {
  const auto ex = datagen::make_worked_example();
  CHECK(ex.transactions.size() == 7);
  const auto ctx = ex.context();
  CHECK(mining::kappa_pair(ex.item(2), ex.item(9), ctx));
  CHECK_FALSE(mining::kappa_pair(ex.item(9), ex.item(2), ctx));
  for (int k = 1; k <= 10; ++k) {
    if (k != 8) CHECK_FALSE(mining::kappa_pair(ex.item(8), ex.item(k), ctx));
  }
}
