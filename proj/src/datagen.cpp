#include "loadcons/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "loadcons/geo.hpp"
#include "loadcons/io.hpp"

namespace loadcons::datagen {

namespace {

constexpr double kLatMin = 25.0, kLatMax = 49.0;
constexpr double kLonMin = -124.0, kLonMax = -67.0;
// Latest minute a sort may release loads so that jitter stays within the day.
constexpr int kLastSortMinute = 1370;
constexpr int kMaxJitter = 60;
// Share of lanes that run mostly partial.
constexpr double kProneShare = 0.4;

double round_to(double v, double step) { return std::round(v / step) * step; }

std::mt19937_64 stage_rng(std::uint64_t seed, std::uint64_t stage) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(std::mt19937_64& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

std::string padded(const std::string& prefix, int k, int width) {
  std::string digits = std::to_string(k);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

std::vector<Sort> make_sorts(const std::string& terminal, std::mt19937_64& rng) {
  const int k = uniform_int(rng, 3, 4);
  std::vector<int> lengths(k);
  int busy = 0;
  for (auto& len : lengths) {
    len = uniform_int(rng, 180, 240);
    busy += len;
  }
  // Spread the idle time over the lead-in, the gaps and the tail.
  std::vector<double> weights(k + 1);
  double total = 0.0;
  for (auto& w : weights) total += (w = uniform(rng, 0.2, 1.0));
  const int slack = kLastSortMinute - busy;
  std::vector<Sort> out;
  int t = 0;
  for (int i = 0; i < k; ++i) {
    t += static_cast<int>(std::floor(slack * weights[i] / total));
    out.push_back({terminal, "S" + std::to_string(i + 1), t + lengths[i], t});
    t += lengths[i];
  }
  return out;
}

struct Lane {
  Node origin;
  int transit_days = 1;
  double activation = 0.5;
  double partial_prob = 0.0;
};

}  // namespace

int GenConfig::n_destinations() const {
  int n = 0;
  for (const auto& t : tiers) n += t.destinations;
  return n;
}

void GenConfig::validate() const {
  if (!(partial_fraction >= 0.0 && partial_fraction <= 1.0)) {
    throw ConfigError("partial_fraction must lie in [0, 1]");
  }
  if (days < 1) throw ConfigError("days must be positive");
  if (regions < 1) throw ConfigError("regions must be positive");
  if (!(region_spread_deg >= 0.0)) throw ConfigError("region_spread_deg must be nonnegative");
  if (tiers.empty()) throw ConfigError("at least one tier is required");
  for (const auto& t : tiers) {
    if (t.name.empty()) throw ConfigError("tier name must not be empty");
    if (t.destinations < 1) throw ConfigError("tier " + t.name + ": destinations must be positive");
    if (!(t.loads_per_day > 0.0)) throw ConfigError("tier " + t.name + ": loads_per_day must be positive");
  }
  if (n_terminals < n_destinations() + 2) {
    throw ConfigError("n_terminals must exceed the number of destinations by at least 2");
  }
  if (capacity_classes.empty()) throw ConfigError("at least one capacity class is required");
  for (const auto& c : capacity_classes) {
    if (!(c.capacity > 0.0) || !(c.share > 0.0)) {
      throw ConfigError("capacity class " + c.trailer_type + ": capacity and share must be positive");
    }
  }
  for (double w : weekly_pattern) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("weekly_pattern entries must lie in [0, 1]");
  }
  if (!(lane_activation_min > 0.0 && lane_activation_min <= lane_activation_max && lane_activation_max <= 1.0)) {
    throw ConfigError("lane activation range must satisfy 0 < min <= max <= 1");
  }
  if (!(speed_mph > 0.0)) throw ConfigError("speed_mph must be positive");
}

GenConfig parse_gen_config(const std::string& json_text) {
  GenConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("generator config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "n_terminals") c.n_terminals = v.get<int>();
      else if (key == "days") c.days = v.get<int>();
      else if (key == "partial_fraction") c.partial_fraction = v.get<double>();
      else if (key == "regions") c.regions = v.get<int>();
      else if (key == "region_spread_deg") c.region_spread_deg = v.get<double>();
      else if (key == "weekly_pattern") c.weekly_pattern = v.get<std::array<double, 7>>();
      else if (key == "lane_activation_min") c.lane_activation_min = v.get<double>();
      else if (key == "lane_activation_max") c.lane_activation_max = v.get<double>();
      else if (key == "speed_mph") c.speed_mph = v.get<double>();
      else if (key == "tiers") {
        c.tiers.clear();
        for (const auto& t : v) {
          c.tiers.push_back({t.at("name").get<std::string>(), t.at("destinations").get<int>(),
                             t.at("loads_per_day").get<double>()});
        }
      } else if (key == "capacity_classes") {
        c.capacity_classes.clear();
        for (const auto& t : v) {
          c.capacity_classes.push_back({t.at("trailer_type").get<std::string>(), t.at("capacity").get<double>(),
                                        t.at("share").get<double>()});
        }
      } else {
        throw ConfigError("generator config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  c.validate();
  return c;
}

Generated generate(const GenConfig& config) {
  config.validate();

  // Geography: regional centres, then terminals scattered around them.
  auto geo_rng = stage_rng(config.seed, 1);
  std::vector<geo::LatLon> centres;
  for (int r = 0; r < config.regions; ++r) {
    centres.push_back({uniform(geo_rng, kLatMin + 2.0, kLatMax - 2.0), uniform(geo_rng, kLonMin + 3.0, kLonMax - 3.0)});
  }
  std::normal_distribution<double> spread(0.0, std::max(config.region_spread_deg, 1e-9));
  std::vector<Terminal> terminals;
  std::vector<int> region_of;
  for (int i = 0; i < config.n_terminals; ++i) {
    const int r = i % config.regions;
    const double lat = std::clamp(centres[r].lat + spread(geo_rng), kLatMin, kLatMax);
    const double lon = std::clamp(centres[r].lon + spread(geo_rng), kLonMin, kLonMax);
    terminals.push_back({padded("T", i + 1, 3), round_to(lat, 1e-4), round_to(lon, 1e-4)});
    region_of.push_back(r);
  }

  auto sort_rng = stage_rng(config.seed, 2);
  std::vector<Sort> sorts;
  std::map<std::string, std::vector<Sort>> sorts_of;
  for (const auto& t : terminals) {
    auto ts = make_sorts(t.id, sort_rng);
    sorts_of[t.id] = ts;
    sorts.insert(sorts.end(), ts.begin(), ts.end());
  }

  // Destinations and their tiers.
  auto lane_rng = stage_rng(config.seed, 3);
  std::vector<int> perm(config.n_terminals);
  for (int i = 0; i < config.n_terminals; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), lane_rng);
  Generated out;
  struct Destination {
    Node node;
    int terminal = 0;
    double loads_per_day = 0.0;
    std::vector<Lane> lanes;
  };
  std::vector<Destination> dests;
  {
    std::size_t next = 0;
    for (const auto& tier : config.tiers) {
      for (int k = 0; k < tier.destinations; ++k) {
        const int ti = perm[next++];
        const auto& ts = sorts_of[terminals[ti].id];
        Destination d{{terminals[ti].id, ts.back().sort_id}, ti, tier.loads_per_day, {}};
        out.tiers[d.node] = tier.name;
        dests.push_back(std::move(d));
      }
    }
  }
  std::sort(dests.begin(), dests.end(), [](const Destination& a, const Destination& b) { return a.node < b.node; });

  const double p_prone = std::min(1.0, config.partial_fraction / (kProneShare + (1.0 - kProneShare) * 0.12));
  const double p_other = std::max(0.0, (config.partial_fraction - kProneShare * p_prone) / (1.0 - kProneShare));
  const double mean_activation = 0.5 * (config.lane_activation_min + config.lane_activation_max);

  for (auto& d : dests) {
    // Each destination draws most of its lanes from two or three feeder regions.
    std::vector<int> regions(config.regions);
    for (int r = 0; r < config.regions; ++r) regions[r] = r;
    std::shuffle(regions.begin(), regions.end(), lane_rng);
    const int n_feeders = std::min(config.regions, uniform_int(lane_rng, 2, 3));
    // A lane is one origin sort shipping to this destination, so origins are
    // drawn without replacement.
    std::vector<std::pair<int, std::size_t>> feeder_nodes, other_nodes;
    for (int i = 0; i < config.n_terminals; ++i) {
      if (i == d.terminal) continue;
      const bool feeder = std::find(regions.begin(), regions.begin() + n_feeders, region_of[i]) !=
                          regions.begin() + n_feeders;
      for (std::size_t s = 0; s < sorts_of[terminals[i].id].size(); ++s) {
        (feeder ? feeder_nodes : other_nodes).emplace_back(i, s);
      }
    }
    std::shuffle(feeder_nodes.begin(), feeder_nodes.end(), lane_rng);
    std::shuffle(other_nodes.begin(), other_nodes.end(), lane_rng);

    const int n_lanes = std::max(1, static_cast<int>(std::lround(d.loads_per_day / mean_activation)));
    for (int k = 0; k < n_lanes; ++k) {
      const bool want_feeder = coin(lane_rng, 0.8);
      auto& pool = (want_feeder && !feeder_nodes.empty()) || other_nodes.empty() ? feeder_nodes : other_nodes;
      if (pool.empty()) break;
      const auto [ti, si] = pool.back();
      pool.pop_back();
      const auto& sort = sorts_of[terminals[ti].id][si];
      Lane lane;
      lane.origin = {sort.terminal, sort.sort_id};
      const double miles = geo::haversine_miles(geo::position(terminals[ti]), geo::position(terminals[d.terminal]));
      lane.transit_days = std::max(1, static_cast<int>(std::ceil(miles / 600.0))) + (coin(lane_rng, 0.25) ? 1 : 0);
      lane.activation = uniform(lane_rng, config.lane_activation_min, config.lane_activation_max);
      lane.partial_prob = coin(lane_rng, kProneShare) ? p_prone : p_other;
      d.lanes.push_back(lane);
    }
  }

  // Daily load history.
  auto load_rng = stage_rng(config.seed, 4);
  double share_total = 0.0;
  for (const auto& c : config.capacity_classes) share_total += c.share;
  std::vector<Load> loads;
  // One lead week so every departure lands after the epoch.
  const std::int64_t first_due = 7;
  for (std::int64_t day = first_due; day < first_due + config.days; ++day) {
    const double weekly = config.weekly_pattern[day_of_week(day)];
    for (const auto& d : dests) {
      for (const auto& lane : d.lanes) {
        if (!coin(load_rng, lane.activation * weekly)) continue;
        const bool partial = coin(load_rng, lane.partial_prob);
        double pick = uniform(load_rng, 0.0, share_total);
        const CapacityClass* cls = &config.capacity_classes.back();
        for (const auto& c : config.capacity_classes) {
          if (pick < c.share) {
            cls = &c;
            break;
          }
          pick -= c.share;
        }
        const double util = partial ? uniform(load_rng, 0.15, 0.78) : uniform(load_rng, 0.80, 1.0);
        const int jitter = uniform_int(load_rng, 0, kMaxJitter);
        const Sort* sort = nullptr;
        for (const auto& s : sorts_of[lane.origin.terminal]) {
          if (s.sort_id == lane.origin.sort) sort = &s;
        }
        Load l;
        l.origin = lane.origin;
        l.destination = d.node;
        l.due_day = day;
        l.departure = (day - lane.transit_days) * kMinutesPerDay + sort->dep_minutes + jitter;
        l.capacity = cls->capacity;
        l.volume = std::min(cls->capacity, round_to(util * cls->capacity, 0.1));
        if (!partial) l.volume = std::max(l.volume, 0.8 * cls->capacity);
        l.trailer_type = cls->trailer_type;
        loads.push_back(std::move(l));
      }
    }
  }
  for (std::size_t i = 0; i < loads.size(); ++i) loads[i].id = padded("L", static_cast<int>(i + 1), 7);

  out.network = Network(std::move(terminals), std::move(sorts), std::move(loads));
  return out;
}

std::string format_tiers(const std::map<Node, std::string>& tiers) {
  std::string s = "destination,tier\n";
  for (const auto& [node, tier] : tiers) s += to_string(node) + "," + tier + "\n";
  return s;
}

std::map<Node, std::string> parse_tiers(const std::string& text, const std::string& source) {
  std::map<Node, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "destination,tier") throw DataError(source + ":1: expected header 'destination,tier'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const auto slash = line.find('/');
    if (comma == std::string::npos || slash == std::string::npos || slash > comma) {
      throw DataError(source + ":" + std::to_string(lineno) + ": expected '<terminal>/<sort>,<tier>'");
    }
    out[Node{line.substr(0, slash), line.substr(slash + 1, comma - slash - 1)}] = line.substr(comma + 1);
  }
  return out;
}

void write_generated(const std::filesystem::path& dir, const Generated& g) {
  io::write_network(dir, g.network);
  io::write_file_atomic(dir / "tiers.csv", format_tiers(g.tiers));
}

Split split_train_test(const std::vector<Load>& loads, int test_weeks) {
  if (test_weeks < 0) throw ConfigError("test_weeks must be nonnegative");
  Split s;
  if (test_weeks == 0) {
    s.train = loads;
    return s;
  }
  if (loads.empty()) throw DataError("cannot split an empty history");
  std::int64_t lo = loads.front().due_day, hi = lo;
  for (const auto& l : loads) {
    lo = std::min(lo, l.due_day);
    hi = std::max(hi, l.due_day);
  }
  const std::int64_t test_days = 7LL * test_weeks;
  if (hi - lo + 1 <= test_days) {
    throw DataError("history spans " + std::to_string(hi - lo + 1) + " days, not more than the " +
                    std::to_string(test_days) + " test days");
  }
  const std::int64_t cut = hi - test_days + 1;
  for (const auto& l : loads) (l.due_day < cut ? s.train : s.test).push_back(l);
  return s;
}

mining::AbstractPoint WorkedExample::item(int k) const {
  return {Node{"p" + std::to_string(k), "s1"}, group.due_dow, 1};
}

mining::TimeContext WorkedExample::context() const {
  mining::TimeContext ctx;
  ctx.sort_of = [this](const Node& n) -> const Sort* {
    for (const auto& s : sorts) {
      if (s.terminal == n.terminal && s.sort_id == n.sort) return &s;
    }
    return nullptr;
  };
  ctx.travel = [this](const std::string& a, const std::string& b) {
    const auto it = travel.find({a, b});
    if (it == travel.end()) throw DataError("no travel time between " + a + " and " + b);
    return it->second;
  };
  return ctx;
}

WorkedExample make_worked_example() {
  WorkedExample ex;
  ex.group = {Node{"d", "s1"}, 0};
  const std::map<int, std::set<int>> reach{{1, {3, 4, 6, 7, 8}}, {2, {3, 4, 7, 9}}, {3, {4, 5, 6}},
                                           {4, {7}},           {5, {8, 9, 10}},   {6, {9, 10}},
                                           {7, {9}}};
  for (int k = 1; k <= 10; ++k) ex.sorts.push_back({"p" + std::to_string(k), "s1", 100 * k, 100 * k});
  // dep(p_i) + travel <= arr(p_j) holds by one minute when listed, fails by one otherwise.
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      if (i == j) continue;
      const int lo = std::min(i, j), hi = std::max(i, j);
      const bool listed = reach.count(lo) && reach.at(lo).count(hi);
      ex.travel[{"p" + std::to_string(i), "p" + std::to_string(j)}] = 100.0 * (hi - lo) + (listed ? -1.0 : 1.0);
    }
  }
  const std::vector<std::vector<int>> clusters{{7, 5, 8, 10},     {10, 8, 5, 2, 9}, {8, 3, 10, 6, 1, 4},
                                               {4, 5, 2, 9},      {7, 6, 3},        {3, 6, 5, 9},
                                               {1, 7, 10, 2, 8}};
  for (const auto& c : clusters) {
    mining::Transaction t;
    for (int k : c) t.push_back(ex.item(k));
    std::sort(t.begin(), t.end());
    ex.transactions.push_back(std::move(t));
  }
  return ex;
}

}  // namespace loadcons::datagen
