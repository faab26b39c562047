#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "loadcons/mining.hpp"
#include "loadcons/model.hpp"

namespace loadcons::datagen {

struct TierProfile {
  std::string name;
  int destinations = 1;
  double loads_per_day = 20.0;  // all loads, weekday mean, per destination
};

struct CapacityClass {
  std::string trailer_type;
  double capacity = 100.0;
  double share = 1.0;
};

struct GenConfig {
  std::uint64_t seed = 7;
  int n_terminals = 80;
  int days = 182;
  double partial_fraction = 0.39;
  int regions = 8;
  double region_spread_deg = 1.5;
  // Monday first.
  std::array<double, 7> weekly_pattern{1.0, 1.0, 1.0, 1.0, 1.0, 0.3, 0.2};
  std::vector<TierProfile> tiers{{"high", 2, 60.0}, {"mid", 3, 30.0}, {"low", 4, 12.0}};
  std::vector<CapacityClass> capacity_classes{{"std", 100.0, 0.7}, {"large", 160.0, 0.3}};
  double lane_activation_min = 0.3;
  double lane_activation_max = 0.9;
  double speed_mph = 50.0;

  int n_destinations() const;
  // Throws ConfigError describing the first bad field.
  void validate() const;
};

// Overrides defaults with the keys present in a JSON object. Unknown keys
// are rejected.
GenConfig parse_gen_config(const std::string& json_text);

struct Generated {
  Network network;
  std::map<Node, std::string> tiers;  // destination -> tier name
};

Generated generate(const GenConfig& config);

// tiers.csv with header "destination,tier"; destinations written as "T/S".
std::string format_tiers(const std::map<Node, std::string>& tiers);
std::map<Node, std::string> parse_tiers(const std::string& text, const std::string& source = "tiers.csv");

// Network files plus tiers.csv.
void write_generated(const std::filesystem::path& dir, const Generated& g);

struct Split {
  std::vector<Load> train;
  std::vector<Load> test;
};

// Chronological split on due day: the last test_weeks * 7 days of the
// history are test. Throws DataError when the history is not longer than that.
Split split_train_test(const std::vector<Load>& loads, int test_weeks);

// Seven clusters over items p1..p10 and a sort/travel fixture whose pairwise
// feasibility matrix is fixed by hand (p1 reaches p3 p4 p6 p7 p8, p2 reaches
// p3 p4 p7 p9, p3 reaches p4 p5 p6, p4 reaches p7, p5 reaches p8 p9 p10,
// p6 reaches p9 p10, p7 reaches p9, the rest reach nothing).
struct WorkedExample {
  mining::GroupKey group;
  std::vector<mining::Transaction> transactions;
  std::vector<Sort> sorts;
  std::map<std::pair<std::string, std::string>, double> travel;

  mining::AbstractPoint item(int k) const;  // p<k>
  mining::TimeContext context() const;
};

WorkedExample make_worked_example();

}  // namespace loadcons::datagen
