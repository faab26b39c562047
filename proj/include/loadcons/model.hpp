#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace loadcons {

inline constexpr std::int64_t kMinutesPerDay = 1440;
inline constexpr double kDefaultPartialThreshold = 0.80;

class InvalidLoad : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Terminal {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
};

// One daily processing window at a terminal. Times are minutes within the day.
struct Sort {
  std::string terminal;
  std::string sort_id;
  int dep_minutes = 0;  // earliest departure
  int arr_minutes = 0;  // latest arrival
};

// Spatio-temporal vertex: a (terminal, sort) pair.
struct Node {
  std::string terminal;
  std::string sort;

  auto operator<=>(const Node&) const = default;
  bool operator==(const Node&) const = default;
};

std::string to_string(const Node& n);

struct Load {
  std::string id;
  Node origin;
  Node destination;
  std::int64_t departure = 0;  // absolute minutes since epoch
  std::int64_t due_day = 0;    // day index since epoch (epoch is a Monday)
  double volume = 0.0;
  double capacity = 0.0;
  std::string trailer_type;
};

constexpr std::int64_t day_of(std::int64_t minutes) {
  // floor division, valid for negative inputs too
  return minutes >= 0 ? minutes / kMinutesPerDay
                      : -((-minutes + kMinutesPerDay - 1) / kMinutesPerDay);
}

constexpr int day_of_week(std::int64_t day) {
  const auto m = day % 7;
  return static_cast<int>(m < 0 ? m + 7 : m);
}

// due_day - day(departure). Throws InvalidLoad when negative.
std::int64_t transit_days(const Load& load);

// volume / capacity < threshold. Throws InvalidLoad when capacity <= 0.
bool is_partial(const Load& load, double threshold = kDefaultPartialThreshold);

// Immutable after construction; lookups are by id / node.
class Network {
 public:
  Network() = default;
  Network(std::vector<Terminal> terminals, std::vector<Sort> sorts,
          std::vector<Load> loads);

  const std::vector<Terminal>& terminals() const { return terminals_; }
  const std::vector<Sort>& sorts() const { return sorts_; }
  const std::vector<Load>& loads() const { return loads_; }

  const Terminal* find_terminal(const std::string& id) const;
  const Sort* find_sort(const Node& node) const;
  const Load* find_load(const std::string& id) const;

  // Same terminals and sorts, different load set.
  Network with_loads(std::vector<Load> loads) const;

 private:
  std::vector<Terminal> terminals_;
  std::vector<Sort> sorts_;
  std::vector<Load> loads_;
  std::map<std::string, std::size_t> terminal_index_;
  std::map<Node, std::size_t> sort_index_;
  std::map<std::string, std::size_t> load_index_;
};

enum class Severity { error, warning };

struct Violation {
  std::string record;  // e.g. "load:L17", "terminal:T3"
  std::string rule;
  Severity severity = Severity::error;
};

struct ValidationReport {
  std::vector<Violation> violations;  // hard invariant failures
  std::vector<Violation> warnings;    // advisory only

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_network(const Network& network);

}  // namespace loadcons
