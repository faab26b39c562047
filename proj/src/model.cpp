#include "loadcons/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace loadcons {

std::string to_string(const Node& n) { return n.terminal + "/" + n.sort; }

std::int64_t transit_days(const Load& load) {
  const auto omega = load.due_day - day_of(load.departure);
  if (omega < 0) {
    throw InvalidLoad("load " + load.id + ": due day precedes departure day");
  }
  return omega;
}

bool is_partial(const Load& load, double threshold) {
  if (!(load.capacity > 0.0)) {
    throw InvalidLoad("load " + load.id + ": capacity must be positive");
  }
  return load.volume / load.capacity < threshold;
}

Network::Network(std::vector<Terminal> terminals, std::vector<Sort> sorts,
                 std::vector<Load> loads)
    : terminals_(std::move(terminals)),
      sorts_(std::move(sorts)),
      loads_(std::move(loads)) {
  // First occurrence wins; duplicates are surfaced by validate_network.
  for (std::size_t i = 0; i < terminals_.size(); ++i) {
    terminal_index_.emplace(terminals_[i].id, i);
  }
  for (std::size_t i = 0; i < sorts_.size(); ++i) {
    sort_index_.emplace(Node{sorts_[i].terminal, sorts_[i].sort_id}, i);
  }
  for (std::size_t i = 0; i < loads_.size(); ++i) {
    load_index_.emplace(loads_[i].id, i);
  }
}

const Terminal* Network::find_terminal(const std::string& id) const {
  const auto it = terminal_index_.find(id);
  return it == terminal_index_.end() ? nullptr : &terminals_[it->second];
}

const Sort* Network::find_sort(const Node& node) const {
  const auto it = sort_index_.find(node);
  return it == sort_index_.end() ? nullptr : &sorts_[it->second];
}

const Load* Network::find_load(const std::string& id) const {
  const auto it = load_index_.find(id);
  return it == load_index_.end() ? nullptr : &loads_[it->second];
}

Network Network::with_loads(std::vector<Load> loads) const {
  return Network(terminals_, sorts_, std::move(loads));
}

namespace {

bool in_day(int minutes) { return minutes >= 0 && minutes < kMinutesPerDay; }

}  // namespace

ValidationReport validate_network(const Network& network) {
  ValidationReport report;
  auto fail = [&](std::string record, std::string rule) {
    report.violations.push_back({std::move(record), std::move(rule), Severity::error});
  };

  std::set<std::string> terminal_ids;
  for (const auto& t : network.terminals()) {
    const auto rec = "terminal:" + t.id;
    if (!terminal_ids.insert(t.id).second) fail(rec, "duplicate terminal id");
    if (!std::isfinite(t.lat) || t.lat < -90.0 || t.lat > 90.0) {
      fail(rec, "latitude outside [-90, 90]");
    }
    if (!std::isfinite(t.lon) || t.lon < -180.0 || t.lon > 180.0) {
      fail(rec, "longitude outside [-180, 180]");
    }
  }

  std::set<Node> sort_keys;
  for (const auto& s : network.sorts()) {
    const Node key{s.terminal, s.sort_id};
    const auto rec = "sort:" + to_string(key);
    if (!sort_keys.insert(key).second) fail(rec, "duplicate (terminal, sort_id)");
    if (!terminal_ids.count(s.terminal)) fail(rec, "unknown terminal");
    if (!in_day(s.dep_minutes)) fail(rec, "dep_minutes outside [0, 1440)");
    if (!in_day(s.arr_minutes)) fail(rec, "arr_minutes outside [0, 1440)");
  }

  std::set<std::string> load_ids;
  for (const auto& l : network.loads()) {
    const auto rec = "load:" + l.id;
    if (!load_ids.insert(l.id).second) fail(rec, "duplicate load id");
    const Sort* origin_sort = network.find_sort(l.origin);
    if (origin_sort == nullptr) fail(rec, "origin sort undeclared");
    if (network.find_sort(l.destination) == nullptr) {
      fail(rec, "destination sort undeclared");
    }
    if (l.departure < 0) fail(rec, "negative departure");
    if (l.departure >= 0 && l.due_day < day_of(l.departure)) {
      fail(rec, "due day precedes departure day");
    }
    if (!std::isfinite(l.capacity) || l.capacity <= 0.0) {
      fail(rec, "capacity must be positive");
    }
    if (!std::isfinite(l.volume) || l.volume < 0.0) {
      fail(rec, "volume must be nonnegative");
    } else if (std::isfinite(l.capacity) && l.volume > l.capacity) {
      fail(rec, "volume exceeds capacity");
    }
    if (origin_sort != nullptr && l.departure >= 0) {
      const auto minute_of_day = l.departure - day_of(l.departure) * kMinutesPerDay;
      if (minute_of_day < origin_sort->dep_minutes) {
        report.warnings.push_back(
            {rec, "departs before origin sort's earliest departure", Severity::warning});
      }
    }
  }

  auto by_key = [](const Violation& a, const Violation& b) {
    return std::tie(a.record, a.rule) < std::tie(b.record, b.rule);
  };
  std::sort(report.violations.begin(), report.violations.end(), by_key);
  std::sort(report.warnings.begin(), report.warnings.end(), by_key);
  return report;
}

}  // namespace loadcons
