#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcons/mining.hpp"
#include "loadcons/solver.hpp"

namespace loadcons::eval {

enum class Method { tl, nnch, spot };

std::string to_string(Method m);  // "TL", "NNCH", "SPOT"
Method parse_method(const std::string& name);

enum class Normalize { within, cross_tier };

Normalize parse_normalize(const std::string& name);  // "within" | "cross-tier"
std::string to_string(Normalize n);

struct DistanceCost {
  double miles = 0.0;
  double cost = 0.0;
};

// Detour miles of every routed path plus last-leg miles of every running
// trailer; cost is the plan objective. Throws ContractViolation when
// verify_plan reports anything.
DistanceCost distance_and_cost(const solver::Plan& plan, const solver::Instance& instance);

enum class Metric {
  travel_distance_pct,
  cost_reduction_pct,
  loads_cut_pct,
  coverage_pct,
  cp_ratio_pct,
  daily_loads_per_cp,
  path_freq_pct,
  num_paths_pct,
};

inline constexpr std::array<Metric, 8> kMetrics{
    Metric::travel_distance_pct, Metric::cost_reduction_pct, Metric::loads_cut_pct,
    Metric::coverage_pct,        Metric::cp_ratio_pct,       Metric::daily_loads_per_cp,
    Metric::path_freq_pct,       Metric::num_paths_pct};

std::string to_string(Metric m);

// Co-occurrence lookups over the training transactions.
class TrainingIndex {
 public:
  TrainingIndex() = default;
  explicit TrainingIndex(mining::TransactionGroups groups);

  // Fraction of the group's transactions containing both items; nullopt
  // when the group has no transactions.
  std::optional<double> cooccurrence(const mining::GroupKey& group, const mining::AbstractPoint& a,
                                     const mining::AbstractPoint& b) const;

 private:
  mining::TransactionGroups groups_;
};

// Everything about one destination-day needed besides the plan itself.
struct InstanceInfo {
  Node destination;
  std::int64_t due_day = 0;
  std::string tier;
  std::vector<Load> loads;              // partial loads, same order as the solver instance
  std::size_t filtered_paths = 0;       // consolidation paths with the hub filter
  std::size_t unfiltered_paths = 0;     // consolidation paths from time feasibility alone
};

struct DayMetrics {
  Node destination;
  std::int64_t due_day = 0;
  std::string tier;
  Method method = Method::tl;
  std::size_t partial_loads = 0;
  double miles = 0.0;
  double cost = 0.0;
  double tl_miles = 0.0;
  double tl_cost = 0.0;
  std::size_t loads_cut = 0;
  std::size_t covered = 0;
  std::size_t hubs_used = 0;
  bool optimal = false;
  std::array<std::optional<double>, kMetrics.size()> values{};

  std::optional<double> value(Metric m) const { return values[static_cast<std::size_t>(m)]; }
  void set(Metric m, std::optional<double> v) { values[static_cast<std::size_t>(m)] = v; }
};

// Metrics of one plan on one instance, normalised against that instance's TL
// plan. Ratios with an empty denominator are left unset.
DayMetrics evaluate_plan(const InstanceInfo& info, const solver::Instance& instance, const solver::Plan& plan,
                         Method method, const TrainingIndex& training);

struct AggregateRow {
  std::string tier;  // "all" for the overall rows
  Method method = Method::tl;
  std::size_t instances = 0;
  std::array<std::optional<double>, kMetrics.size()> means{};

  std::optional<double> mean(Metric m) const { return means[static_cast<std::size_t>(m)]; }
};

struct Report {
  nlohmann::ordered_json config;
  Normalize normalize = Normalize::within;
  std::vector<DayMetrics> days;  // sorted by (destination, due_day, method)
  std::vector<AggregateRow> rows;

  std::optional<double> mean(const std::string& tier, Method method, Metric metric) const;
  std::string to_json() const;
  std::string to_text() const;
};

// Groups per tier and method. Every destination-day must carry each method
// exactly once (DataError otherwise). Under cross-tier normalisation travel
// distance is divided by the mean TL miles of `reference_tier` instead.
Report compare_report(std::vector<DayMetrics> days, Normalize normalize, nlohmann::ordered_json config,
                      const std::string& reference_tier = "high");

}  // namespace loadcons::eval
