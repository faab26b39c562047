#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "loadcons/cluster.hpp"
#include "loadcons/geo.hpp"
#include "loadcons/model.hpp"

namespace loadcons::mining {

// A load with its due date replaced by day-of-week and transit days. Loads
// with equal (origin, due_dow, transit_days) are the same item.
struct AbstractPoint {
  Node origin;
  int due_dow = 0;
  int transit_days = 0;

  auto operator<=>(const AbstractPoint&) const = default;
  bool operator==(const AbstractPoint&) const = default;
};

std::string to_string(const AbstractPoint& p);

AbstractPoint abstract_load(const Load& load);

// Mining group: destination and due day-of-week.
struct GroupKey {
  Node destination;
  int due_dow = 0;

  auto operator<=>(const GroupKey&) const = default;
  bool operator==(const GroupKey&) const = default;
};

using Transaction = std::vector<AbstractPoint>;  // sorted, no duplicates
using TransactionGroups = std::map<GroupKey, std::vector<Transaction>>;

// One transaction per cluster, grouped by (destination, due_day mod 7).
// Transactions keep the clusters' canonical order. Throws DataError for an
// unknown member load.
TransactionGroups abstract_clusters(const std::vector<cluster::Cluster>& clusters,
                                    const Network& network);

// Sort-level timing context for the time-feasibility predicates.
struct TimeContext {
  std::function<const Sort*(const Node&)> sort_of;
  geo::TravelFn travel;  // minutes between terminals
};

TimeContext network_time_context(const Network& network, const geo::GeoConfig& cfg = {});

// Whether `from` can reach the origin of `to` in time:
//   dep(from) + travel(from, to) <= arr(to) + (omega_from - omega_to) * 1440
// Throws DataError when either sort is unknown.
bool kappa_pair(const AbstractPoint& from, const AbstractPoint& to, const TimeContext& ctx);

// True iff some ordered pair of distinct members satisfies kappa_pair.
// Throws ContractViolation for fewer than two items.
bool kappa_set(const std::vector<AbstractPoint>& items, const TimeContext& ctx);

// H(S): origins of members that at least one other member can reach in time.
// Throws ContractViolation when the result would be empty.
std::set<Node> extract_cp(const std::vector<AbstractPoint>& items, const TimeContext& ctx);

struct CandidateSet {
  GroupKey group;
  std::vector<AbstractPoint> items;  // sorted
  int support_count = 0;
  std::set<Node> consolidation_points;
};

std::set<Node> union_cp(const std::vector<CandidateSet>& candidates);

// Absolute count, or a fraction of the group's transactions.
struct MinSupport {
  double value = 5.0;
  bool fractional = false;

  static MinSupport count(int n) { return {static_cast<double>(n), false}; }
  static MinSupport fraction(double f) { return {f, true}; }
  // "5" -> count, "0.25" -> fraction. Throws ConfigError on bad input.
  static MinSupport parse(const std::string& text);

  int resolve(std::size_t n_transactions) const;
};

// Items ordered by descending appearance count, ties by ascending item.
std::vector<std::pair<AbstractPoint, int>> frequency_order(const std::vector<Transaction>& transactions);

// Each transaction rewritten in frequency_order (the FP-tree insertion order).
std::vector<Transaction> reorder_transactions(const std::vector<Transaction>& transactions);

// Pairwise predicate over items: can `from` consolidate at `to`.
using PairFeasibility = std::function<bool(const AbstractPoint& from, const AbstractPoint& to)>;

PairFeasibility kappa_pair_predicate(const TimeContext& ctx);

struct Itemset {
  std::vector<AbstractPoint> items;  // sorted
  int support_count = 0;

  auto operator<=>(const Itemset&) const = default;
};

struct MiningOptions {
  bool maximal_only = false;
  bool collect_rejected = false;
  // When false every frequent itemset of size >= 2 passes (kappa == true).
  bool apply_constraint = true;
};

struct MiningResult {
  std::vector<CandidateSet> candidates;  // sorted by items
  std::vector<Itemset> rejected;         // frequent but infeasible, if collected
  std::size_t frequent_itemsets = 0;     // size >= 2, before the constraint
};

// All frequent itemsets of size >= 2 (support counted as containing
// transactions), mined with FP-growth. Itemsets failing the set-level
// feasibility check built from `feasible` are dropped, and each survivor gets
// its consolidation points.
MiningResult fp_growth_constrained(const GroupKey& group, const std::vector<Transaction>& transactions,
                                   int min_sup_count, const PairFeasibility& feasible,
                                   const MiningOptions& options = {});

// Plain frequent itemsets (any size >= 1), for reuse and testing.
std::vector<Itemset> fp_growth_frequent(const std::vector<Transaction>& transactions, int min_sup_count);

// Mines every group; groups are distributed over `threads` OpenMP workers.
std::map<GroupKey, MiningResult> mine_groups(const TransactionGroups& groups, const MinSupport& min_sup,
                                             const TimeContext& ctx, const MiningOptions& options,
                                             int threads = 1);

}  // namespace loadcons::mining
