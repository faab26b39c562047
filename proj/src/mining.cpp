#include "loadcons/mining.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>

#include <omp.h>

namespace loadcons::mining {

std::string to_string(const AbstractPoint& p) {
  return loadcons::to_string(p.origin) + "@dow" + std::to_string(p.due_dow) + "+" +
         std::to_string(p.transit_days) + "d";
}

AbstractPoint abstract_load(const Load& load) {
  return {load.origin, day_of_week(load.due_day), static_cast<int>(transit_days(load))};
}

TransactionGroups abstract_clusters(const std::vector<cluster::Cluster>& clusters,
                                    const Network& network) {
  TransactionGroups groups;
  for (const auto& c : clusters) {
    Transaction t;
    t.reserve(c.members.size());
    for (const auto& m : c.members) {
      const Load* l = network.find_load(m.load_id);
      if (l == nullptr) throw DataError("cluster member '" + m.load_id + "' is not a known load");
      t.push_back(abstract_load(*l));
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    groups[GroupKey{c.destination, day_of_week(c.due_day)}].push_back(std::move(t));
  }
  return groups;
}

TimeContext network_time_context(const Network& network, const geo::GeoConfig& cfg) {
  return TimeContext{[&network](const Node& n) { return network.find_sort(n); },
                     geo::network_travel(network, cfg)};
}

bool kappa_pair(const AbstractPoint& from, const AbstractPoint& to, const TimeContext& ctx) {
  const Sort* s_from = ctx.sort_of(from.origin);
  const Sort* s_to = ctx.sort_of(to.origin);
  if (s_from == nullptr) throw DataError("unknown sort " + loadcons::to_string(from.origin));
  if (s_to == nullptr) throw DataError("unknown sort " + loadcons::to_string(to.origin));
  const double lhs = s_from->dep_minutes + ctx.travel(from.origin.terminal, to.origin.terminal);
  const double rhs = s_to->arr_minutes +
                     static_cast<double>(from.transit_days - to.transit_days) * kMinutesPerDay;
  return lhs <= rhs;
}

PairFeasibility kappa_pair_predicate(const TimeContext& ctx) {
  return [ctx](const AbstractPoint& a, const AbstractPoint& b) { return kappa_pair(a, b, ctx); };
}

bool kappa_set(const std::vector<AbstractPoint>& items, const TimeContext& ctx) {
  if (items.size() < 2) throw ContractViolation("kappa_set needs at least two items");
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (i != j && kappa_pair(items[i], items[j], ctx)) return true;
    }
  }
  return false;
}

std::set<Node> extract_cp(const std::vector<AbstractPoint>& items, const TimeContext& ctx) {
  std::set<Node> h;
  for (std::size_t j = 0; j < items.size(); ++j) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i != j && kappa_pair(items[i], items[j], ctx)) {
        h.insert(items[j].origin);
        break;
      }
    }
  }
  if (h.empty()) throw ContractViolation("extract_cp on a set with no feasible pair");
  return h;
}

std::set<Node> union_cp(const std::vector<CandidateSet>& candidates) {
  std::set<Node> h;
  for (const auto& c : candidates) h.insert(c.consolidation_points.begin(), c.consolidation_points.end());
  return h;
}

MinSupport MinSupport::parse(const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !(v > 0.0)) {
    throw ConfigError("min support must be a positive count or a fraction in (0, 1]: '" + text + "'");
  }
  if (text.find('.') != std::string::npos) {
    if (v > 1.0) throw ConfigError("fractional min support must be in (0, 1]: '" + text + "'");
    return fraction(v);
  }
  return count(static_cast<int>(v));
}

int MinSupport::resolve(std::size_t n_transactions) const {
  if (!fractional) return std::max(1, static_cast<int>(value));
  const double need = value * static_cast<double>(n_transactions);
  return std::max(1, static_cast<int>(std::ceil(need - 1e-9)));
}

std::vector<std::pair<AbstractPoint, int>> frequency_order(const std::vector<Transaction>& transactions) {
  std::map<AbstractPoint, int> counts;
  for (const auto& t : transactions) {
    for (const auto& item : t) ++counts[item];
  }
  std::vector<std::pair<AbstractPoint, int>> order(counts.begin(), counts.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return order;
}

std::vector<Transaction> reorder_transactions(const std::vector<Transaction>& transactions) {
  const auto order = frequency_order(transactions);
  std::map<AbstractPoint, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i].first] = i;
  std::vector<Transaction> out = transactions;
  for (auto& t : out) {
    std::sort(t.begin(), t.end(),
              [&](const AbstractPoint& a, const AbstractPoint& b) { return rank.at(a) < rank.at(b); });
  }
  return out;
}

namespace {

// FP-tree over dense item ranks; rank 0 is the most frequent item.
class FpTree {
 public:
  explicit FpTree(std::size_t n_items) : head_(n_items, -1), item_count_(n_items, 0) {
    nodes_.push_back({-1, 0, -1, -1, {}});
  }

  // `path` must be in ascending rank order.
  void insert(const std::vector<int>& path, int count) {
    int cur = 0;
    for (int item : path) {
      int child = -1;
      for (int c : nodes_[static_cast<std::size_t>(cur)].children) {
        if (nodes_[static_cast<std::size_t>(c)].item == item) {
          child = c;
          break;
        }
      }
      if (child < 0) {
        child = static_cast<int>(nodes_.size());
        nodes_.push_back({item, 0, cur, head_[static_cast<std::size_t>(item)], {}});
        head_[static_cast<std::size_t>(item)] = child;
        nodes_[static_cast<std::size_t>(cur)].children.push_back(child);
      }
      nodes_[static_cast<std::size_t>(child)].count += count;
      item_count_[static_cast<std::size_t>(item)] += count;
      cur = child;
    }
  }

  std::size_t n_items() const { return head_.size(); }
  int item_count(int item) const { return item_count_[static_cast<std::size_t>(item)]; }
  bool empty() const { return nodes_.size() == 1; }

  // Prefix paths (ascending rank order) ending just above each `item` node.
  template <class Fn>
  void for_each_prefix(int item, Fn&& fn) const {
    std::vector<int> path;
    for (int n = head_[static_cast<std::size_t>(item)]; n >= 0; n = nodes_[static_cast<std::size_t>(n)].next) {
      path.clear();
      for (int p = nodes_[static_cast<std::size_t>(n)].parent; p > 0; p = nodes_[static_cast<std::size_t>(p)].parent) {
        path.push_back(nodes_[static_cast<std::size_t>(p)].item);
      }
      std::reverse(path.begin(), path.end());
      fn(path, nodes_[static_cast<std::size_t>(n)].count);
    }
  }

 private:
  struct NodeRec {
    int item;
    int count;
    int parent;
    int next;  // next node holding the same item
    std::vector<int> children;
  };
  std::vector<NodeRec> nodes_;
  std::vector<int> head_;
  std::vector<int> item_count_;
};

template <class Emit>
void grow(const FpTree& tree, std::vector<int>& suffix, int min_count, Emit& emit) {
  for (int item = static_cast<int>(tree.n_items()) - 1; item >= 0; --item) {
    const int support = tree.item_count(item);
    if (support < min_count) continue;
    suffix.push_back(item);
    emit(suffix, support);

    std::vector<int> base_count(tree.n_items(), 0);
    tree.for_each_prefix(item, [&](const std::vector<int>& path, int count) {
      for (int i : path) base_count[static_cast<std::size_t>(i)] += count;
    });
    FpTree cond(tree.n_items());
    std::vector<int> filtered;
    tree.for_each_prefix(item, [&](const std::vector<int>& path, int count) {
      filtered.clear();
      for (int i : path) {
        if (base_count[static_cast<std::size_t>(i)] >= min_count) filtered.push_back(i);
      }
      if (!filtered.empty()) cond.insert(filtered, count);
    });
    if (!cond.empty()) grow(cond, suffix, min_count, emit);
    suffix.pop_back();
  }
}

struct RankedInput {
  std::vector<AbstractPoint> items;  // by rank
  FpTree tree;
};

RankedInput build_tree(const std::vector<Transaction>& transactions, int min_count) {
  const auto order = frequency_order(transactions);
  std::vector<AbstractPoint> items;
  std::map<AbstractPoint, int> rank;
  for (const auto& [item, count] : order) {
    if (count < min_count) continue;
    rank[item] = static_cast<int>(items.size());
    items.push_back(item);
  }
  FpTree tree(items.size());
  std::vector<int> path;
  for (const auto& t : transactions) {
    path.clear();
    for (const auto& item : t) {
      const auto it = rank.find(item);
      if (it != rank.end()) path.push_back(it->second);
    }
    std::sort(path.begin(), path.end());
    if (!path.empty()) tree.insert(path, 1);
  }
  return {std::move(items), std::move(tree)};
}

std::vector<AbstractPoint> to_items(const std::vector<int>& ranks, const std::vector<AbstractPoint>& by_rank) {
  std::vector<AbstractPoint> out;
  out.reserve(ranks.size());
  for (int r : ranks) out.push_back(by_rank[static_cast<std::size_t>(r)]);
  std::sort(out.begin(), out.end());
  return out;
}

// Drops candidates that have a strict superset among the candidates.
void keep_maximal(std::vector<CandidateSet>& cands) {
  std::vector<char> keep(cands.size(), 1);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (i == j || cands[j].items.size() <= cands[i].items.size()) continue;
      if (std::includes(cands[j].items.begin(), cands[j].items.end(), cands[i].items.begin(),
                        cands[i].items.end())) {
        keep[i] = 0;
        break;
      }
    }
  }
  std::vector<CandidateSet> out;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (keep[i]) out.push_back(std::move(cands[i]));
  }
  cands = std::move(out);
}

}  // namespace

std::vector<Itemset> fp_growth_frequent(const std::vector<Transaction>& transactions, int min_sup_count) {
  if (min_sup_count < 1) throw ContractViolation("min_sup_count must be at least 1");
  auto input = build_tree(transactions, min_sup_count);
  std::vector<Itemset> out;
  auto emit = [&](const std::vector<int>& ranks, int support) {
    out.push_back({to_items(ranks, input.items), support});
  };
  std::vector<int> suffix;
  grow(input.tree, suffix, min_sup_count, emit);
  std::sort(out.begin(), out.end());
  return out;
}

MiningResult fp_growth_constrained(const GroupKey& group, const std::vector<Transaction>& transactions,
                                   int min_sup_count, const PairFeasibility& feasible,
                                   const MiningOptions& options) {
  if (min_sup_count < 1) throw ContractViolation("min_sup_count must be at least 1");
  auto input = build_tree(transactions, min_sup_count);
  const std::size_t n = input.items.size();

  // Lazily evaluated pairwise feasibility over ranks: -1 unknown, 0/1 known.
  std::vector<signed char> feas(n * n, -1);
  auto can_reach = [&](int from, int to) {
    auto& cell = feas[static_cast<std::size_t>(from) * n + static_cast<std::size_t>(to)];
    if (cell < 0) {
      cell = feasible(input.items[static_cast<std::size_t>(from)], input.items[static_cast<std::size_t>(to)]) ? 1 : 0;
    }
    return cell == 1;
  };

  MiningResult result;
  auto emit = [&](const std::vector<int>& ranks, int support) {
    if (ranks.size() < 2) return;
    ++result.frequent_itemsets;
    std::set<Node> cps;
    if (options.apply_constraint) {
      for (int to : ranks) {
        for (int from : ranks) {
          if (from != to && can_reach(from, to)) {
            cps.insert(input.items[static_cast<std::size_t>(to)].origin);
            break;
          }
        }
      }
      if (cps.empty()) {
        if (options.collect_rejected) result.rejected.push_back({to_items(ranks, input.items), support});
        return;
      }
    }
    result.candidates.push_back({group, to_items(ranks, input.items), support, std::move(cps)});
  };
  std::vector<int> suffix;
  grow(input.tree, suffix, min_sup_count, emit);

  auto by_items = [](const CandidateSet& a, const CandidateSet& b) { return a.items < b.items; };
  std::sort(result.candidates.begin(), result.candidates.end(), by_items);
  if (options.maximal_only) keep_maximal(result.candidates);
  std::sort(result.rejected.begin(), result.rejected.end());
  return result;
}

std::map<GroupKey, MiningResult> mine_groups(const TransactionGroups& groups, const MinSupport& min_sup,
                                             const TimeContext& ctx, const MiningOptions& options,
                                             int threads) {
  std::vector<const TransactionGroups::value_type*> work;
  for (const auto& g : groups) work.push_back(&g);
  std::vector<MiningResult> results(work.size());
  std::vector<std::exception_ptr> errors(work.size());
  const auto feasible = kappa_pair_predicate(ctx);
  const auto n = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& [key, transactions] = *work[static_cast<std::size_t>(i)];
    try {
      results[static_cast<std::size_t>(i)] =
          fp_growth_constrained(key, transactions, min_sup.resolve(transactions.size()), feasible, options);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::map<GroupKey, MiningResult> out;
  for (std::size_t i = 0; i < work.size(); ++i) out.emplace(work[i]->first, std::move(results[i]));
  return out;
}

}  // namespace loadcons::mining
