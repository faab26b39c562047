#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadcons/cluster.hpp"
#include "loadcons/eval.hpp"
#include "loadcons/mining.hpp"
#include "loadcons/pathgen.hpp"
#include "loadcons/solver.hpp"

namespace loadcons::pipeline {

struct PipelineConfig {
  double eps = 0.30;
  int min_pts = 2;
  std::string min_sup = "5";
  bool maximal = false;
  double speed_mph = 50.0;
  double earth_radius_miles = 3958.8;
  std::string reference_direction = "west";
  double dwell_minutes = 0.0;
  std::map<std::string, double> rates;
  double default_rate = 1.0;
  double fixed_dispatch = 0.0;
  bool require_comembership = false;
  double partial_threshold = 0.80;
  std::string capacity_scope = "all";
  std::string normalize = "within";
  std::string reference_tier = "high";
  std::uint64_t budget_nodes = 10'000'000;
  double budget_secs = 60.0;
  int jobs = 1;
  std::uint64_t seed = 7;
  int test_weeks = 3;
  bool weekdays_only = true;

  // Throws ConfigError naming the offending field.
  void validate() const;

  geo::GeoConfig geo() const;
  pathgen::PathGenConfig pathgen() const;
  mining::MinSupport support() const;
  solver::Budget budget() const;

  // Settings that shape results. Parallelism is left out on purpose so the
  // echo is identical for every worker count.
  nlohmann::ordered_json echo() const;
};

// Applies the keys of a JSON object on top of `base`; unknown keys throw.
PipelineConfig parse_pipeline_config(const std::string& json_text, PipelineConfig base = {});

// Structured log: one JSON object per line.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::filesystem::path path);

  void event(const std::string& stage, nlohmann::ordered_json fields = nlohmann::ordered_json::object());
  void flush() const;

 private:
  std::optional<std::filesystem::path> path_;
  std::vector<std::string> lines_;
};

// Which part of the history an artifact was derived from.
struct Provenance {
  std::string split;  // "train" | "test" | "all"
  std::int64_t first_day = 0;
  std::int64_t last_day = -1;

  nlohmann::ordered_json to_json() const;
  static Provenance from_json(const nlohmann::json& j);
  static Provenance of(const std::string& split, const std::vector<Load>& loads);
};

std::vector<Load> partial_loads(const std::vector<Load>& loads, double threshold);

// Tactical stage: clusters and mined candidates from one slice of history.
struct Tactical {
  Provenance provenance;
  cluster::ClusterResult clusters;
  std::vector<cluster::SkippedLoad> skipped;
  mining::TransactionGroups transactions;
  std::map<mining::GroupKey, mining::MiningResult> mined;

  std::vector<mining::CandidateSet> candidates() const;  // all groups, group order
  std::vector<mining::CandidateSet> candidates(const mining::GroupKey& group) const;
};

Tactical run_clustering(const Network& network, const std::vector<Load>& history, const PipelineConfig& config,
                        const std::string& split);
void run_mining(Tactical& tactical, const Network& network, const PipelineConfig& config);

std::string clusters_jsonl(const cluster::ClusterResult& clusters);
std::string transactions_jsonl(const mining::TransactionGroups& groups, const Provenance& p);
std::string candidates_jsonl(const std::vector<mining::CandidateSet>& candidates, const Provenance& p);
std::string cps_json(const std::vector<mining::CandidateSet>& candidates, const Provenance& p);

struct MinedArtifacts {
  Provenance provenance;
  std::vector<mining::CandidateSet> candidates;
  mining::TransactionGroups transactions;
};

// candidates.jsonl plus transactions.jsonl from the same directory when present.
MinedArtifacts read_mined(const std::filesystem::path& candidates_file);

// One destination-day of the operational stage.
struct DayInstance {
  eval::InstanceInfo info;
  Provenance provenance;
  std::vector<Node> hubs;
  solver::Instance instance;
};

std::string day_instance_json(const DayInstance& d);
DayInstance day_instance_from_json(const nlohmann::json& j, solver::CapacityScope scope);
std::vector<DayInstance> read_day_instances(const std::filesystem::path& paths_file, solver::CapacityScope scope);

// Builds one destination-day from its partial test loads and the group's candidates.
DayInstance build_day(const Node& destination, std::int64_t due_day, const std::string& tier,
                      std::vector<Load> partials, const std::vector<mining::CandidateSet>& group_candidates,
                      const Network& network, const PipelineConfig& config, const Provenance& provenance);

// Every (destination, due day) present in `loads`, optionally weekdays only,
// built in parallel over `jobs` workers. Errors name the destination-day.
std::vector<DayInstance> build_days(const std::vector<Load>& test_loads, const Tactical& tactical,
                                    const std::map<Node, std::string>& tiers, const Network& network,
                                    const PipelineConfig& config, const Provenance& provenance);

struct DayPlans {
  solver::Plan tl;
  solver::Plan nnch;
  solver::Plan spot;
};

// Solves TL, NNCH and the exact model; throws when any plan fails verification.
DayPlans plan_day(const DayInstance& day, const PipelineConfig& config);

std::string plan_jsonl(const std::vector<DayInstance>& days, const std::vector<solver::Plan>& plans);
std::string plan_summary_json(const std::vector<DayInstance>& days, const std::vector<solver::Plan>& plans,
                              const std::string& solver_name);
// Reads plan.jsonl (and optimal flags from plan_summary.json beside it) back
// against the instances it was computed for.
std::vector<solver::Plan> read_plans(const std::filesystem::path& plan_file, const std::vector<DayInstance>& days);

struct TaskError {
  std::string stage;
  std::string where;  // "T012/S3 day 170"
  std::string message;
};

struct OperationalResult {
  std::vector<DayInstance> days;
  std::vector<DayPlans> plans;
  std::vector<TaskError> errors;
  std::vector<double> solve_ms;  // per day, for the log
};

// Plans every day on `jobs` OpenMP workers; results keep the order of `days`.
// Failed days are reported in `errors` and left out of `days`/`plans`.
OperationalResult plan_days(std::vector<DayInstance> days, const PipelineConfig& config);

eval::Report evaluate_days(const std::vector<DayInstance>& days, const std::vector<solver::Plan>& tl,
                           const std::vector<solver::Plan>& nnch, const std::vector<solver::Plan>& spot,
                           const mining::TransactionGroups& training, const PipelineConfig& config);

struct PipelineOptions {
  std::filesystem::path data_dir;  // existing network; empty means generate
  std::string gen_config_json;     // generator overrides when generating
  std::optional<int> days;         // generator horizon override
};

// Whole run into `out`: data (when generated), train/, plans/, report.json,
// report.txt and log.jsonl. Returns the process exit status.
int run_pipeline(const PipelineConfig& config, const PipelineOptions& options, const std::filesystem::path& out);

}  // namespace loadcons::pipeline
