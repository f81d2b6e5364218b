#pragma once

#include <cstddef>
#include <future>
#include <memory>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "leakloc/protocol.hpp"

namespace leakloc {

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double mode = 0.0;
  double max = 0.0;
  double std = 0.0;
};

/// Sample standard deviation; mode is the smallest most frequent value;
/// even-length median is the lower middle. Throws std::invalid_argument on
/// an empty list.
Summary summarize(std::span<const std::size_t> counts);

struct NetworkStats {
  std::size_t n = 0;
  std::size_t m = 0;
  double q = 0.0;  // link density 2m / (n (n - 1))
  double mean_degree = 0.0;
  std::size_t max_degree = 0;
};

NetworkStats network_stats(const Network& net);

/// Memoizes partitions by candidate topology, weights and window. Safe for
/// concurrent use; the partitioners are deterministic, so sharing it across
/// scenarios does not change results.
class PartitionCache {
 public:
  Partition get_or_compute(const BisectionProblem& problem, PartitionMethod method, const CampaignConfig& config);
  std::size_t size() const;
  std::size_t hits() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::shared_future<Partition>> entries_;
  std::size_t hits_ = 0;
};

struct ScenarioResult {
  LeakLocation site;
  std::size_t query_count = 0;
  double total_cost = 0.0;
  std::size_t stages = 0;
  bool found = false;  // every true leak lies in the final leaky set
  std::size_t leaky_set_size = 0;
};

struct StudyOptions {
  CampaignConfig config;
  double pipe_fraction = 0.5;
  double leak_magnitude = 1.0;
  int threads = 0;  // 0 keeps the OpenMP default
  bool cache_partitions = true;
};

struct StudyResult {
  std::string network_name;
  std::vector<ScenarioResult> per_scenario;
  Summary summary;
  NetworkStats network_stats;
  double seconds = 0.0;
};

/// Leak sites visited by an enumerative study: every node, or every edge at
/// `pipe_fraction` in pipe mode.
std::vector<LeakLocation> study_sites(const Network& net, LeakMode mode, double pipe_fraction);

/// One oracle protocol run per leak site, parallel across scenarios with an
/// ordered reduce.
StudyResult enumerative_study(const Network& net, const StudyOptions& options, std::string name = "network");
/// Single-threaded reference for the parallel study.
StudyResult enumerative_study_serial(const Network& net, const StudyOptions& options, std::string name = "network");

ScenarioResult run_scenario(const Network& net, const LeakLocation& site, const StudyOptions& options,
                            PartitionCache* cache);

std::string site_label(const LeakLocation& site);

void write_scenarios_csv(std::ostream& out, const StudyResult& result);
/// Rows with the columns Network | mean | median | mode | max | std.
void write_summary_table(std::ostream& out, std::span<const StudyResult> results);
void write_summary_csv(std::ostream& out, std::span<const StudyResult> results);
void write_study_json(std::ostream& out, const StudyResult& result);

}  // namespace leakloc
