#include "leakloc/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "leakloc/error.hpp"
#include "leakloc/matrices.hpp"

namespace leakloc {

Summary summarize(std::span<const std::size_t> counts) {
  if (counts.empty()) throw std::invalid_argument("summarize: empty list");
  std::vector<std::size_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  Summary s;
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  s.median = static_cast<double>(sorted[(sorted.size() - 1) / 2]);
  s.max = static_cast<double>(sorted.back());
  std::size_t best_run = 0;
  for (std::size_t a = 0; a < sorted.size();) {
    std::size_t b = a;
    while (b < sorted.size() && sorted[b] == sorted[a]) ++b;
    if (b - a > best_run) {
      best_run = b - a;
      s.mode = static_cast<double>(sorted[a]);
    }
    a = b;
  }
  if (sorted.size() > 1) {
    double ss = 0.0;
    for (std::size_t c : sorted) ss += (static_cast<double>(c) - s.mean) * (static_cast<double>(c) - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

NetworkStats network_stats(const Network& net) {
  NetworkStats st;
  st.n = net.n();
  st.m = net.m();
  if (st.n > 1) st.q = 2.0 * static_cast<double>(st.m) / (static_cast<double>(st.n) * static_cast<double>(st.n - 1));
  if (st.n > 0) st.mean_degree = 2.0 * static_cast<double>(st.m) / static_cast<double>(st.n);
  for (std::size_t v = 0; v < net.n(); ++v) st.max_degree = std::max(st.max_degree, net.degree(v));
  return st;
}

namespace {

template <typename T>
void append_bytes(std::string& key, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  key.append(buf, sizeof(T));
}

std::string cache_key(const BisectionProblem& problem, PartitionMethod method, const CampaignConfig& config) {
  std::string key;
  const Network& net = *problem.net;
  key.reserve(16 + 4 * net.n() + 20 * net.m());
  append_bytes(key, static_cast<int>(method));
  append_bytes(key, static_cast<int>(problem.mode));
  append_bytes(key, problem.gamma);
  append_bytes(key, static_cast<int>(config.spectral_rule));
  append_bytes(key, config.ilp_node_budget);
  append_bytes(key, net.n());
  for (const Node& v : net.nodes()) append_bytes(key, v.id);
  for (std::size_t k = 0; k < net.m(); ++k) {
    const Edge& e = net.edges()[k];
    append_bytes(key, e.id);
    append_bytes(key, e.i);
    append_bytes(key, e.j);
    append_bytes(key, problem.weights[k]);
  }
  return key;
}

}  // namespace

Partition PartitionCache::get_or_compute(const BisectionProblem& problem, PartitionMethod method,
                                         const CampaignConfig& config) {
  const std::string key = cache_key(problem, method, config);
  std::promise<Partition> promise;
  std::shared_future<Partition> future;
  bool owner = false;
  {
    std::unique_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      future = it->second;
    } else {
      future = promise.get_future().share();
      entries_.emplace(key, future);
      owner = true;
    }
  }
  // Threads asking for a partition already being computed wait for it.
  if (owner) {
    try {
      promise.set_value(run_partitioner(problem, method, config));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

std::size_t PartitionCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t PartitionCache::hits() const {
  std::shared_lock lock(mutex_);
  return hits_;
}

std::vector<LeakLocation> study_sites(const Network& net, LeakMode mode, double pipe_fraction) {
  std::vector<LeakLocation> sites;
  if (mode == LeakMode::Node) {
    for (const Node& v : net.nodes()) sites.emplace_back(NodeSite{v.id});
  } else {
    for (const Edge& e : net.edges()) sites.emplace_back(PipeSite{e.id, pipe_fraction});
  }
  return sites;
}

std::string site_label(const LeakLocation& site) {
  if (const auto* n = std::get_if<NodeSite>(&site)) return "node:" + std::to_string(n->node);
  const auto& p = std::get<PipeSite>(site);
  std::ostringstream out;
  out << "pipe:" << p.edge << "@" << p.fraction;
  return out.str();
}

ScenarioResult run_scenario(const Network& net, const LeakLocation& site, const StudyOptions& options,
                            PartitionCache* cache) {
  LeakScenario scenario;
  scenario.leaks.push_back({site, options.leak_magnitude});
  const Network leaky = with_leak_supply(net, scenario);
  OracleReadings oracle(leaky, scenario, options.config.disruptive_valves);
  PartitionProvider provider;
  if (cache) {
    provider = [cache](const BisectionProblem& problem, PartitionMethod method, const CampaignConfig& config) {
      return cache->get_or_compute(problem, method, config);
    };
  }
  const ProtocolResult run = run_protocol(leaky, oracle, options.config, provider);
  ScenarioResult r;
  r.site = site;
  r.query_count = run.query_count();
  r.total_cost = run.total_cost;
  r.stages = run.stages;
  r.leaky_set_size = run.leaky_set.size();
  r.found = std::any_of(run.leaky_set.begin(), run.leaky_set.end(), [&](const Finding& f) { return f.contains(site); });
  return r;
}

namespace {

StudyResult finish(const Network& net, std::string name, std::vector<ScenarioResult> per_scenario, double seconds) {
  StudyResult result;
  result.network_name = std::move(name);
  result.per_scenario = std::move(per_scenario);
  std::vector<std::size_t> counts;
  counts.reserve(result.per_scenario.size());
  for (const ScenarioResult& r : result.per_scenario) counts.push_back(r.query_count);
  if (!counts.empty()) result.summary = summarize(counts);
  result.network_stats = network_stats(net);
  result.seconds = seconds;
  return result;
}

void require_connected(const Network& net) {
  if (net.n() == 0 || connected_components(net).size() != 1) throw DisconnectedInput("study network is not connected");
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

StudyResult enumerative_study_serial(const Network& net, const StudyOptions& options, std::string name) {
  require_connected(net);
  const auto start = std::chrono::steady_clock::now();
  const auto sites = study_sites(net, options.config.mode, options.pipe_fraction);
  PartitionCache cache;
  std::vector<ScenarioResult> out;
  out.reserve(sites.size());
  for (const LeakLocation& site : sites)
    out.push_back(run_scenario(net, site, options, options.cache_partitions ? &cache : nullptr));
  return finish(net, std::move(name), std::move(out), elapsed(start));
}

StudyResult enumerative_study(const Network& net, const StudyOptions& options, std::string name) {
  require_connected(net);
  const auto start = std::chrono::steady_clock::now();
  const auto sites = study_sites(net, options.config.mode, options.pipe_fraction);
  PartitionCache cache;
  PartitionCache* shared = options.cache_partitions ? &cache : nullptr;
  std::vector<ScenarioResult> out(sites.size());
  std::vector<std::exception_ptr> errors(sites.size());
  const auto count = static_cast<long long>(sites.size());
#ifdef _OPENMP
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (long long k = 0; k < count; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = run_scenario(net, sites[static_cast<std::size_t>(k)], options, shared);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return finish(net, std::move(name), std::move(out), elapsed(start));
}

void write_scenarios_csv(std::ostream& out, const StudyResult& result) {
  out << "site,query_count,total_cost,stages,found,leaky_set_size\n";
  for (const ScenarioResult& r : result.per_scenario)
    out << site_label(r.site) << ',' << r.query_count << ',' << r.total_cost << ',' << r.stages << ','
        << (r.found ? "true" : "false") << ',' << r.leaky_set_size << '\n';
}

void write_summary_table(std::ostream& out, std::span<const StudyResult> results) {
  std::size_t width = 7;
  for (const StudyResult& r : results) width = std::max(width, r.network_name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "Network" << " | mean   | median | mode | max | std\n";
  out << std::string(width, '-') << "-|--------|--------|------|-----|------\n";
  for (const StudyResult& r : results) {
    const Summary& s = r.summary;
    out << std::left << std::setw(static_cast<int>(width)) << r.network_name << " | " << std::right << std::fixed
        << std::setprecision(2) << std::setw(6) << s.mean << " | " << std::setw(6) << std::setprecision(0) << s.median
        << " | " << std::setw(4) << s.mode << " | " << std::setw(3) << s.max << " | " << std::setprecision(2) << s.std
        << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

void write_summary_csv(std::ostream& out, std::span<const StudyResult> results) {
  out << "Network,mean,median,mode,max,std\n";
  for (const StudyResult& r : results) {
    const Summary& s = r.summary;
    out << r.network_name << ',' << s.mean << ',' << s.median << ',' << s.mode << ',' << s.max << ',' << s.std << '\n';
  }
}

void write_study_json(std::ostream& out, const StudyResult& result) {
  using nlohmann::json;
  json scenarios = json::array();
  for (const ScenarioResult& r : result.per_scenario)
    scenarios.push_back({{"site", site_label(r.site)},
                         {"query_count", r.query_count},
                         {"total_cost", r.total_cost},
                         {"stages", r.stages},
                         {"found", r.found},
                         {"leaky_set_size", r.leaky_set_size}});
  const Summary& s = result.summary;
  const NetworkStats& st = result.network_stats;
  json doc = {{"network", result.network_name},
              {"network_stats",
               {{"n", st.n}, {"m", st.m}, {"q", st.q}, {"mean_degree", st.mean_degree}, {"max_degree", st.max_degree}}},
              {"summary", {{"mean", s.mean}, {"median", s.median}, {"mode", s.mode}, {"max", s.max}, {"std", s.std}}},
              {"per_scenario", std::move(scenarios)}};
  out << doc.dump(2) << '\n';
}

}  // namespace leakloc
