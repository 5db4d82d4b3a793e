#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lbsim {

// Nearest-rank: value at 1-based index ceil(p/100 * n) of the sorted samples;
// p = 0 returns the minimum. Throws on empty samples.
double percentile(std::vector<double> samples, double p);

// (sum x)^2 / (n * sum x^2). Throws on empty or all-zero counts.
double jain_fairness(const std::vector<double>& counts);

struct StatSummary {
  bool present = false;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

struct ServerSummary {
  std::string id;
  std::uint64_t assigned = 0;
  int credits = 0;
  double utilization = 0.0;
  bool evicted = false;
  double evicted_at = 0.0;
};

struct MetricsReport {
  std::string run_id;
  std::string mode;    // "pull_rl" | "push"
  std::string policy;  // push policy tag, "-" in pull mode
  std::uint64_t seed = 0;
  double horizon = 0.0;
  std::uint64_t generated = 0;
  std::uint64_t completed = 0;
  std::uint64_t dropped = 0;
  double throughput = 0.0;  // completed / horizon
  StatSummary response_time;      // completion - arrival
  bool dt_present = false;        // distribution time: assignment/pull - arrival
  double dt_mean = 0.0;
  double dt_p95 = 0.0;
  std::vector<ServerSummary> servers;
  std::uint64_t skew = 0;  // max - min assigned
  std::optional<double> jain;
  std::vector<std::pair<std::string, double>> evictions;
  std::map<std::string, std::uint64_t> queue_max_depth;
};

// Raw per-run accumulators; finalize() is pure over them.
struct MetricsAccumulator {
  std::uint64_t generated = 0;
  std::uint64_t completed = 0;
  std::uint64_t dropped = 0;
  std::vector<double> response_times;
  std::vector<double> distribution_times;
  std::map<std::string, std::uint64_t> assigned;
  std::map<std::string, double> busy_time;  // summed service durations
  std::map<std::string, int> final_credits;
  std::map<std::string, int> concurrency;
  std::vector<std::pair<std::string, double>> evictions;
  std::map<std::string, std::uint64_t> queue_max_depth;
};

struct RunMeta {
  std::string run_id;
  std::string mode;
  std::string policy;
  std::uint64_t seed = 0;
};

MetricsReport finalize(const MetricsAccumulator& acc, double horizon,
                       const RunMeta& meta);

nlohmann::json report_to_json(const MetricsReport& r);

// Fixed column order:
// run_id,mode,policy,seed,generated,completed,dropped,throughput,
// rt_mean,rt_p50,rt_p95,rt_p99,dt_mean,dt_p95,skew,jain,evictions
std::string csv_header();
std::string report_to_csv_row(const MetricsReport& r);

// 6 significant digits, '.' decimal separator
std::string format_float(double v);

}  // namespace lbsim
