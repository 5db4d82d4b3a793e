#include "lbsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lbsim {

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("percentile: empty samples");
  if (p < 0.0 || p > 100.0) {
    throw std::invalid_argument("percentile: p out of [0, 100]");
  }
  std::sort(samples.begin(), samples.end());
  if (p == 0.0) return samples.front();
  auto n = static_cast<double>(samples.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  return samples[rank - 1];
}

double jain_fairness(const std::vector<double>& counts) {
  if (counts.empty()) throw std::invalid_argument("jain: empty counts");
  double sum = 0.0, sum_sq = 0.0;
  for (double x : counts) {
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) throw std::invalid_argument("jain: all-zero counts");
  return sum * sum / (counts.size() * sum_sq);
}

namespace {

StatSummary summarize(const std::vector<double>& samples) {
  StatSummary s;
  if (samples.empty()) return s;
  s.present = true;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / samples.size();
  s.p50 = percentile(samples, 50.0);
  s.p95 = percentile(samples, 95.0);
  s.p99 = percentile(samples, 99.0);
  s.max = *std::max_element(samples.begin(), samples.end());
  return s;
}

}  // namespace

MetricsReport finalize(const MetricsAccumulator& acc, double horizon,
                       const RunMeta& meta) {
  MetricsReport r;
  r.run_id = meta.run_id;
  r.mode = meta.mode;
  r.policy = meta.policy;
  r.seed = meta.seed;
  r.horizon = horizon;
  r.generated = acc.generated;
  r.completed = acc.completed;
  r.dropped = acc.dropped;
  r.throughput = horizon > 0.0 ? acc.completed / horizon : 0.0;
  r.response_time = summarize(acc.response_times);
  if (!acc.distribution_times.empty()) {
    r.dt_present = true;
    double sum = 0.0;
    for (double v : acc.distribution_times) sum += v;
    r.dt_mean = sum / acc.distribution_times.size();
    r.dt_p95 = percentile(acc.distribution_times, 95.0);
  }
  std::vector<double> counts;
  std::uint64_t max_assigned = 0, min_assigned = 0;
  bool first = true;
  for (const auto& [id, n] : acc.assigned) {
    ServerSummary s;
    s.id = id;
    s.assigned = n;
    auto cit = acc.final_credits.find(id);
    s.credits = cit != acc.final_credits.end() ? cit->second : 0;
    auto bit = acc.busy_time.find(id);
    auto kit = acc.concurrency.find(id);
    int slots = kit != acc.concurrency.end() ? kit->second : 1;
    if (bit != acc.busy_time.end() && horizon > 0.0) {
      s.utilization = bit->second / (horizon * slots);
    }
    for (const auto& [eid, t] : acc.evictions) {
      if (eid == id) {
        s.evicted = true;
        s.evicted_at = t;
      }
    }
    r.servers.push_back(std::move(s));
    counts.push_back(static_cast<double>(n));
    if (first) {
      max_assigned = min_assigned = n;
      first = false;
    } else {
      max_assigned = std::max(max_assigned, n);
      min_assigned = std::min(min_assigned, n);
    }
  }
  r.skew = max_assigned - min_assigned;
  bool any_assigned = false;
  for (double c : counts) any_assigned = any_assigned || c > 0.0;
  if (any_assigned) r.jain = jain_fairness(counts);
  r.evictions = acc.evictions;
  r.queue_max_depth = acc.queue_max_depth;
  return r;
}

nlohmann::json report_to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["run_id"] = r.run_id;
  j["mode"] = r.mode;
  j["policy"] = r.policy;
  j["seed"] = r.seed;
  j["horizon"] = r.horizon;
  j["generated"] = r.generated;
  j["completed"] = r.completed;
  j["dropped"] = r.dropped;
  j["throughput"] = r.throughput;
  if (r.response_time.present) {
    j["response_time"] = {{"mean", r.response_time.mean},
                          {"p50", r.response_time.p50},
                          {"p95", r.response_time.p95},
                          {"p99", r.response_time.p99},
                          {"max", r.response_time.max}};
  } else {
    j["response_time"] = nullptr;
  }
  if (r.dt_present) {
    j["distribution_time"] = {{"mean", r.dt_mean}, {"p95", r.dt_p95}};
  } else {
    j["distribution_time"] = nullptr;
  }
  auto servers = nlohmann::json::array();
  for (const auto& s : r.servers) {
    nlohmann::json e = {{"id", s.id},
                        {"assigned", s.assigned},
                        {"credits", s.credits},
                        {"utilization", s.utilization}};
    if (s.evicted) e["evicted_at"] = s.evicted_at;
    servers.push_back(std::move(e));
  }
  j["servers"] = std::move(servers);
  j["skew"] = r.skew;
  j["jain"] = r.jain ? nlohmann::json(*r.jain) : nlohmann::json(nullptr);
  auto evictions = nlohmann::json::array();
  for (const auto& [id, t] : r.evictions) {
    evictions.push_back({{"server", id}, {"t", t}});
  }
  j["evictions"] = std::move(evictions);
  j["queue_max_depth"] = r.queue_max_depth;
  return j;
}

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string csv_header() {
  return "run_id,mode,policy,seed,generated,completed,dropped,throughput,"
         "rt_mean,rt_p50,rt_p95,rt_p99,dt_mean,dt_p95,skew,jain,evictions";
}

std::string report_to_csv_row(const MetricsReport& r) {
  std::string row;
  auto add = [&row](const std::string& field) {
    if (!row.empty()) row += ',';
    row += field;
  };
  add(r.run_id);
  add(r.mode);
  add(r.policy);
  add(std::to_string(r.seed));
  add(std::to_string(r.generated));
  add(std::to_string(r.completed));
  add(std::to_string(r.dropped));
  add(format_float(r.throughput));
  if (r.response_time.present) {
    add(format_float(r.response_time.mean));
    add(format_float(r.response_time.p50));
    add(format_float(r.response_time.p95));
    add(format_float(r.response_time.p99));
  } else {
    add("");
    add("");
    add("");
    add("");
  }
  if (r.dt_present) {
    add(format_float(r.dt_mean));
    add(format_float(r.dt_p95));
  } else {
    add("");
    add("");
  }
  add(std::to_string(r.skew));
  add(r.jain ? format_float(*r.jain) : "");
  add(std::to_string(r.evictions.size()));
  return row;
}

}  // namespace lbsim
