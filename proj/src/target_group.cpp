#include "lbsim/target_group.hpp"

#include <algorithm>
#include <stdexcept>

namespace lbsim {

double effective_rate(const ServerState& server, double kappa) {
  if (!server.alive) {
    throw std::logic_error("effective_rate on dead server '" + server.id + "'");
  }
  return server.base_rate * server.degrade_factor * (1.0 + kappa * server.credits);
}

double service_completion_time(const ServerState& server, double demand,
                               double now, double kappa) {
  if (static_cast<int>(server.in_service.size()) >= server.concurrency_limit) {
    throw std::logic_error("start_service: concurrency exceeded on '" +
                           server.id + "'");
  }
  return now + demand / effective_rate(server, kappa);
}

int bucket_depth(std::size_t n) {
  if (n == 0) return 0;
  if (n <= 3) return 1;
  if (n <= 10) return 2;
  return 3;
}

int bucket_credits(int credits, int credit_cap) {
  if (credit_cap <= 0) return 0;
  int b = credits * 3 / credit_cap;
  return std::clamp(b, 0, 2);
}

Observation agent_observe(const ServerState& server, const QueueTier& tier,
                          int credit_cap) {
  Observation obs;
  obs.depth_bucket = bucket_depth(tier.total_depth(server.subscription));
  obs.backlog_bucket = bucket_depth(server.backlog.size());
  obs.credit_bucket = bucket_credits(server.credits, credit_cap);
  return obs;
}

int agent_decide(const Observation& obs, const PolicyState& policy, Rng& rng) {
  // Exploration draw happens first so the rng advances identically on both
  // branches' entry.
  double u = rng.uniform();
  if (u < policy.epsilon) {
    return static_cast<int>(rng.uniform_int(kNumActions));
  }
  return policy.greedy_action(obs.index());
}

AgentReport build_report(const std::string& server_id,
                         const std::vector<CompletionEvent>& completions,
                         const std::vector<PullEvent>& pulls,
                         double window_start, double window_end) {
  if (!(window_end > window_start)) {
    throw std::invalid_argument("build_report: window_end must be > window_start");
  }
  AgentReport report;
  report.server_id = server_id;
  report.window_start = window_start;
  report.window_end = window_end;
  double total_processing = 0.0;
  for (const auto& c : completions) {
    if (c.time >= window_start && c.time < window_end) {
      ++report.completed;
      total_processing += c.processing_time;
    }
  }
  if (report.completed > 0) {
    report.mean_processing_time = total_processing / report.completed;
  }
  for (const auto& p : pulls) {
    if (p.time >= window_start && p.time < window_end) {
      ++report.pulls;
      report.max_pull_wait = std::max(report.max_pull_wait, p.wait);
    }
  }
  return report;
}

}  // namespace lbsim
