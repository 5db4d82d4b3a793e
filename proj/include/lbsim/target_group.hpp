#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "lbsim/queue_tier.hpp"
#include "lbsim/rl.hpp"
#include "lbsim/rng.hpp"

namespace lbsim {

// One backend server of the heterogeneous farm.
struct ServerState {
  std::string id;
  double base_rate = 1.0;  // work units per second
  int concurrency_limit = 1;
  int weight = 1;
  double degrade_factor = 1.0;  // fault injection, in (0, 1]
  bool alive = true;
  int credits = 0;
  std::deque<std::uint64_t> backlog;       // pulled but unstarted
  std::set<std::uint64_t> in_service;      // request ids
  std::vector<std::string> subscription;   // queue ids in priority order
};

// base_rate * degrade_factor * (1 + kappa * credits). Throws on a dead server.
double effective_rate(const ServerState& server, double kappa);

// Completion instant for a request started at `now`.
double service_completion_time(const ServerState& server, double demand,
                               double now, double kappa);

// Discretized (subscribed LB depth, local backlog, credits) triple.
// Depth/backlog buckets: 0, 1-3, 4-10, >10. Credit buckets: thirds of
// [0, credit_cap].
struct Observation {
  int depth_bucket = 0;    // 0..3
  int backlog_bucket = 0;  // 0..3
  int credit_bucket = 0;   // 0..2

  static constexpr int kNumStates = 4 * 4 * 3;
  int index() const {
    return (depth_bucket * 4 + backlog_bucket) * 3 + credit_bucket;
  }
};

int bucket_depth(std::size_t n);
int bucket_credits(int credits, int credit_cap);

Observation agent_observe(const ServerState& server, const QueueTier& tier,
                          int credit_cap);

// Epsilon-greedy over kPullBatches; returns the action index. Pure given the
// rng state.
int agent_decide(const Observation& obs, const PolicyState& policy, Rng& rng);

struct AgentReport {
  std::string server_id;
  double window_start = 0.0;
  double window_end = 0.0;
  std::uint64_t completed = 0;
  double mean_processing_time = 0.0;
  double max_pull_wait = 0.0;
  std::uint64_t pulls = 0;
};

struct CompletionEvent {
  double time = 0.0;
  double processing_time = 0.0;
};

struct PullEvent {
  double time = 0.0;
  double wait = 0.0;
};

// Aggregates events with window_start <= time < window_end.
AgentReport build_report(const std::string& server_id,
                         const std::vector<CompletionEvent>& completions,
                         const std::vector<PullEvent>& pulls,
                         double window_start, double window_end);

}  // namespace lbsim
