#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbsim/balancers.hpp"
#include "lbsim/event_log.hpp"
#include "lbsim/metrics.hpp"
#include "lbsim/queue_tier.hpp"
#include "lbsim/rl.hpp"
#include "lbsim/scenario.hpp"
#include "lbsim/target_group.hpp"
#include "lbsim/workload.hpp"

namespace lbsim {

// Raised when a simulation invariant breaks; the message names the invariant.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EventKind {
  kArrival,
  kAgentEpoch,
  kServiceCompletion,
  kSupervisorTick,
  kFault,
  kMetricsSample,
  kEndOfRun,
};

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kArrival;
  std::uint64_t request = 0;      // kArrival / kServiceCompletion
  int server = -1;                // index into farm
  double factor = 1.0;            // kFault
  double service_start = 0.0;     // kServiceCompletion
};

struct RunResult {
  MetricsReport report;
  EventLog log;
};

// One deterministic run. Single logical thread; independent runs share
// nothing.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg);

  bool done() const { return done_; }
  // Processes exactly the minimum-(time, seq) pending event.
  void step();

  RunResult finish() &&;

  double clock() const { return clock_; }

 private:
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void schedule(double time, EventKind kind, std::uint64_t request = 0,
                int server = -1, double factor = 1.0, double service_start = 0.0);
  void log(double t, const std::string& kind, const std::string& server,
           std::int64_t request, nlohmann::ordered_json detail);

  void on_arrival(const Event& e);
  void on_agent_epoch(const Event& e);
  void on_completion(const Event& e);
  void on_supervisor_tick(const Event& e);
  void on_fault(const Event& e);
  void on_metrics_sample(const Event& e);
  void on_end(const Event& e);

  void start_services(int server_idx);
  void check_conservation(const char* where) const;
  nlohmann::ordered_json counters_detail() const;
  std::uint64_t in_backlog_total() const;
  std::uint64_t in_service_total() const;

  ScenarioConfig cfg_;
  RunMeta meta_;
  double clock_ = 0.0;
  std::uint64_t next_seq_ = 1;
  std::uint64_t log_seq_ = 1;
  bool done_ = false;
  std::priority_queue<Event, std::vector<Event>, EventOrder> pending_;

  std::vector<Request> requests_;
  QueueTier tier_;
  std::unique_ptr<RuleSet> rules_;
  std::vector<ServerState> farm_;
  std::vector<PolicyState> policies_;
  CreditLedger ledger_;
  std::unique_ptr<BalancerState> balancer_;  // push mode
  std::vector<Rng> agent_rngs_;
  std::vector<char> ever_settled_;  // per farm index; idle servers are unjudged
  Rng balancer_rng_;

  MetricsAccumulator acc_;
  std::uint64_t eviction_drops_ = 0;
  EventLog log_;
};

std::string derive_run_id(const ScenarioConfig& cfg);

RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace lbsim
