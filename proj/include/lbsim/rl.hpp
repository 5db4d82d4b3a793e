#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lbsim/rng.hpp"

namespace lbsim {

struct EpsilonSchedule {
  double initial = 1.0;
  double decay = 0.99;  // multiplier per supervisor tick
  double floor = 0.05;
};

struct SupervisorConfig {
  double t_pull = 0.5;   // stipulated time, seconds
  int reward_grant = 1;  // credit on a qualified pull
  int penalty = -1;      // credit on an unqualified pull
  int credit_cap = 20;
  int evict_floor = 0;
  int evict_patience = 5;     // consecutive ticks at floor before eviction
  double tick_interval = 1.0;
  double q_alpha = 0.1;
  double q_gamma = 0.9;
  EpsilonSchedule epsilon;
};

std::vector<std::string> validate_supervisor(const SupervisorConfig& cfg);

// Pull batch sizes an agent may choose per decision epoch.
inline constexpr std::array<int, 5> kPullBatches{0, 1, 2, 4, 8};
inline constexpr int kNumActions = 5;

// Tabular action-value state for one agent. Zero-initialized.
struct PolicyState {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> q;
  std::vector<int> visits;
  double epsilon = 0.0;

  PolicyState() = default;
  PolicyState(int states, int actions, double initial_epsilon)
      : num_states(states),
        num_actions(actions),
        q(static_cast<std::size_t>(states) * actions, 0.0),
        visits(static_cast<std::size_t>(states) * actions, 0),
        epsilon(initial_epsilon) {}

  double& q_at(int s, int a) {
    return q[static_cast<std::size_t>(s) * num_actions + a];
  }
  double q_at(int s, int a) const {
    return q[static_cast<std::size_t>(s) * num_actions + a];
  }
  // argmax over actions, ties to the smallest action index
  int greedy_action(int s) const;
};

struct CreditLedger {
  struct Entry {
    int credits = 0;
    int floor_streak = 0;
    bool evicted = false;
    double evicted_at = -1.0;
  };
  std::map<std::string, Entry> servers;
  std::vector<std::pair<std::string, double>> eviction_log;

  Entry& at(const std::string& server_id);
  const Entry& at(const std::string& server_id) const;
};

// max_wait <= t_pull, inclusive boundary.
bool qualify(double max_wait, const SupervisorConfig& cfg);

// Returns the applied (post-clamp) credit delta. Throws on an evicted server.
int settle_credits(CreditLedger& ledger, const std::string& server_id,
                   bool qualified, const SupervisorConfig& cfg);

// One-step tabular update; touches exactly Q(s, a).
void q_update(PolicyState& policy, int s, int a, double reward, int s_next,
              const SupervisorConfig& cfg);

// Streak bookkeeping over live servers; marks evictions in the ledger and
// returns the ids evicted at this tick.
std::vector<std::string> supervisor_tick(
    CreditLedger& ledger, const std::vector<std::string>& live_servers,
    const SupervisorConfig& cfg, double now);

void decay_epsilon(PolicyState& policy, const SupervisorConfig& cfg);

}  // namespace lbsim
