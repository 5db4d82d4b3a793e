#include "lbsim/rl.hpp"

#include <algorithm>
#include <stdexcept>

namespace lbsim {

std::vector<std::string> validate_supervisor(const SupervisorConfig& cfg) {
  std::vector<std::string> errors;
  if (!(cfg.t_pull > 0.0)) errors.push_back("supervisor.t_pull: must be > 0");
  if (!(cfg.credit_cap > cfg.evict_floor)) {
    errors.push_back("supervisor.credit_cap: must be > evict_floor");
  }
  if (!(cfg.evict_patience >= 1)) {
    errors.push_back("supervisor.evict_patience: must be >= 1");
  }
  if (!(cfg.tick_interval > 0.0)) {
    errors.push_back("supervisor.tick_interval: must be > 0");
  }
  if (!(cfg.q_alpha > 0.0 && cfg.q_alpha <= 1.0)) {
    errors.push_back("supervisor.q_alpha: must be in (0, 1]");
  }
  if (!(cfg.q_gamma >= 0.0 && cfg.q_gamma < 1.0)) {
    errors.push_back("supervisor.q_gamma: must be in [0, 1)");
  }
  if (!(cfg.epsilon.initial >= 0.0 && cfg.epsilon.initial <= 1.0)) {
    errors.push_back("supervisor.epsilon.initial: must be in [0, 1]");
  }
  if (!(cfg.epsilon.decay > 0.0 && cfg.epsilon.decay <= 1.0)) {
    errors.push_back("supervisor.epsilon.decay: must be in (0, 1]");
  }
  if (!(cfg.epsilon.floor >= 0.0 && cfg.epsilon.floor <= cfg.epsilon.initial)) {
    errors.push_back("supervisor.epsilon.floor: must be in [0, initial]");
  }
  return errors;
}

int PolicyState::greedy_action(int s) const {
  int best = 0;
  for (int a = 1; a < num_actions; ++a) {
    if (q_at(s, a) > q_at(s, best)) best = a;
  }
  return best;
}

CreditLedger::Entry& CreditLedger::at(const std::string& server_id) {
  return servers[server_id];
}

const CreditLedger::Entry& CreditLedger::at(const std::string& server_id) const {
  auto it = servers.find(server_id);
  if (it == servers.end()) {
    throw std::out_of_range("ledger: unknown server '" + server_id + "'");
  }
  return it->second;
}

bool qualify(double max_wait, const SupervisorConfig& cfg) {
  return max_wait <= cfg.t_pull;
}

int settle_credits(CreditLedger& ledger, const std::string& server_id,
                   bool qualified, const SupervisorConfig& cfg) {
  CreditLedger::Entry& e = ledger.at(server_id);
  if (e.evicted) {
    throw std::logic_error("settle_credits on evicted server '" + server_id +
                           "'");
  }
  int raw = qualified ? cfg.reward_grant : cfg.penalty;
  int next = std::clamp(e.credits + raw, cfg.evict_floor, cfg.credit_cap);
  int applied = next - e.credits;
  e.credits = next;
  return applied;
}

void q_update(PolicyState& policy, int s, int a, double reward, int s_next,
              const SupervisorConfig& cfg) {
  double best_next = policy.q_at(s_next, 0);
  for (int an = 1; an < policy.num_actions; ++an) {
    best_next = std::max(best_next, policy.q_at(s_next, an));
  }
  double& q = policy.q_at(s, a);
  q += cfg.q_alpha * (reward + cfg.q_gamma * best_next - q);
  ++policy.visits[static_cast<std::size_t>(s) * policy.num_actions + a];
}

std::vector<std::string> supervisor_tick(
    CreditLedger& ledger, const std::vector<std::string>& live_servers,
    const SupervisorConfig& cfg, double now) {
  std::vector<std::string> evicted;
  for (const auto& id : live_servers) {
    CreditLedger::Entry& e = ledger.at(id);
    if (e.evicted) continue;
    if (e.credits == cfg.evict_floor) {
      ++e.floor_streak;
    } else {
      e.floor_streak = 0;
    }
    if (e.floor_streak >= cfg.evict_patience) {
      e.evicted = true;
      e.evicted_at = now;
      ledger.eviction_log.emplace_back(id, now);
      evicted.push_back(id);
    }
  }
  return evicted;
}

void decay_epsilon(PolicyState& policy, const SupervisorConfig& cfg) {
  policy.epsilon = std::max(cfg.epsilon.floor, policy.epsilon * cfg.epsilon.decay);
}

}  // namespace lbsim
