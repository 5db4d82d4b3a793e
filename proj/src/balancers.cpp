#include "lbsim/balancers.hpp"

#include <algorithm>
#include <stdexcept>

namespace lbsim {

namespace {

constexpr std::pair<std::string_view, PolicyTag> kTagNames[] = {
    {"rr", PolicyTag::kRoundRobin},
    {"wrr", PolicyTag::kWeightedRoundRobin},
    {"lc", PolicyTag::kLeastConnection},
    {"wlc", PolicyTag::kWeightedLeastConnection},
    {"adaptive", PolicyTag::kAdaptive},
    {"wrt", PolicyTag::kWeightedResponseTime},
    {"ip_hash", PolicyTag::kIpHash},
    {"url_hash", PolicyTag::kUrlHash},
    {"random", PolicyTag::kRandom},
};

}  // namespace

std::optional<PolicyTag> parse_policy_tag(std::string_view s) {
  for (const auto& [name, tag] : kTagNames) {
    if (s == name) return tag;
  }
  return std::nullopt;
}

std::string_view to_string(PolicyTag tag) {
  for (const auto& [name, t] : kTagNames) {
    if (t == tag) return name;
  }
  return "?";
}

bool content_aware(PolicyTag tag) { return tag == PolicyTag::kUrlHash; }

BalancerState::BalancerState(std::vector<std::string> server_ids,
                             const std::map<std::string, int>& weights) {
  if (server_ids.empty()) {
    throw std::invalid_argument("balancer: empty server set");
  }
  std::sort(server_ids.begin(), server_ids.end());
  for (auto& id : server_ids) {
    Entry e;
    e.id = std::move(id);
    auto it = weights.find(e.id);
    if (it != weights.end()) {
      if (it->second < 1) {
        throw std::invalid_argument("balancer: weight for '" + e.id +
                                    "' must be >= 1");
      }
      e.weight = it->second;
    }
    servers_.push_back(std::move(e));
  }
}

BalancerState::Entry& BalancerState::find(const std::string& server_id) {
  for (auto& e : servers_) {
    if (e.id == server_id) return e;
  }
  throw std::out_of_range("balancer: unknown server '" + server_id + "'");
}

const BalancerState::Entry& BalancerState::find(
    const std::string& server_id) const {
  return const_cast<BalancerState*>(this)->find(server_id);
}

const std::string& BalancerState::select(PolicyTag tag, const Request& r,
                                         Rng& rng) {
  switch (tag) {
    case PolicyTag::kRoundRobin: {
      const std::string& id = servers_[rr_cursor_].id;
      rr_cursor_ = (rr_cursor_ + 1) % servers_.size();
      return id;
    }
    case PolicyTag::kWeightedRoundRobin: {
      int total = 0;
      std::size_t best = 0;
      for (std::size_t i = 0; i < servers_.size(); ++i) {
        servers_[i].current_weight += servers_[i].weight;
        total += servers_[i].weight;
        if (servers_[i].current_weight > servers_[best].current_weight) {
          best = i;
        }
      }
      servers_[best].current_weight -= total;
      return servers_[best].id;
    }
    case PolicyTag::kLeastConnection: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < servers_.size(); ++i) {
        if (servers_[i].connections < servers_[best].connections) best = i;
      }
      return servers_[best].id;
    }
    case PolicyTag::kWeightedLeastConnection: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < servers_.size(); ++i) {
        double a = static_cast<double>(servers_[i].connections) / servers_[i].weight;
        double b = static_cast<double>(servers_[best].connections) /
                   servers_[best].weight;
        if (a < b) best = i;
      }
      return servers_[best].id;
    }
    case PolicyTag::kAdaptive: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < servers_.size(); ++i) {
        if (servers_[i].ewma_util < servers_[best].ewma_util) best = i;
      }
      return servers_[best].id;
    }
    case PolicyTag::kWeightedResponseTime: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < servers_.size(); ++i) {
        if (servers_[i].ewma_response < servers_[best].ewma_response) best = i;
      }
      return servers_[best].id;
    }
    case PolicyTag::kIpHash: {
      char key[4] = {
          static_cast<char>(r.source_ip & 0xff),
          static_cast<char>((r.source_ip >> 8) & 0xff),
          static_cast<char>((r.source_ip >> 16) & 0xff),
          static_cast<char>((r.source_ip >> 24) & 0xff),
      };
      std::uint64_t h = fnv1a64(std::string_view(key, 4));
      return servers_[h % servers_.size()].id;
    }
    case PolicyTag::kUrlHash: {
      std::uint64_t h = fnv1a64(r.url_path);
      return servers_[h % servers_.size()].id;
    }
    case PolicyTag::kRandom: {
      return servers_[rng.uniform_int(static_cast<std::uint32_t>(servers_.size()))]
          .id;
    }
  }
  throw std::logic_error("balancer: unknown policy tag");
}

void BalancerState::note_dispatch(const std::string& server_id) {
  ++find(server_id).connections;
}

void BalancerState::note_completion(const std::string& server_id,
                                    double response_time, double ewma_alpha) {
  Entry& e = find(server_id);
  if (e.connections < 1) {
    throw std::logic_error("balancer: completion without dispatch on '" +
                           server_id + "'");
  }
  --e.connections;
  if (!e.response_seen) {
    e.ewma_response = response_time;
    e.response_seen = true;
  } else {
    e.ewma_response = (1.0 - ewma_alpha) * e.ewma_response +
                      ewma_alpha * response_time;
  }
}

void BalancerState::note_util(const std::string& server_id, double util,
                              double ewma_alpha) {
  Entry& e = find(server_id);
  e.ewma_util = (1.0 - ewma_alpha) * e.ewma_util + ewma_alpha * util;
}

int BalancerState::connections(const std::string& server_id) const {
  return find(server_id).connections;
}

double BalancerState::ewma_response(const std::string& server_id) const {
  return find(server_id).ewma_response;
}

double BalancerState::ewma_util(const std::string& server_id) const {
  return find(server_id).ewma_util;
}

}  // namespace lbsim
