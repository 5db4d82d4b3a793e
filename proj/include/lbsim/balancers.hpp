#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lbsim/rng.hpp"
#include "lbsim/workload.hpp"

namespace lbsim {

enum class PolicyTag {
  kRoundRobin,
  kWeightedRoundRobin,
  kLeastConnection,
  kWeightedLeastConnection,
  kAdaptive,       // argmin ewma utilization
  kWeightedResponseTime,
  kIpHash,
  kUrlHash,
  kRandom,         // comparison control
};

std::optional<PolicyTag> parse_policy_tag(std::string_view s);
std::string_view to_string(PolicyTag tag);

// Only URL hashing parses layer-7 content.
bool content_aware(PolicyTag tag);

// Push-mode selection state for one farm. Servers are kept sorted by id;
// argmin/argmax ties break on the lowest id.
class BalancerState {
 public:
  // weights default to 1 where absent
  BalancerState(std::vector<std::string> server_ids,
                const std::map<std::string, int>& weights);

  const std::string& select(PolicyTag tag, const Request& r, Rng& rng);

  void note_dispatch(const std::string& server_id);
  void note_completion(const std::string& server_id, double response_time,
                       double ewma_alpha);
  // Feeds the adaptive policy from the engine's sampled utilization.
  void note_util(const std::string& server_id, double util, double ewma_alpha);

  int connections(const std::string& server_id) const;
  double ewma_response(const std::string& server_id) const;
  double ewma_util(const std::string& server_id) const;

 private:
  struct Entry {
    std::string id;
    int weight = 1;
    int current_weight = 0;  // smooth WRR
    int connections = 0;
    double ewma_response = 0.0;
    bool response_seen = false;
    double ewma_util = 0.0;
  };
  Entry& find(const std::string& server_id);
  const Entry& find(const std::string& server_id) const;

  std::vector<Entry> servers_;  // sorted by id
  std::size_t rr_cursor_ = 0;
};

}  // namespace lbsim
