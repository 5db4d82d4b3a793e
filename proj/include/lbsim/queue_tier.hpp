#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lbsim/workload.hpp"

namespace lbsim {

// All predicates present must hold; a rule with no predicates is a catch-all.
struct ClassificationRule {
  int rank = 0;  // lower evaluated first
  std::string queue_id;
  std::optional<RequestType> rtype;
  std::optional<int> priority;
  std::optional<std::string> url_prefix;

  bool matches(const Request& r) const;
  bool is_catch_all() const { return !rtype && !priority && !url_prefix; }
};

class RuleSet {
 public:
  // Validates unique ranks and catch-all presence; sorts by rank. Messages
  // name the offending rule. known_queues, when nonempty, restricts targets.
  static std::vector<std::string> validate(
      const std::vector<ClassificationRule>& rules,
      const std::vector<std::string>& known_queues);

  explicit RuleSet(std::vector<ClassificationRule> rules);

  // Lowest-rank matching rule; total thanks to the catch-all.
  const std::string& classify(const Request& r) const;

  const std::vector<ClassificationRule>& rules() const { return rules_; }

 private:
  std::vector<ClassificationRule> rules_;  // sorted by rank
};

struct AdmissionConfig {
  double ssl_offload_delay = 0.002;  // seconds, applied when request.secured
};

double admit(const Request& r, const AdmissionConfig& cfg, double now);

struct QueueEntry {
  std::uint64_t request_id = 0;
  double enqueue_time = 0.0;
};

struct PulledEntry {
  std::uint64_t request_id = 0;
  std::string queue_id;
  double wait = 0.0;
};

enum class EnqueueResult { kAccepted, kOverflowed };

// The classified in-memory FIFO queues plus the dropped ledger. Owned and
// mutated by the engine's single logical thread.
class QueueTier {
 public:
  // capacity 0 means unbounded
  void add_queue(const std::string& queue_id, std::uint64_t capacity);
  bool has_queue(const std::string& queue_id) const;
  std::vector<std::string> queue_ids() const;

  EnqueueResult enqueue(const std::string& queue_id, std::uint64_t request_id,
                        double enqueue_time);

  // Drains queues in subscription order, FIFO within each; removes what it
  // returns. Waits are clamped at 0.
  std::vector<PulledEntry> pull(const std::vector<std::string>& subscription,
                                int max_batch, double now);

  std::size_t depth(const std::string& queue_id) const;
  std::size_t total_depth() const;
  std::size_t total_depth(const std::vector<std::string>& subscription) const;
  std::size_t max_depth(const std::string& queue_id) const;

  std::uint64_t dropped(const std::string& queue_id) const;
  std::uint64_t total_dropped() const;

 private:
  struct Queue {
    std::uint64_t capacity = 0;
    std::deque<QueueEntry> entries;
    std::uint64_t dropped = 0;
    std::size_t max_depth = 0;
  };
  const Queue& find(const std::string& queue_id) const;
  Queue& find(const std::string& queue_id);

  std::map<std::string, Queue> queues_;
};

}  // namespace lbsim
