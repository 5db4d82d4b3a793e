#include "lbsim/queue_tier.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace lbsim {

bool ClassificationRule::matches(const Request& r) const {
  if (rtype && *rtype != r.rtype) return false;
  if (priority && *priority != r.priority) return false;
  if (url_prefix && r.url_path.rfind(*url_prefix, 0) != 0) return false;
  return true;
}

std::vector<std::string> RuleSet::validate(
    const std::vector<ClassificationRule>& rules,
    const std::vector<std::string>& known_queues) {
  std::vector<std::string> errors;
  std::set<int> ranks;
  bool has_catch_all = false;
  for (const auto& rule : rules) {
    if (!ranks.insert(rule.rank).second) {
      errors.push_back("rules: duplicate rank " + std::to_string(rule.rank));
    }
    if (rule.is_catch_all()) has_catch_all = true;
    if (!known_queues.empty() &&
        std::find(known_queues.begin(), known_queues.end(), rule.queue_id) ==
            known_queues.end()) {
      errors.push_back("rules[rank " + std::to_string(rule.rank) +
                       "]: unknown queue '" + rule.queue_id + "'");
    }
  }
  if (!has_catch_all) {
    errors.push_back("rules: no catch-all rule present");
  }
  return errors;
}

RuleSet::RuleSet(std::vector<ClassificationRule> rules)
    : rules_(std::move(rules)) {
  auto errors = validate(rules_, {});
  if (!errors.empty()) throw std::invalid_argument(errors.front());
  std::sort(rules_.begin(), rules_.end(),
            [](const auto& a, const auto& b) { return a.rank < b.rank; });
}

const std::string& RuleSet::classify(const Request& r) const {
  for (const auto& rule : rules_) {
    if (rule.matches(r)) return rule.queue_id;
  }
  throw std::logic_error("classify: no rule matched despite catch-all");
}

double admit(const Request& r, const AdmissionConfig& cfg, double now) {
  return r.secured ? now + cfg.ssl_offload_delay : now;
}

void QueueTier::add_queue(const std::string& queue_id, std::uint64_t capacity) {
  if (queues_.count(queue_id)) {
    throw std::invalid_argument("duplicate queue id '" + queue_id + "'");
  }
  queues_[queue_id].capacity = capacity;
}

bool QueueTier::has_queue(const std::string& queue_id) const {
  return queues_.count(queue_id) != 0;
}

std::vector<std::string> QueueTier::queue_ids() const {
  std::vector<std::string> ids;
  ids.reserve(queues_.size());
  for (const auto& [id, q] : queues_) ids.push_back(id);
  return ids;
}

const QueueTier::Queue& QueueTier::find(const std::string& queue_id) const {
  auto it = queues_.find(queue_id);
  if (it == queues_.end()) {
    throw std::out_of_range("unknown queue id '" + queue_id + "'");
  }
  return it->second;
}

QueueTier::Queue& QueueTier::find(const std::string& queue_id) {
  return const_cast<Queue&>(
      static_cast<const QueueTier*>(this)->find(queue_id));
}

EnqueueResult QueueTier::enqueue(const std::string& queue_id,
                                 std::uint64_t request_id,
                                 double enqueue_time) {
  Queue& q = find(queue_id);
  if (q.capacity != 0 && q.entries.size() >= q.capacity) {
    ++q.dropped;
    return EnqueueResult::kOverflowed;
  }
  q.entries.push_back(QueueEntry{request_id, enqueue_time});
  q.max_depth = std::max(q.max_depth, q.entries.size());
  return EnqueueResult::kAccepted;
}

std::vector<PulledEntry> QueueTier::pull(
    const std::vector<std::string>& subscription, int max_batch, double now) {
  if (max_batch < 1) throw std::invalid_argument("pull: max_batch must be >= 1");
  std::vector<PulledEntry> batch;
  for (const auto& queue_id : subscription) {
    Queue& q = find(queue_id);
    while (!q.entries.empty() &&
           batch.size() < static_cast<std::size_t>(max_batch)) {
      QueueEntry e = q.entries.front();
      q.entries.pop_front();
      batch.push_back(
          PulledEntry{e.request_id, queue_id, std::max(0.0, now - e.enqueue_time)});
    }
    if (batch.size() >= static_cast<std::size_t>(max_batch)) break;
  }
  return batch;
}

std::size_t QueueTier::depth(const std::string& queue_id) const {
  return find(queue_id).entries.size();
}

std::size_t QueueTier::total_depth() const {
  std::size_t total = 0;
  for (const auto& [id, q] : queues_) total += q.entries.size();
  return total;
}

std::size_t QueueTier::total_depth(
    const std::vector<std::string>& subscription) const {
  std::size_t total = 0;
  for (const auto& id : subscription) total += depth(id);
  return total;
}

std::size_t QueueTier::max_depth(const std::string& queue_id) const {
  return find(queue_id).max_depth;
}

std::uint64_t QueueTier::dropped(const std::string& queue_id) const {
  return find(queue_id).dropped;
}

std::uint64_t QueueTier::total_dropped() const {
  std::uint64_t total = 0;
  for (const auto& [id, q] : queues_) total += q.dropped;
  return total;
}

}  // namespace lbsim
