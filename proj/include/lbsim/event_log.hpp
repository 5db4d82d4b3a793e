#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace lbsim {

// One JSON Lines record. Kinds emitted by a run:
//   meta      - first line; run_id, mode, policy, seed, horizon,
//               farm (id -> concurrency), queues
//   arrival   - request admitted (record time includes any offload delay);
//               detail {rtype, priority, secured, arrival_time}
//   enqueue   - detail {queue}
//   drop      - detail {queue?, reason: overflow | evicted}
//   dispatch  - push-mode assignment; server set
//   pull      - one per pulled request; detail {queue, wait, batch}
//   start     - service start; detail {demand, rate}
//   completion- detail {response_time, processing_time}
//   settle    - detail {qualified, delta, credits, batch, max_wait}
//   tick      - supervisor tick; detail {epsilon}
//   evict     - server set
//   fault     - detail {factor}
//   sample    - detail {generated, completed, dropped, queued, backlog,
//               in_service, depths}
//   end       - final counters, same detail shape as sample
struct LogRecord {
  double t = 0.0;
  std::uint64_t seq = 0;
  std::string kind;
  std::string server;          // empty = null
  std::int64_t request = -1;   // -1 = null
  nlohmann::ordered_json detail;
};

nlohmann::ordered_json record_to_json(const LogRecord& rec);

class EventLog {
 public:
  void append(LogRecord rec) { records_.push_back(std::move(rec)); }
  const std::vector<LogRecord>& records() const { return records_; }

  std::string to_jsonl() const;

 private:
  std::vector<LogRecord> records_;
};

}  // namespace lbsim
