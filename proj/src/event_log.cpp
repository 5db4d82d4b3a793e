#include "lbsim/event_log.hpp"

namespace lbsim {

nlohmann::ordered_json record_to_json(const LogRecord& rec) {
  nlohmann::ordered_json j;
  j["t"] = rec.t;
  j["seq"] = rec.seq;
  j["kind"] = rec.kind;
  if (rec.server.empty()) {
    j["server"] = nullptr;
  } else {
    j["server"] = rec.server;
  }
  if (rec.request < 0) {
    j["request"] = nullptr;
  } else {
    j["request"] = rec.request;
  }
  j["detail"] = rec.detail.is_null() ? nlohmann::ordered_json::object()
                                     : rec.detail;
  return j;
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& rec : records_) {
    out += record_to_json(rec).dump();
    out += '\n';
  }
  return out;
}

}  // namespace lbsim
