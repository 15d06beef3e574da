#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "sentinel/core/error.hpp"
#include "sentinel/core/random.hpp"
#include "sentinel/core/vendor_json.hpp"
#include "sentinel/pipeline/tasks.hpp"

namespace sentinel::service {

using json = nlohmann::json;

struct ConsentFlags {
  bool storage = false;
  bool research = false;
  bool operator==(const ConsentFlags&) const = default;
};

/// Local stand-in for a health card entry. The schema is our own.
struct HealthRecord {
  std::string record_id;
  std::string created_at;  // ISO-8601 UTC
  pipeline::Task task = pipeline::Task::cervical;
  std::map<std::string, double> answers;
  ConsentFlags consent;
  bool operator==(const HealthRecord&) const = default;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json to_json(const ConsentFlags& c) { return {{"storage", c.storage}, {"research", c.research}}; }

inline ConsentFlags consent_from_json(const json& j) {
  ConsentFlags c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ValidationError("consent must be an object", {"consent"});
  auto flag = [&](const char* key) {
    if (!j.contains(key)) return false;
    if (!j[key].is_boolean()) throw ValidationError(std::string("consent.") + key + " must be a boolean", {key});
    return j[key].get<bool>();
  };
  c.storage = flag("storage");
  c.research = flag("research");
  return c;
}

/// Reads a {"name": number} object. Non-numeric values are reported by name.
inline std::map<std::string, double> answers_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("answers must be an object of numbers", {"answers"});
  std::map<std::string, double> out;
  std::vector<std::string> bad;
  for (const auto& [k, v] : j.items()) {
    if (v.is_number()) out[k] = v.get<double>();
    else if (v.is_boolean()) out[k] = v.get<bool>() ? 1.0 : 0.0;
    else bad.push_back(k);
  }
  if (!bad.empty()) {
    std::string msg = "answers must be numeric:";
    for (const auto& b : bad) msg += " " + b;
    throw ValidationError(msg, bad);
  }
  return out;
}

inline json to_json(const HealthRecord& r) {
  return {{"record_id", r.record_id}, {"created_at", r.created_at}, {"task", pipeline::to_string(r.task)},
          {"answers", r.answers},     {"consent", to_json(r.consent)}};
}

inline HealthRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record must be a JSON object");
  HealthRecord r;
  if (j.contains("record_id") && !j["record_id"].is_null()) {
    if (!j["record_id"].is_string()) throw ValidationError("record_id must be a string", {"record_id"});
    r.record_id = j["record_id"].get<std::string>();
  }
  if (j.contains("created_at") && !j["created_at"].is_null()) {
    if (!j["created_at"].is_string()) throw ValidationError("created_at must be a string", {"created_at"});
    r.created_at = j["created_at"].get<std::string>();
  }
  if (!j.contains("task") || !j["task"].is_string()) throw ValidationError("task is required", {"task"});
  const auto task = pipeline::parse_task(j["task"].get<std::string>());
  if (!task) throw ValidationError("unknown task '" + j["task"].get<std::string>() + "'", {"task"});
  r.task = *task;
  r.answers = answers_from_json(j.value("answers", json::object()));
  r.consent = consent_from_json(j.value("consent", json()));
  return r;
}

/// Append-only JSONL file with an in-memory index. Writes are serialized;
/// reads share the lock. A record without storage consent is never written.
class RecordStore {
 public:
  /// Empty path keeps records in memory only.
  explicit RecordStore(std::filesystem::path path = {}) : path_(std::move(path)), rng_(std::random_device{}()) {
    if (path_.empty()) return;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      HealthRecord r;
      try {
        r = record_from_json(json::parse(line));
      } catch (const std::exception& e) {
        throw IoError("record store '" + path_.string() + "' line " + std::to_string(n) + " is corrupt: " + e.what());
      }
      if (!r.consent.storage) continue;
      index_[r.record_id] = std::move(r);
    }
  }

  HealthRecord store(HealthRecord r) {
    if (!r.consent.storage) throw ConsentError("storage consent was not given; record not stored");
    std::unique_lock lock(mu_);
    if (r.record_id.empty()) {
      do r.record_id = fresh_id();
      while (index_.count(r.record_id));
    } else if (index_.count(r.record_id)) {
      throw DuplicateIdError(r.record_id);
    }
    if (r.created_at.empty()) r.created_at = utc_timestamp();
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::binary | std::ios::app);
      out << to_json(r).dump() << '\n';
      out.flush();
      if (!out) throw IoError("cannot append to record store '" + path_.string() + "'");
    }
    index_[r.record_id] = r;
    return r;
  }

  HealthRecord get(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = index_.find(id);
    if (it == index_.end()) throw NotFoundError("no record with id '" + id + "'");
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return index_.size();
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::string fresh_id() {
    static constexpr char hex[] = "0123456789abcdef";
    std::string id = "rec-";
    for (int i = 0; i < 16; ++i) id += hex[rng_.index(16)];
    return id;
  }

  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, HealthRecord> index_;
  Rng rng_;
};

}  // namespace sentinel::service
