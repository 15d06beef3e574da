#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/campaigns/campaigns.hpp"
#include "sentinel/geo/geocode.hpp"
#include "sentinel/pipeline/bundle.hpp"
#include "sentinel/service/records.hpp"

namespace sentinel::service {

inline constexpr const char* kDisclaimer =
    "This is a screening triage demo, not a diagnosis. Consult a qualified clinician and attend a screening "
    "programme regardless of this result.";

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::map<pipeline::Task, std::filesystem::path> bundles;
  std::filesystem::path facilities_csv;
  std::filesystem::path gazetteer_csv;
  std::filesystem::path districts_csv;
  geo::RemoteGeocoderConfig geocoder;
  std::filesystem::path record_store;
  std::filesystem::path request_log;
};

/// Reads the JSON config; relative paths resolve against the file's directory.
inline ServiceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  ServiceConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    const json models = j.value("models", json::object());
    for (const auto& [k, v] : models.items()) {
      const auto task = pipeline::parse_task(k);
      if (!task) throw ValidationError("config names an unknown task '" + k + "'", {"models"});
      c.bundles[*task] = resolve(v.get<std::string>());
    }
    c.facilities_csv = resolve(j.value("facilities", std::string{}));
    c.gazetteer_csv = resolve(j.value("gazetteer", std::string{}));
    c.districts_csv = resolve(j.value("districts", std::string{}));
    c.record_store = resolve(j.value("record_store", std::string{}));
    c.request_log = resolve(j.value("request_log", std::string{}));
    if (j.contains("geocoder")) {
      const auto& g = j["geocoder"];
      c.geocoder.base_url = g.value("base_url", std::string{});
      c.geocoder.path = g.value("path", c.geocoder.path);
      c.geocoder.key_env = g.value("key_env", c.geocoder.key_env);
      c.geocoder.timeout_seconds = g.value("timeout_seconds", c.geocoder.timeout_seconds);
    }
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path.string() + "' is malformed: " + e.what());
  }
  return c;
}

/// Everything assess and the lookups read. Never mutated once published.
struct Snapshot {
  std::map<pipeline::Task, pipeline::LoadedBundle> models;
  geo::FacilityStore facilities;
  geo::Geocoder geocoder{geo::Gazetteer{}};
  std::vector<campaigns::DistrictStat> districts;
};

inline std::shared_ptr<const Snapshot> load_snapshot(const ServiceConfig& c) {
  auto s = std::make_shared<Snapshot>();
  for (const auto& [task, path] : c.bundles) {
    auto b = pipeline::load_bundle(path);
    if (b.bundle.task != task) throw ValidationError("bundle '" + path.string() + "' is for a different task");
    s->models.emplace(task, std::move(b));
  }
  if (!c.facilities_csv.empty()) s->facilities = geo::load_facilities_file(c.facilities_csv.string());
  geo::Gazetteer gaz;
  if (!c.gazetteer_csv.empty()) gaz = geo::load_gazetteer_file(c.gazetteer_csv.string());
  s->geocoder = geo::Geocoder(std::move(gaz), c.geocoder);
  if (!c.districts_csv.empty()) s->districts = campaigns::load_district_stats_file(c.districts_csv.string());
  return s;
}

struct RiskResponse {
  std::string label;  // susceptible | not_susceptible
  models::Confidence confidence;
  std::string model_id;
  std::string disclaimer = kDisclaimer;
  bool operator==(const RiskResponse&) const = default;
};

inline json to_json(const RiskResponse& r) {
  return {{"label", r.label},
          {"confidence", {{"value", r.confidence.value}, {"kind", r.confidence.kind}}},
          {"model_id", r.model_id},
          {"disclaimer", r.disclaimer}};
}

/// Validates answers against the form schema and returns them in model
/// feature order. Every offending field is listed in the error.
inline std::vector<double> validate_answers(const pipeline::FormSchema& schema,
                                            const std::map<std::string, double>& answers) {
  std::vector<std::string> missing, out_of_range, unknown;
  std::vector<double> x;
  x.reserve(schema.fields.size());
  for (const auto& f : schema.fields) {
    auto it = answers.find(f.name);
    if (it == answers.end()) {
      missing.push_back(f.name);
      x.push_back(0.0);
      continue;
    }
    const double v = it->second;
    bool ok = std::isfinite(v) && v >= f.min && v <= f.max;
    if (ok && !f.options.empty()) ok = std::find(f.options.begin(), f.options.end(), v) != f.options.end();
    if (!ok) out_of_range.push_back(f.name);
    x.push_back(v);
  }
  for (const auto& [k, v] : answers) {
    bool known = false;
    for (const auto& f : schema.fields) known = known || f.name == k;
    if (!known) unknown.push_back(k);
  }
  if (missing.empty() && out_of_range.empty() && unknown.empty()) return x;
  std::string msg = "invalid answers";
  std::vector<std::string> fields;
  auto list = [&](const char* what, const std::vector<std::string>& names) {
    if (names.empty()) return;
    msg += std::string("; ") + what + ":";
    for (const auto& n : names) {
      msg += " " + n;
      fields.push_back(n);
    }
  };
  list("missing", missing);
  list("out of range", out_of_range);
  list("unknown", unknown);
  throw ValidationError(msg, fields);
}

struct FacilityQuery {
  std::optional<std::string> address;
  std::optional<geo::GeoPoint> point;
  std::size_t k = 3;
  std::optional<geo::FacilityKind> kind;
};

struct FacilityAnswer {
  geo::GeoPoint origin;
  std::optional<geo::GeocodeResult> geocode;
  std::optional<std::string> remote_error;  // set when the gazetteer stood in for a failed remote lookup
  std::vector<geo::RankedFacility> facilities;
};

inline json to_json(const geo::RankedFacility& r, std::size_t rank) {
  return {{"rank", rank},
          {"id", r.facility.id},
          {"name", r.facility.name},
          {"kind", geo::to_string(r.facility.kind)},
          {"lat", r.facility.location.lat()},
          {"lon", r.facility.location.lon()},
          {"district", r.facility.district},
          {"distance_km", r.distance_km}};
}

inline json to_json(const FacilityAnswer& a) {
  json j{{"origin", {{"lat", a.origin.lat()}, {"lon", a.origin.lon()}}}};
  if (a.geocode) {
    j["source"] = geo::to_string(a.geocode->source);
    j["geocode"] = {{"query", a.geocode->query},
                    {"matched_name", a.geocode->matched_name},
                    {"confidence", a.geocode->confidence}};
  } else {
    j["source"] = "point";
  }
  if (a.remote_error) j["remote_error"] = *a.remote_error;
  json list = json::array();
  for (std::size_t i = 0; i < a.facilities.size(); ++i) list.push_back(to_json(a.facilities[i], i + 1));
  j["facilities"] = std::move(list);
  return j;
}

inline json to_json(const campaigns::DistrictRanking& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& s = r.rows[i];
    rows.push_back({{"rank", i + 1},
                    {"district", s.district},
                    {"value", s.value(r.indicator)},
                    {"cervical_pct", s.cervical_pct},
                    {"breast_pct", s.breast_pct},
                    {"oral_pct", s.oral_pct}});
  }
  return {{"indicator", campaigns::to_string(r.indicator)},
          {"statewide_mean", {{"cervical", r.mean_cervical}, {"breast", r.mean_breast}, {"oral", r.mean_oral}}},
          {"rows", std::move(rows)}};
}

inline json to_json(const campaigns::LabeledPlan& lp) {
  json centroids = json::array();
  for (std::size_t c = 0; c < lp.plan.centroids.size(); ++c)
    centroids.push_back({{"site", c},
                         {"lat", lp.plan.centroids[c].lat()},
                         {"lon", lp.plan.centroids[c].lon()},
                         {"nearest_district", lp.centroid_districts[c]}});
  return {{"k", lp.plan.k},
          {"centroids", std::move(centroids)},
          {"assignments", lp.plan.assignments},
          {"inertia_km2", lp.plan.inertia},
          {"iterations", lp.plan.iterations}};
}

/// Service operations independent of HTTP. Reads go through an immutable
/// snapshot; `publish` swaps the whole snapshot at once.
class Service {
 public:
  Service(std::shared_ptr<const Snapshot> snapshot, std::shared_ptr<RecordStore> records)
      : snapshot_(std::move(snapshot)), records_(std::move(records)) {
    if (!snapshot_) snapshot_ = std::make_shared<Snapshot>();
    if (!records_) records_ = std::make_shared<RecordStore>();
  }

  std::shared_ptr<const Snapshot> snapshot() const {
    std::lock_guard lock(mu_);
    return snapshot_;
  }

  void publish(std::shared_ptr<const Snapshot> next) {
    std::lock_guard lock(mu_);
    snapshot_ = std::move(next);
  }

  RecordStore& records() { return *records_; }

  const pipeline::LoadedBundle& model_for(const Snapshot& s, pipeline::Task task) const {
    auto it = s.models.find(task);
    if (it == s.models.end())
      throw UnavailableError(std::string("no model is loaded for task '") + pipeline::to_string(task) + "'");
    return it->second;
  }

  RiskResponse assess(pipeline::Task task, const std::map<std::string, double>& answers) const {
    const auto snap = snapshot();
    const auto& b = model_for(*snap, task);
    auto x = validate_answers(b.bundle.schema, answers);
    if (b.bundle.scaler) x = tabular::apply_standardization(x, models::info(b.model).feature_names, *b.bundle.scaler);
    RiskResponse r;
    r.label = models::predict(b.model, x) == 1 ? "susceptible" : "not_susceptible";
    r.confidence = models::confidence(b.model, x);
    r.model_id = b.model_id;
    return r;
  }

  pipeline::FormSchema schema(pipeline::Task task) const {
    const auto snap = snapshot();
    return model_for(*snap, task).bundle.schema;
  }

  FacilityAnswer suggest_facilities(const FacilityQuery& q) const {
    if (q.address.has_value() == q.point.has_value())
      throw ValidationError("supply exactly one of address or lat/lon", {"address", "lat", "lon"});
    const auto snap = snapshot();
    FacilityAnswer a{q.point.value_or(geo::GeoPoint{}), std::nullopt, std::nullopt, {}};
    if (q.address) {
      const auto& g = snap->geocoder;
      if (g.remote_configured()) {
        try {
          a.geocode = g.geocode(*q.address, geo::GeocodeSource::remote);
        } catch (const Error& e) {
          a.remote_error = e.what();
        }
      }
      if (!a.geocode) {
        try {
          a.geocode = g.geocode(*q.address, geo::GeocodeSource::gazetteer);
        } catch (const NotFoundError& e) {
          if (a.remote_error) throw TransportError(*a.remote_error + "; gazetteer fallback: " + e.what());
          throw;
        }
      }
      a.origin = a.geocode->point;
    }
    a.facilities = geo::nearest_facilities(snap->facilities, a.origin, q.k, q.kind);
    return a;
  }

  campaigns::DistrictRanking ranking(campaigns::Indicator indicator) const {
    const auto snap = snapshot();
    if (snap->districts.empty()) throw UnavailableError("no district statistics are loaded");
    return campaigns::district_ranking(snap->districts, indicator);
  }

  campaigns::LabeledPlan plan(const std::vector<campaigns::CasePoint>& cases, const campaigns::KMeansParams& p) const {
    const auto snap = snapshot();
    if (snap->districts.empty()) throw UnavailableError("no district statistics are loaded");
    return campaigns::plan_campaigns(snap->districts, cases, p);
  }

  /// Stores a record after checking its answers cover the task's features.
  HealthRecord store_record(HealthRecord r) {
    if (!r.consent.storage) throw ConsentError("storage consent was not given; record not stored");
    const auto snap = snapshot();
    if (auto it = snap->models.find(r.task); it != snap->models.end()) {
      std::vector<std::string> missing;
      for (const auto& f : it->second.bundle.schema.fields)
        if (!r.answers.count(f.name)) missing.push_back(f.name);
      if (!missing.empty()) {
        std::string msg = "record answers are missing:";
        for (const auto& m : missing) msg += " " + m;
        throw ValidationError(msg, missing);
      }
    }
    return records_->store(std::move(r));
  }

  HealthRecord get_record(const std::string& id) const { return records_->get(id); }

  json health() const {
    const auto snap = snapshot();
    json models = json::object();
    for (const auto& [task, b] : snap->models) models[pipeline::to_string(task)] = b.model_id;
    return {{"status", "ok"},
            {"models", std::move(models)},
            {"facilities", snap->facilities.size()},
            {"districts", snap->districts.size()},
            {"gazetteer_entries", snap->geocoder.gazetteer().entries().size()},
            {"remote_geocoder", snap->geocoder.remote_configured()},
            {"records", records_->size()}};
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::shared_ptr<RecordStore> records_;
};

}  // namespace sentinel::service
