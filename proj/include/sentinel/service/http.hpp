#pragma once

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>

#include "sentinel/core/numfmt.hpp"
#include "sentinel/service/service.hpp"

namespace sentinel::service {

/// JSON-lines request log. Answers and verdicts are written only when the
/// request carries research consent; otherwise the entry is marked redacted.
class RequestLog {
 public:
  explicit RequestLog(std::filesystem::path path = {}) : path_(std::move(path)) {
    if (!path_.empty() && path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  }

  void write(const json& entry) {
    if (path_.empty()) return;
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << entry.dump() << '\n';
  }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
};

inline json error_body(const Error& e) {
  json err{{"kind", to_string(e.kind())}, {"message", e.what()}};
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) err["fields"] = v->fields();
  return {{"error", std::move(err)}};
}

namespace http_detail {

inline json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("request body is not valid JSON: ") + e.what());
  }
}

inline std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

inline double number_param(const std::string& text, const char* name) {
  auto v = parse_double(text);
  if (!v) throw ValidationError(std::string(name) + " must be a number", {name});
  return *v;
}

inline std::size_t count_param(const std::string& text, const char* name) {
  auto v = parse_int<long long>(text);
  if (!v || *v < 1) throw ValidationError(std::string(name) + " must be a positive integer", {name});
  return static_cast<std::size_t>(*v);
}

inline pipeline::Task task_param(const std::string& s) {
  auto t = pipeline::parse_task(s);
  if (!t) throw NotFoundError("unknown task '" + s + "'");
  return *t;
}

}  // namespace http_detail

/// Parses the /facilities/near query string.
inline FacilityQuery facility_query(const httplib::Request& req) {
  using namespace http_detail;
  FacilityQuery q;
  q.address = param(req, "address");
  const auto lat = param(req, "lat"), lon = param(req, "lon");
  if (lat.has_value() != lon.has_value()) throw ValidationError("lat and lon must be given together", {"lat", "lon"});
  if (lat) q.point = geo::GeoPoint(number_param(*lat, "lat"), number_param(*lon, "lon"));
  if (auto k = param(req, "k")) q.k = count_param(*k, "k");
  if (auto kind = param(req, "kind")) {
    q.kind = geo::parse_facility_kind(*kind);
    if (!q.kind) throw ValidationError("unknown facility kind '" + *kind + "'", {"kind"});
  }
  return q;
}

/// Cases from the request, or district centroids weighted by the share of
/// women not yet screened for `indicator` when no cases are supplied.
inline std::vector<campaigns::CasePoint> plan_cases(const json& body, const Snapshot& snap) {
  std::vector<campaigns::CasePoint> cases;
  if (body.contains("cases")) {
    if (!body["cases"].is_array()) throw ValidationError("cases must be an array", {"cases"});
    for (const auto& c : body["cases"]) {
      if (!c.is_object() || !c.contains("lat") || !c.contains("lon") || !c["lat"].is_number() ||
          !c["lon"].is_number())
        throw ValidationError("each case needs numeric lat and lon", {"cases"});
      const double w = c.value("weight", 1.0);
      cases.push_back({geo::GeoPoint(c["lat"].get<double>(), c["lon"].get<double>()), w});
    }
    return cases;
  }
  const auto name = body.value("indicator", std::string("cervical"));
  const auto ind = campaigns::parse_indicator(name);
  if (!ind) throw ValidationError("unknown indicator '" + name + "'", {"indicator"});
  for (const auto& d : snap.districts) cases.push_back({d.centroid, std::max(0.0, 100.0 - d.value(*ind))});
  return cases;
}

inline campaigns::KMeansParams plan_params(const json& body) {
  campaigns::KMeansParams p;
  try {
    p.k = body.value("k", p.k);
    p.seed = body.value("seed", p.seed);
    p.restarts = body.value("restarts", p.restarts);
    p.max_iter = body.value("max_iter", p.max_iter);
  } catch (const json::exception&) {
    throw ValidationError("k, seed, restarts and max_iter must be non-negative integers", {"k", "seed"});
  }
  return p;
}

/// Registers every route on `server`. `log` may be null.
inline void bind_routes(httplib::Server& server, Service& svc, RequestLog* log = nullptr) {
  using namespace http_detail;
  using Handler = std::function<json(const httplib::Request&, httplib::Response&, json&)>;

  auto wrap = [&svc, log](std::string route, Handler fn) {
    return [&svc, log, route = std::move(route), fn = std::move(fn)](const httplib::Request& req,
                                                                       httplib::Response& res) {
      (void)svc;
      const auto t0 = std::chrono::steady_clock::now();
      json entry{{"ts", utc_timestamp()}, {"method", req.method}, {"route", route}};
      json body;
      res.status = 200;
      try {
        body = fn(req, res, entry);
      } catch (const Error& e) {
        res.status = http_status(e.kind());
        body = error_body(e);
        entry["error"] = to_string(e.kind());
        if (const auto* t = dynamic_cast<const TransportError*>(&e); t && t->retry_after())
          res.set_header("Retry-After", std::to_string(*t->retry_after()));
      } catch (const std::exception& e) {
        res.status = 500;
        body = error_body(InvariantError(e.what()));
        entry["error"] = "internal";
      }
      res.set_content(body.dump(), "application/json");
      entry["status"] = res.status;
      entry["ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (log) log->write(entry);
    };
  };

  server.Post(R"(/assess/([A-Za-z_]+))", wrap("/assess/{task}", [&svc](const auto& req, auto&, json& entry) {
                const auto task = task_param(req.matches[1]);
                entry["task"] = pipeline::to_string(task);
                const auto body = parse_body(req);
                if (!body.is_object()) throw ValidationError("request body must be an object");
                const auto consent = consent_from_json(body.value("consent", json()));
                const auto answers = answers_from_json(body.value("answers", json::object()));
                const auto r = svc.assess(task, answers);
                if (consent.research) {
                  entry["answers"] = answers;
                  entry["label"] = r.label;
                } else {
                  entry["redacted"] = true;
                }
                json out = to_json(r);
                out["task"] = pipeline::to_string(task);
                return out;
              }));

  server.Get("/facilities/near", wrap("/facilities/near", [&svc](const auto& req, auto&, json&) {
               return to_json(svc.suggest_facilities(facility_query(req)));
             }));

  server.Post("/records", wrap("/records", [&svc](const auto& req, auto& res, json& entry) {
                auto r = record_from_json(parse_body(req));
                entry["task"] = pipeline::to_string(r.task);
                const auto stored = svc.store_record(std::move(r));
                entry["record_id"] = stored.record_id;
                res.status = 201;
                return to_json(stored);
              }));

  server.Get(R"(/records/([^/]+))", wrap("/records/{id}", [&svc](const auto& req, auto&, json&) {
               return to_json(svc.get_record(req.matches[1]));
             }));

  server.Get("/districts/ranking", wrap("/districts/ranking", [&svc](const auto& req, auto&, json&) {
               const auto name = param(req, "indicator").value_or("cervical");
               const auto ind = campaigns::parse_indicator(name);
               if (!ind) throw ValidationError("unknown indicator '" + name + "'", {"indicator"});
               return to_json(svc.ranking(*ind));
             }));

  server.Post("/campaigns/plan", wrap("/campaigns/plan", [&svc](const auto& req, auto&, json&) {
                const auto body = parse_body(req);
                if (!body.is_object()) throw ValidationError("request body must be an object");
                const auto snap = svc.snapshot();
                const auto cases = plan_cases(body, *snap);
                return to_json(svc.plan(cases, plan_params(body)));
              }));

  server.Get("/health", wrap("/health", [&svc](const auto&, auto&, json&) { return svc.health(); }));

  server.Get(R"(/schema/([A-Za-z_]+))", wrap("/schema/{task}", [&svc](const auto& req, auto&, json&) {
               return pipeline::to_json(svc.schema(task_param(req.matches[1])));
             }));

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

}  // namespace sentinel::service
