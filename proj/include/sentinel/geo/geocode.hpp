#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>

#include "sentinel/geo/geo.hpp"
#include "sentinel/core/vendor_json.hpp"

namespace sentinel::geo {

enum class GeocodeSource { remote, gazetteer };

inline const char* to_string(GeocodeSource s) { return s == GeocodeSource::remote ? "remote" : "gazetteer"; }

struct GeocodeResult {
  std::string query;
  GeoPoint point;
  GeocodeSource source = GeocodeSource::gazetteer;
  double confidence = 1.0;  // [0, 1]
  std::string matched_name;
};

struct GazetteerEntry {
  std::string name;
  GeoPoint point;
  std::string district;
};

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Offline place-name table. Lookup is case-insensitive: an exact name match
/// wins with confidence 1; otherwise the prefix matches are considered and
/// the alphabetically first one is returned with confidence
/// 0.9 * |query| / |name|, divided by the number of prefix matches.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return lower(a.name) < lower(b.name); });
  }

  const std::vector<GazetteerEntry>& entries() const noexcept { return entries_; }

  std::optional<GeocodeResult> lookup(std::string_view query) const {
    const std::string q = lower(csv::trim(query));
    if (q.empty()) return std::nullopt;
    const GazetteerEntry* first_prefix = nullptr;
    std::size_t prefix_matches = 0;
    for (const auto& e : entries_) {
      const std::string n = lower(e.name);
      if (n == q) return GeocodeResult{std::string(query), e.point, GeocodeSource::gazetteer, 1.0, e.name};
      if (n.compare(0, q.size(), q) == 0) {
        if (!first_prefix) first_prefix = &e;
        ++prefix_matches;
      }
    }
    if (!first_prefix) return std::nullopt;
    const double conf = 0.9 * static_cast<double>(q.size()) / static_cast<double>(first_prefix->name.size()) /
                        static_cast<double>(prefix_matches);
    return GeocodeResult{std::string(query), first_prefix->point, GeocodeSource::gazetteer, conf, first_prefix->name};
  }

 private:
  std::vector<GazetteerEntry> entries_;
};

/// CSV with header name,lat,lon,district.
inline Gazetteer load_gazetteer(std::istream& in) {
  csv::Reader reader(in);
  read_header(reader, {"name", "lat", "lon", "district"});
  std::vector<GazetteerEntry> out;
  csv::Record rec;
  while (reader.next(rec)) {
    const auto row = reader.record_line();
    if (rec.size() == 1 && csv::trim(rec[0]).empty()) continue;
    if (rec.size() != 4) throw ParseError(row, std::min<std::size_t>(rec.size(), 4) + 1, "expected 4 fields");
    out.push_back({std::string(csv::trim(rec[0])), parse_point(rec[1], rec[2], row), std::string(csv::trim(rec[3]))});
  }
  return Gazetteer(std::move(out));
}

inline Gazetteer load_gazetteer_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open gazetteer file '" + path + "'");
  return load_gazetteer(in);
}

/// Generic forward-geocoding endpoint.
///
/// Request:  GET {base_url}{path}?query=<text>&access_key=<key>
/// Response: {"data": [{"latitude": <deg>, "longitude": <deg>,
///                      "confidence": <0..1, optional>, "label": <text, optional>}, ...]}
///
/// Only the first entry of `data` is used. The key is read from the
/// environment variable named by `key_env` at call time.
struct RemoteGeocoderConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8089
  std::string path = "/v1/forward";
  std::string key_env = "SENTINEL_GEOCODER_KEY";
  int timeout_seconds = 5;
};

inline GeocodeResult geocode_remote(std::string_view query, const RemoteGeocoderConfig& cfg) {
  if (cfg.base_url.empty()) throw TransportError("no remote geocoder endpoint configured");
  const char* key = std::getenv(cfg.key_env.c_str());
  if (!key || !*key) throw TransportError("geocoder key variable " + cfg.key_env + " is not set");

  httplib::Client client(cfg.base_url);
  client.set_connection_timeout(cfg.timeout_seconds, 0);
  client.set_read_timeout(cfg.timeout_seconds, 0);
  httplib::Params params{{"query", std::string(query)}, {"access_key", key}};
  auto res = client.Get(cfg.path, params, httplib::Headers{});
  if (!res) throw TransportError("geocoder unreachable: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status == 503) {
    std::optional<int> retry;
    if (res->has_header("Retry-After")) retry = parse_int<int>(res->get_header_value("Retry-After"));
    throw TransportError("geocoder over quota or unavailable (HTTP " + std::to_string(res->status) + ")", retry);
  }
  if (res->status != 200) throw TransportError("geocoder returned HTTP " + std::to_string(res->status));

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw TransportError("geocoder returned malformed JSON");
  }
  if (!body.contains("data") || !body["data"].is_array()) throw TransportError("geocoder payload lacks a data array");
  if (body["data"].empty()) throw NotFoundError("no geocoding match for '" + std::string(query) + "'");
  const auto& top = body["data"].front();
  if (!top.contains("latitude") || !top.contains("longitude") || !top["latitude"].is_number() ||
      !top["longitude"].is_number())
    throw TransportError("geocoder result lacks numeric latitude/longitude");
  GeocodeResult r;
  r.query = std::string(query);
  r.point = GeoPoint(top["latitude"].get<double>(), top["longitude"].get<double>());
  r.source = GeocodeSource::remote;
  r.confidence = std::clamp(top.value("confidence", 1.0), 0.0, 1.0);
  r.matched_name = top.value("label", std::string(query));
  return r;
}

/// Geocoding entry point: either a single remote request or a gazetteer
/// lookup. Gazetteer mode never touches the network.
class Geocoder {
 public:
  Geocoder(Gazetteer gazetteer, RemoteGeocoderConfig remote = {})
      : gazetteer_(std::move(gazetteer)), remote_(std::move(remote)) {}

  GeocodeResult geocode(std::string_view query, GeocodeSource mode) const {
    if (csv::trim(query).empty()) throw ValidationError("geocode query is empty", {"address"});
    if (mode == GeocodeSource::remote) return geocode_remote(query, remote_);
    if (auto r = gazetteer_.lookup(query)) return *r;
    throw NotFoundError("no gazetteer entry matches '" + std::string(query) + "'");
  }

  bool remote_configured() const { return !remote_.base_url.empty(); }
  const Gazetteer& gazetteer() const noexcept { return gazetteer_; }

 private:
  Gazetteer gazetteer_;
  RemoteGeocoderConfig remote_;
};

}  // namespace sentinel::geo
