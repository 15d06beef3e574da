#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "sentinel/core/csv.hpp"
#include "sentinel/core/error.hpp"
#include "sentinel/core/numfmt.hpp"

namespace sentinel::geo {

/// Mean Earth radius (IUGG) used by every distance in this library.
inline constexpr double kEarthRadiusKm = 6371.0088;

class GeoPoint {
 public:
  GeoPoint() = default;
  GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
    if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0)
      throw ValidationError("latitude " + format_exact(lat) + " outside [-90, 90]", {"lat"});
    if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0)
      throw ValidationError("longitude " + format_exact(lon) + " outside [-180, 180]", {"lon"});
  }
  double lat() const noexcept { return lat_; }
  double lon() const noexcept { return lon_; }
  bool operator==(const GeoPoint&) const = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

inline double radians(double deg) { return deg * std::numbers::pi / 180.0; }
inline double degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double p1 = radians(a.lat()), p2 = radians(b.lat());
  const double dp = p2 - p1;
  const double dl = radians(b.lon() - a.lon());
  const double s1 = std::sin(dp / 2.0), s2 = std::sin(dl / 2.0);
  const double h = std::clamp(s1 * s1 + std::cos(p1) * std::cos(p2) * s2 * s2, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

enum class FacilityKind { hospital, cancer_centre, screening_camp };

inline const char* to_string(FacilityKind k) {
  switch (k) {
    case FacilityKind::hospital: return "hospital";
    case FacilityKind::cancer_centre: return "cancer_centre";
    case FacilityKind::screening_camp: return "screening_camp";
  }
  return "?";
}

inline std::optional<FacilityKind> parse_facility_kind(std::string_view s) {
  if (s == "hospital") return FacilityKind::hospital;
  if (s == "cancer_centre") return FacilityKind::cancer_centre;
  if (s == "screening_camp") return FacilityKind::screening_camp;
  return std::nullopt;
}

struct Facility {
  std::string id;
  std::string name;
  FacilityKind kind = FacilityKind::hospital;
  GeoPoint location;
  std::string district;
  bool operator==(const Facility&) const = default;
};

/// Immutable set of facilities with unique ids.
class FacilityStore {
 public:
  FacilityStore() = default;
  explicit FacilityStore(std::vector<Facility> items) : items_(std::move(items)) {
    std::unordered_set<std::string> ids;
    for (const auto& f : items_) {
      if (f.name.empty()) throw ValidationError("facility '" + f.id + "' has an empty name", {"name"});
      if (!ids.insert(f.id).second) throw DuplicateIdError(f.id);
    }
  }
  const std::vector<Facility>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

 private:
  std::vector<Facility> items_;
};

inline GeoPoint parse_point(const std::string& lat, const std::string& lon, std::size_t row) {
  auto la = parse_double(csv::trim(lat));
  auto lo = parse_double(csv::trim(lon));
  if (!la || !lo) throw ValidationError("row " + std::to_string(row) + ": coordinates are not numbers", {"lat", "lon"});
  try {
    return GeoPoint(*la, *lo);
  } catch (const ValidationError& e) {
    throw ValidationError("row " + std::to_string(row) + ": " + e.what(), e.fields());
  }
}

inline std::vector<std::string> read_header(csv::Reader& reader, const std::vector<std::string>& expected) {
  csv::Record header;
  if (!reader.next(header)) throw ParseError(1, 1, "missing header row");
  for (auto& h : header) h = std::string(csv::trim(h));
  if (header != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw ParseError(1, 1, "expected header " + want);
  }
  return header;
}

/// CSV with header id,name,kind,lat,lon,district.
inline FacilityStore load_facilities(std::istream& in) {
  csv::Reader reader(in);
  read_header(reader, {"id", "name", "kind", "lat", "lon", "district"});
  std::vector<Facility> out;
  std::unordered_set<std::string> ids;
  csv::Record rec;
  while (reader.next(rec)) {
    const auto row = reader.record_line();
    if (rec.size() == 1 && csv::trim(rec[0]).empty()) continue;
    if (rec.size() != 6) throw ParseError(row, std::min<std::size_t>(rec.size(), 6) + 1, "expected 6 fields");
    Facility f;
    f.id = std::string(csv::trim(rec[0]));
    f.name = std::string(csv::trim(rec[1]));
    auto kind = parse_facility_kind(csv::trim(rec[2]));
    if (!kind) throw ValidationError("row " + std::to_string(row) + ": unknown facility kind '" + rec[2] + "'", {"kind"});
    f.kind = *kind;
    f.location = parse_point(rec[3], rec[4], row);
    f.district = std::string(csv::trim(rec[5]));
    if (f.id.empty()) throw ValidationError("row " + std::to_string(row) + ": empty id", {"id"});
    if (f.name.empty()) throw ValidationError("row " + std::to_string(row) + ": empty name", {"name"});
    if (!ids.insert(f.id).second) throw DuplicateIdError(f.id);
    out.push_back(std::move(f));
  }
  return FacilityStore(std::move(out));
}

inline FacilityStore load_facilities_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open facility file '" + path + "'");
  return load_facilities(in);
}

struct RankedFacility {
  Facility facility;
  double distance_km = 0.0;
};

/// Up to k facilities nearest to `origin`, ascending by distance, ties by
/// id. Linear scan.
inline std::vector<RankedFacility> nearest_facilities(const FacilityStore& store, const GeoPoint& origin, std::size_t k,
                                                      std::optional<FacilityKind> kind = std::nullopt) {
  if (k == 0) throw ValidationError("k must be at least 1", {"k"});
  std::vector<RankedFacility> all;
  all.reserve(store.size());
  for (const auto& f : store.items())
    if (!kind || f.kind == *kind) all.push_back({f, haversine_km(origin, f.location)});
  auto less = [](const RankedFacility& a, const RankedFacility& b) {
    return a.distance_km < b.distance_km || (a.distance_km == b.distance_km && a.facility.id < b.facility.id);
  };
  if (all.size() > k) {
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), less);
    all.resize(k);
  } else {
    std::sort(all.begin(), all.end(), less);
  }
  return all;
}

}  // namespace sentinel::geo
