#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "leolat/csv.hpp"
#include "leolat/errors.hpp"
#include "leolat/geomath.hpp"

namespace leolat {

// An event never ends once started, so there is no end time.
struct Event {
  int id = 0;
  GeoPoint location;
  double start_time_s = 0.0;
};

struct EventSet {
  std::vector<Event> events;
  std::string source_label;
};

struct Region {
  GeoPoint center;
  double width_km = 500.0;
  double height_km = 500.0;

  void validate() const {
    const double max_extent = kPi * kEarth.radius_km;
    if (!(width_km >= 0.0 && width_km <= max_extent) || !(height_km >= 0.0 && height_km <= max_extent))
      throw DomainError("region extents must lie in [0, pi*R] km");
  }
};

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Equirectangular cell centres. Cells that do not fit evenly are dropped
// symmetrically from both ends of each axis.
inline std::vector<GeoPoint> uniform_grid(double spacing_deg) {
  if (!(spacing_deg > 0.0 && spacing_deg < 180.0)) throw DomainError("grid spacing must lie in (0, 180) degrees");
  const int n_lat = static_cast<int>(std::floor(180.0 / spacing_deg + 1e-9));
  const int n_lon = static_cast<int>(std::floor(360.0 / spacing_deg + 1e-9));
  const double lat0 = -90.0 + (180.0 - n_lat * spacing_deg) / 2.0 + spacing_deg / 2.0;
  const double lon0 = -180.0 + (360.0 - n_lon * spacing_deg) / 2.0 + spacing_deg / 2.0;
  std::vector<GeoPoint> out;
  out.reserve(static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lon));
  for (int i = 0; i < n_lat; ++i)
    for (int j = 0; j < n_lon; ++j) out.emplace_back(lat0 + i * spacing_deg, lon0 + j * spacing_deg);
  return out;
}

// Uniform east/north offsets over the region's tangent rectangle, mapped onto
// the sphere along the great circle from the centre.
inline std::vector<GeoPoint> sample_region(const Region& region, int count, std::uint64_t seed) {
  region.validate();
  if (count < 1) throw DomainError("sample_region: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<GeoPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double east = (uniform01(rng) - 0.5) * region.width_km;
    const double north = (uniform01(rng) - 0.5) * region.height_km;
    const double dist = std::hypot(east, north);
    if (dist == 0.0) {
      out.push_back(region.center);
      continue;
    }
    out.push_back(destination_point(region.center, rad2deg(std::atan2(east, north)), dist));
  }
  return out;
}

// Event locations, header containing `lat_deg,lon_deg`; other columns ignored.
inline std::vector<GeoPoint> read_events_csv(std::istream& in, const std::string& source) {
  const csv::Table t = csv::read_table(in, source);
  const std::size_t c_lat = t.column("lat_deg");
  const std::size_t c_lon = t.column("lon_deg");
  std::vector<GeoPoint> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::size_t rn = t.row_numbers[i];
    const double lat = csv::parse_double(t.rows[i][c_lat], source, rn, "lat_deg");
    const double lon = csv::parse_double(t.rows[i][c_lon], source, rn, "lon_deg");
    if (lat < -90.0 || lat > 90.0) throw ParseError(csv::row_error(source, rn, "lat_deg out of range [-90, 90]"));
    if (lon < -180.0 || lon > 360.0) throw ParseError(csv::row_error(source, rn, "lon_deg out of range [-180, 360]"));
    out.emplace_back(lat, lon);
  }
  return out;
}

inline std::vector<GeoPoint> load_events_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_events_csv(in, path);
}

inline void write_events_csv(std::ostream& out, const std::vector<GeoPoint>& points) {
  out << "lat_deg,lon_deg\n";
  for (const auto& p : points) out << csv::fmt(p.lat_deg()) << ',' << csv::fmt(p.lon_deg()) << '\n';
}

// One event set per Monte Carlo trial, every location present in every trial
// with a start time uniform on [0, horizon). Trial t draws from seed ^ t, so
// each trial can be regenerated on its own.
inline EventSet trial_events(const std::vector<GeoPoint>& points, double horizon_s, std::uint64_t seed, int trial,
                             const std::string& label = {}) {
  std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(trial));
  EventSet set;
  set.source_label = label;
  set.events.reserve(points.size());
  for (std::size_t j = 0; j < points.size(); ++j)
    set.events.push_back({static_cast<int>(j), points[j], uniform01(rng) * horizon_s});
  return set;
}

inline std::vector<EventSet> assign_start_times(const std::vector<GeoPoint>& points, double horizon_s, int trials,
                                                std::uint64_t seed, const std::string& label = {}) {
  if (!(horizon_s > 0.0)) throw DomainError("assign_start_times: horizon must be positive");
  if (trials < 1) throw DomainError("assign_start_times: trials must be >= 1");
  std::vector<EventSet> out;
  out.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) out.push_back(trial_events(points, horizon_s, seed, t, label));
  return out;
}

}  // namespace leolat
