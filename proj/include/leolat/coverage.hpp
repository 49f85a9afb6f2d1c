#pragma once

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "leolat/csv.hpp"
#include "leolat/errors.hpp"
#include "leolat/geomath.hpp"

namespace leolat {

inline constexpr double kDefaultMinElevationDeg = 10.0;
inline constexpr double kDefaultSwathKm = 125.0;

struct GroundStation {
  std::string id;
  GeoPoint location;
  double min_elevation_deg = kDefaultMinElevationDeg;

  void validate() const {
    if (id.empty()) throw DomainError("ground station with empty id");
    if (!(min_elevation_deg > 0.0 && min_elevation_deg <= 90.0))
      throw DomainError("ground station " + id + ": min elevation must lie in (0, 90]");
  }
};

// Triangle formed by Earth's centre, a ground station and a satellite sitting
// exactly at the station's minimum elevation.
struct CoverageGeometry {
  double altitude_km = 0.0;
  double min_elevation_deg = 0.0;
  double slant_range_km = 0.0;
  double central_angle_rad = 0.0;
  double coverage_radius_km = 0.0;
};

// Earth-central angle between a station and the sub-satellite point at which
// the satellite sits at elevation `elevation_deg`.
inline double coverage_central_angle(double altitude_km, double elevation_deg) {
  const double rho = kEarth.radius_km / (kEarth.radius_km + altitude_km);
  const double el = deg2rad(elevation_deg);
  return std::max(0.0, std::acos(rho * std::cos(el)) - el);
}

inline CoverageGeometry gs_coverage_geometry(double altitude_km, double min_elevation_deg) {
  if (!(altitude_km > 0.0)) throw DomainError("coverage geometry: altitude must be positive");
  if (!(min_elevation_deg >= 0.0 && min_elevation_deg <= 90.0))
    throw DomainError("coverage geometry: elevation must lie in [0, 90]");
  const double r = kEarth.radius_km;
  const double el = deg2rad(min_elevation_deg);
  CoverageGeometry g;
  g.altitude_km = altitude_km;
  g.min_elevation_deg = min_elevation_deg;
  g.central_angle_rad = coverage_central_angle(altitude_km, min_elevation_deg);
  // Positive root of (R+H)^2 = L^2 + R^2 + 2 L R sin(el).
  const double s = r * std::sin(el);
  g.slant_range_km = -s + std::sqrt(s * s + altitude_km * (2.0 * r + altitude_km));
  g.coverage_radius_km = r * g.central_angle_rad;
  return g;
}

// Satellite elevation seen from the station when the sub-satellite point is
// at `subpoint`. Negative below the horizon.
inline double elevation_angle(const GeoPoint& subpoint, const GeoPoint& station, double altitude_km) {
  const double gamma = central_angle(subpoint, station);
  const double rho = kEarth.radius_km / (kEarth.radius_km + altitude_km);
  return rad2deg(std::atan2(std::cos(gamma) - rho, std::sin(gamma)));
}

inline double elevation_angle(const GeoPoint& subpoint, const GroundStation& station, double altitude_km) {
  return elevation_angle(subpoint, station.location, altitude_km);
}

// Closed boundary: a sub-point exactly on the coverage circle is in contact.
inline bool in_contact(const GeoPoint& subpoint, const GroundStation& station, double altitude_km) {
  return central_angle(subpoint, station.location) <=
         coverage_central_angle(altitude_km, station.min_elevation_deg);
}

struct SwathModel {
  double swath_km = kDefaultSwathKm;

  void validate() const {
    if (!(swath_km > 0.0) || !std::isfinite(swath_km)) throw DomainError("swath must be positive");
  }
  double radius_km() const { return swath_km / 2.0; }
};

// Disc footprint of radius swath/2 around the sub-satellite point, closed.
inline bool in_capture(const GeoPoint& subpoint, const GeoPoint& event_location, const SwathModel& swath) {
  return surface_distance(subpoint, event_location) <= swath.radius_km();
}

inline double derive_swath(double gsd_km_per_px, double pixel_count) {
  if (!(gsd_km_per_px > 0.0) || !(pixel_count > 0.0)) throw DomainError("derive_swath: inputs must be positive");
  return gsd_km_per_px * pixel_count;
}

inline double swath_from_fov(double altitude_km, double fov_deg) {
  if (!(altitude_km > 0.0)) throw DomainError("swath_from_fov: altitude must be positive");
  if (!(fov_deg >= 0.0 && fov_deg < 180.0)) throw DomainError("swath_from_fov: fov must lie in [0, 180)");
  return altitude_km * std::tan(deg2rad(fov_deg) / 2.0);
}

// Ground-station list, header `id,lat_deg,lon_deg,min_elev_deg`. The
// elevation column may be left empty to take the default.
inline std::vector<GroundStation> read_stations_csv(std::istream& in, const std::string& source) {
  const csv::Table t = csv::read_table(in, source);
  const std::size_t c_id = t.column("id");
  const std::size_t c_lat = t.column("lat_deg");
  const std::size_t c_lon = t.column("lon_deg");
  const bool has_elev = t.has_column("min_elev_deg");
  const std::size_t c_elev = has_elev ? t.column("min_elev_deg") : 0;
  std::vector<GroundStation> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t rn = t.row_numbers[i];
    GroundStation gs;
    gs.id = row[c_id];
    if (gs.id.empty()) throw ParseError(csv::row_error(source, rn, "empty id"));
    if (!seen.insert(gs.id).second) throw ParseError(csv::row_error(source, rn, "duplicate id '" + gs.id + "'"));
    const double lat = csv::parse_double(row[c_lat], source, rn, "lat_deg");
    const double lon = csv::parse_double(row[c_lon], source, rn, "lon_deg");
    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 360.0)
      throw ParseError(csv::row_error(source, rn, "coordinate out of range"));
    gs.location = GeoPoint(lat, lon);
    if (has_elev && !row[c_elev].empty()) gs.min_elevation_deg = csv::parse_double(row[c_elev], source, rn, "min_elev_deg");
    if (!(gs.min_elevation_deg > 0.0 && gs.min_elevation_deg <= 90.0))
      throw ParseError(csv::row_error(source, rn, "min_elev_deg must lie in (0, 90]"));
    out.push_back(std::move(gs));
  }
  return out;
}

inline std::vector<GroundStation> load_stations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_stations_csv(in, path);
}

inline void write_stations_csv(std::ostream& out, const std::vector<GroundStation>& stations) {
  out << "id,lat_deg,lon_deg,min_elev_deg\n";
  for (const auto& s : stations)
    out << s.id << ',' << csv::fmt(s.location.lat_deg()) << ',' << csv::fmt(s.location.lon_deg()) << ','
        << csv::fmt(s.min_elevation_deg) << '\n';
}

}  // namespace leolat
