#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "leolat/errors.hpp"

namespace leolat {

// Spherical Earth shared by every module.
struct EarthModel {
  double radius_km = 6371.0;
  double mu_km3_s2 = 398600.4418;
  double rotation_rad_s = 7.2921159e-5;
  double j2 = 1.08263e-3;
};

inline constexpr EarthModel kEarth{};

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

// Maps any longitude into (-180, 180].
inline double normalize_lon_deg(double lon) {
  lon = std::fmod(lon, 360.0);
  if (lon <= -180.0) lon += 360.0;
  if (lon > 180.0) lon -= 360.0;
  return lon;
}

// Maps any angle into [0, 360).
inline double normalize_angle_deg(double deg) {
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

// Geodetic position on the spherical Earth. Latitude is checked, longitude is
// always normalized into (-180, 180].
class GeoPoint {
 public:
  GeoPoint() = default;
  GeoPoint(double lat_deg, double lon_deg) : lat_(lat_deg), lon_(normalize_lon_deg(lon_deg)) {
    if (!(lat_deg >= -90.0 && lat_deg <= 90.0) || !std::isfinite(lon_deg)) {
      std::ostringstream msg;
      msg << "invalid coordinate (" << lat_deg << ", " << lon_deg << ")";
      throw DomainError(msg.str());
    }
  }

  double lat_deg() const { return lat_; }
  double lon_deg() const { return lon_; }
  double lat_rad() const { return deg2rad(lat_); }
  double lon_rad() const { return deg2rad(lon_); }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

// Great-circle central angle in [0, pi], haversine in atan2 form so it stays
// well conditioned for both tiny and near-antipodal separations.
inline double central_angle(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = b.lat_rad() - a.lat_rad();
  const double dlon = b.lon_rad() - a.lon_rad();
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  double h = s_lat * s_lat + std::cos(a.lat_rad()) * std::cos(b.lat_rad()) * s_lon * s_lon;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

inline double surface_distance(const GeoPoint& a, const GeoPoint& b) {
  return kEarth.radius_km * central_angle(a, b);
}

// Point reached by travelling `distance_km` along the great circle leaving
// `origin` at initial bearing `bearing_deg` (clockwise from north).
inline GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_km) {
  if (distance_km < 0.0) throw DomainError("destination_point: negative distance");
  const double delta = distance_km / kEarth.radius_km;
  const double theta = deg2rad(bearing_deg);
  const double lat1 = origin.lat_rad();
  const double lon1 = origin.lon_rad();
  const double sin_lat2 = std::clamp(
      std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(theta), -1.0, 1.0);
  const double lat2 = std::asin(sin_lat2);
  const double lon2 = lon1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                                        std::cos(delta) - std::sin(lat1) * sin_lat2);
  return GeoPoint(std::clamp(rad2deg(lat2), -90.0, 90.0), rad2deg(lon2));
}

}  // namespace leolat
