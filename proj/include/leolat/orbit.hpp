#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "leolat/errors.hpp"
#include "leolat/geomath.hpp"

namespace leolat {

// Band accepted for propagation. Designed constellations use the narrower
// LEO design band below; catalog orbits may sit slightly outside it.
inline constexpr double kMinPropagationAltitudeKm = 150.0;
inline constexpr double kMaxPropagationAltitudeKm = 3000.0;
inline constexpr double kMinDesignAltitudeKm = 200.0;
inline constexpr double kMaxDesignAltitudeKm = 2000.0;

namespace detail {
inline void check_altitude(double altitude_km, double lo, double hi, const char* who) {
  if (!(altitude_km >= lo && altitude_km <= hi)) {
    std::ostringstream msg;
    msg << who << ": altitude " << altitude_km << " km outside [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
}
}  // namespace detail

// Mean motion n = sqrt(mu / a^3) in rad/s for a circular orbit at the given altitude.
inline double mean_motion(double altitude_km) {
  detail::check_altitude(altitude_km, kMinPropagationAltitudeKm, kMaxPropagationAltitudeKm, "mean_motion");
  const double a = kEarth.radius_km + altitude_km;
  return std::sqrt(kEarth.mu_km3_s2 / (a * a * a));
}

inline double orbital_period_s(double altitude_km) { return 2.0 * kPi / mean_motion(altitude_km); }

// Circular two-body orbit. Eccentricity is zero by construction.
struct CircularOrbit {
  double altitude_km = 500.0;
  double inclination_deg = 97.0;
  double raan_deg = 0.0;
  double arg_lat0_deg = 0.0;
  double epoch_s = 0.0;

  void validate() const {
    detail::check_altitude(altitude_km, kMinPropagationAltitudeKm, kMaxPropagationAltitudeKm, "CircularOrbit");
    if (!(inclination_deg >= 0.0 && inclination_deg < 180.0))
      throw DomainError("CircularOrbit: inclination must lie in [0, 180)");
  }

  friend bool operator==(const CircularOrbit&, const CircularOrbit&) = default;
};

// Sub-satellite point at simulation time t. Inertial longitude 0 is aligned
// with Greenwich at t = 0, shifted by `greenwich0_deg` when given.
inline GeoPoint subsatellite_point(const CircularOrbit& orbit, double t_s, double greenwich0_deg = 0.0) {
  const double n = mean_motion(orbit.altitude_km);
  const double u = deg2rad(orbit.arg_lat0_deg) + n * (t_s - orbit.epoch_s);
  const double inc = deg2rad(orbit.inclination_deg);
  const double su = std::sin(u);
  const double cu = std::cos(u);
  const double lat = std::asin(std::clamp(std::sin(inc) * su, -1.0, 1.0));
  const double lon = deg2rad(orbit.raan_deg) + std::atan2(std::cos(inc) * su, cu) -
                     kEarth.rotation_rad_s * t_s - deg2rad(greenwich0_deg);
  return GeoPoint(rad2deg(lat), rad2deg(lon));
}

enum class PlaneSpread { Half, Full };

inline double spread_deg(PlaneSpread s) { return s == PlaneSpread::Half ? 180.0 : 360.0; }

struct ConstellationSpec {
  int num_sats = 48;
  int num_planes = 1;
  double altitude_km = 500.0;
  double inclination_deg = 97.0;
  PlaneSpread plane_spread = PlaneSpread::Half;
  double inter_plane_phase_deg = 0.0;

  void validate() const {
    if (num_sats < 1) throw DomainError("constellation: num_sats must be >= 1");
    if (num_planes < 1) throw DomainError("constellation: num_planes must be >= 1");
    if (num_planes > num_sats) {
      std::ostringstream msg;
      msg << "constellation: num_planes (" << num_planes << ") exceeds num_sats (" << num_sats << ")";
      throw DomainError(msg.str());
    }
    detail::check_altitude(altitude_km, kMinDesignAltitudeKm, kMaxDesignAltitudeKm, "constellation");
    if (!(inclination_deg >= 0.0 && inclination_deg < 180.0))
      throw DomainError("constellation: inclination must lie in [0, 180)");
    if (!std::isfinite(inter_plane_phase_deg)) throw DomainError("constellation: phase difference not finite");
  }
};

struct Satellite {
  int id = 0;
  CircularOrbit orbit;

  friend bool operator==(const Satellite&, const Satellite&) = default;
};

struct Constellation {
  std::vector<Satellite> satellites;

  std::size_t size() const { return satellites.size(); }
  bool empty() const { return satellites.empty(); }
  const Satellite& at(int id) const { return satellites.at(static_cast<std::size_t>(id)); }

  friend bool operator==(const Constellation&, const Constellation&) = default;
};

// Number of satellites placed in plane p; the remainder goes round-robin to
// the lowest plane indices.
inline int sats_in_plane(const ConstellationSpec& spec, int plane) {
  const int base = spec.num_sats / spec.num_planes;
  const int rem = spec.num_sats % spec.num_planes;
  return base + (plane < rem ? 1 : 0);
}

// Walker-style layout: planes evenly spaced in RAAN across the chosen spread,
// satellites evenly spaced in argument of latitude within each plane, and each
// plane rotated by a further `inter_plane_phase_deg` relative to the previous one.
inline Constellation build_constellation(const ConstellationSpec& spec) {
  spec.validate();
  Constellation out;
  out.satellites.reserve(static_cast<std::size_t>(spec.num_sats));
  const double raan_step = spread_deg(spec.plane_spread) / spec.num_planes;
  int id = 0;
  for (int p = 0; p < spec.num_planes; ++p) {
    const int in_plane = sats_in_plane(spec, p);
    for (int s = 0; s < in_plane; ++s) {
      CircularOrbit orbit;
      orbit.altitude_km = spec.altitude_km;
      orbit.inclination_deg = spec.inclination_deg;
      orbit.raan_deg = normalize_angle_deg(p * raan_step);
      orbit.arg_lat0_deg = normalize_angle_deg(s * (360.0 / in_plane) + p * spec.inter_plane_phase_deg);
      orbit.epoch_s = 0.0;
      out.satellites.push_back({id++, orbit});
    }
  }
  return out;
}

// Inclination whose J2 nodal precession tracks the mean Sun (one turn per
// tropical year). Always retrograde.
inline double sun_sync_inclination(double altitude_km) {
  detail::check_altitude(altitude_km, kMinDesignAltitudeKm, kMaxDesignAltitudeKm, "sun_sync_inclination");
  const double a = kEarth.radius_km + altitude_km;
  const double n = mean_motion(altitude_km);
  const double required = 2.0 * kPi / (365.2422 * 86400.0);
  const double ratio = kEarth.radius_km / a;
  const double cos_i = -required / (1.5 * n * kEarth.j2 * ratio * ratio);
  if (cos_i < -1.0 || cos_i > 1.0) throw DomainError("sun_sync_inclination: no solution");
  const double inc = rad2deg(std::acos(cos_i));
  if (!(inc > 90.0 && inc < 110.0)) throw DomainError("sun_sync_inclination: solution outside (90, 110) deg");
  return inc;
}

}  // namespace leolat
