#pragma once

#include <chrono>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "leolat/coverage.hpp"
#include "leolat/csv.hpp"
#include "leolat/errors.hpp"
#include "leolat/events.hpp"
#include "leolat/orbit.hpp"
#include "leolat/placement.hpp"
#include "leolat/sim.hpp"

namespace leolat {

struct NumPlanesAxis { std::vector<int> values; };
struct InclinationAxis { std::vector<double> values; };
struct AltitudeAxis { std::vector<double> values; };
struct SwathAxis { std::vector<double> values; };
struct PhaseDiffAxis { std::vector<double> values; };
struct PlaneSpreadAxis { std::vector<PlaneSpread> values; };
struct GroundStationCountAxis { std::vector<int> values; };

using SweepAxis = std::variant<NumPlanesAxis, InclinationAxis, AltitudeAxis, SwathAxis, PhaseDiffAxis, PlaneSpreadAxis,
                               GroundStationCountAxis>;

inline const char* axis_name(const SweepAxis& axis) {
  static constexpr const char* names[] = {"planes", "inclination", "altitude", "swath", "phase", "spread", "stations"};
  return names[axis.index()];
}

struct SweepRecord {
  std::string axis;
  std::string value;
  std::optional<double> median_capture_s;
  std::optional<double> p95_capture_s;
  std::optional<double> median_transmit_s;
  std::optional<double> p95_transmit_s;
  std::optional<double> median_end_to_end_s;
  std::optional<double> p95_end_to_end_s;
  double censored_fraction = 0.0;  // of end-to-end observations
  double wall_time_s = 0.0;
  std::vector<std::string> stations;  // selection used, for the station-count axis
};

struct SweepInputs {
  std::vector<EventSet> event_sets;
  std::vector<GroundStation> stations;  // fixed set for the orbital axes
  // Station-count axis: candidates are re-selected for every k.
  std::vector<GroundStation> candidates;
  std::vector<GeoPoint> placement_points;
  std::set<std::string> forced;
  bool greedy_placement = false;
  SwathModel swath;
  SimConfig config;
};

inline SweepRecord to_sweep_record(const std::string& axis, const std::string& value, const MonteCarloResult& r) {
  SweepRecord rec;
  rec.axis = axis;
  rec.value = value;
  rec.median_capture_s = r.capture.median_s;
  rec.p95_capture_s = r.capture.p95_s;
  rec.median_transmit_s = r.transmit.median_s;
  rec.p95_transmit_s = r.transmit.p95_s;
  rec.median_end_to_end_s = r.end_to_end.median_s;
  rec.p95_end_to_end_s = r.end_to_end.p95_s;
  rec.censored_fraction = r.end_to_end.censored_fraction;
  return rec;
}

inline std::string to_string(PlaneSpread s) { return s == PlaneSpread::Half ? "half" : "full"; }

// Selects k stations from the candidates for the given altitude.
inline PlacementResult place_stations(const std::vector<GroundStation>& candidates,
                                      const std::vector<GeoPoint>& points, double altitude_km, int k,
                                      const std::set<std::string>& forced, bool greedy) {
  PlacementProblem p{build_coverage_matrix(candidates, points, altitude_km), k, forced};
  return greedy ? solve_greedy(p) : solve_exact(p);
}

inline std::vector<GroundStation> stations_by_id(const std::vector<GroundStation>& candidates,
                                                 const std::vector<std::string>& ids) {
  std::vector<GroundStation> out;
  for (const auto& id : ids)
    for (const auto& c : candidates)
      if (c.id == id) out.push_back(c);
  return out;
}

// One Monte Carlo run per axis value, all sharing the same event sets and
// seed so that differences come from the swept parameter alone.
inline std::vector<SweepRecord> run_sweep(const ConstellationSpec& base, const SweepAxis& axis,
                                          const SweepInputs& in) {
  const std::string name = axis_name(axis);
  std::vector<SweepRecord> out;
  auto run_one = [&](const std::string& value, const ConstellationSpec& spec, const SwathModel& swath,
                     const std::vector<GroundStation>& stations) {
    const auto t0 = std::chrono::steady_clock::now();
    const Constellation c = build_constellation(spec);
    const MonteCarloResult r = run_monte_carlo(c, in.event_sets, stations, swath, in.config);
    SweepRecord rec = to_sweep_record(name, value, r);
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
  };
  auto check_nonempty = [](std::size_t n) {
    if (n == 0) throw DomainError("sweep axis has no values");
  };

  std::visit(
      [&](const auto& ax) {
        using A = std::decay_t<decltype(ax)>;
        check_nonempty(ax.values.size());
        for (const auto& v : ax.values) {
          ConstellationSpec spec = base;
          SwathModel swath = in.swath;
          std::string label;
          if constexpr (std::is_same_v<A, NumPlanesAxis>) {
            spec.num_planes = v;
            label = std::to_string(v);
          } else if constexpr (std::is_same_v<A, InclinationAxis>) {
            spec.inclination_deg = v;
            label = csv::fmt(v);
          } else if constexpr (std::is_same_v<A, AltitudeAxis>) {
            spec.altitude_km = v;
            label = csv::fmt(v);
          } else if constexpr (std::is_same_v<A, SwathAxis>) {
            swath.swath_km = v;
            label = csv::fmt(v);
          } else if constexpr (std::is_same_v<A, PhaseDiffAxis>) {
            spec.inter_plane_phase_deg = v;
            label = csv::fmt(v);
          } else if constexpr (std::is_same_v<A, PlaneSpreadAxis>) {
            spec.plane_spread = v;
            label = to_string(v);
          } else {
            label = std::to_string(v);
          }

          if constexpr (std::is_same_v<A, GroundStationCountAxis>) {
            const PlacementResult placed =
                place_stations(in.candidates, in.placement_points, spec.altitude_km, v, in.forced, in.greedy_placement);
            SweepRecord rec = run_one(label, spec, swath, stations_by_id(in.candidates, placed.selected));
            rec.stations = placed.selected;
            out.push_back(std::move(rec));
          } else {
            out.push_back(run_one(label, spec, swath, in.stations));
          }
        }
      },
      axis);
  return out;
}

// Union of two constellations; the added satellites are renumbered after the
// existing ones, whose orbits are left untouched.
inline Constellation incremental_extend(const Constellation& existing, const Constellation& additional) {
  Constellation out = existing;
  int next = static_cast<int>(existing.size());
  for (const auto& s : additional.satellites) out.satellites.push_back({next++, s.orbit});
  return out;
}

// A spec with zero satellites adds nothing.
inline Constellation incremental_extend(const Constellation& existing, const ConstellationSpec& additional) {
  if (additional.num_sats == 0) return existing;
  return incremental_extend(existing, build_constellation(additional));
}

inline double launch_cost(double c1, double c2, double num_sats, double num_launches) {
  if (c1 < 0 || c2 < 0 || num_sats < 0 || num_launches < 0) throw DomainError("launch_cost: inputs must be >= 0");
  return c1 * num_sats + c2 * num_launches;
}

// Each launch reaches a single plane.
inline double launch_cost(const ConstellationSpec& spec, double c1, double c2) {
  return launch_cost(c1, c2, spec.num_sats, spec.num_planes);
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, bool with_wall_time = false) {
  auto opt = [](const std::optional<double>& v) { return v ? csv::fmt(*v) : std::string(); };
  out << "axis,value,median_capture_s,p95_capture_s,median_transmit_s,p95_transmit_s,median_end_to_end_s,"
         "p95_end_to_end_s,censored_fraction";
  if (with_wall_time) out << ",wall_time_s";
  out << '\n';
  for (const auto& r : records) {
    out << r.axis << ',' << r.value << ',' << opt(r.median_capture_s) << ',' << opt(r.p95_capture_s) << ','
        << opt(r.median_transmit_s) << ',' << opt(r.p95_transmit_s) << ',' << opt(r.median_end_to_end_s) << ','
        << opt(r.p95_end_to_end_s) << ',' << csv::fmt(r.censored_fraction);
    if (with_wall_time) out << ',' << csv::fmt(r.wall_time_s);
    out << '\n';
  }
}

}  // namespace leolat
