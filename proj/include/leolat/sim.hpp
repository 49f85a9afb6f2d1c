#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "leolat/coverage.hpp"
#include "leolat/csv.hpp"
#include "leolat/errors.hpp"
#include "leolat/events.hpp"
#include "leolat/geomath.hpp"
#include "leolat/orbit.hpp"

namespace leolat {

struct ConstantCompute {
  double seconds = 0.0;
};

// Fixed per-tile inference cost, tiles processed one at a time.
struct PerTileCompute {
  int tile_count = 256;
  double seconds_per_tile = 0.05;
};

using ComputeModel = std::variant<ConstantCompute, PerTileCompute>;

// Sub-satellite ground speed used for the frame deadline and step bound.
inline double ground_speed_km_s(double altitude_km) { return kEarth.radius_km * mean_motion(altitude_km); }

// Largest time step for which consecutive capture discs leave no gap.
inline double max_step_s(double swath_km, double altitude_km) {
  return (swath_km / 2.0) / ground_speed_km_s(altitude_km);
}

struct SimConfig {
  double step_s = 5.0;
  double horizon_s = 172800.0;
  double extra_horizon_s = 0.0;
  ComputeModel compute_model = ConstantCompute{0.0};
  std::uint64_t seed = 1;
  double greenwich0_deg = 0.0;
  int threads = 0;  // 0: one per hardware thread

  double scan_end_s() const { return horizon_s + extra_horizon_s; }

  void validate(const SwathModel& swath, const Constellation& constellation) const {
    swath.validate();
    if (!(step_s > 0.0) || !std::isfinite(step_s)) throw DomainError("sim: step_s must be positive");
    if (!(horizon_s > 0.0)) throw DomainError("sim: horizon_s must be positive");
    if (!(extra_horizon_s >= 0.0)) throw DomainError("sim: extra_horizon_s must be >= 0");
    if (const auto* c = std::get_if<ConstantCompute>(&compute_model); c && !(c->seconds >= 0.0))
      throw DomainError("sim: compute seconds must be >= 0");
    if (const auto* p = std::get_if<PerTileCompute>(&compute_model);
        p && (p->tile_count < 0 || !(p->seconds_per_tile >= 0.0)))
      throw DomainError("sim: per-tile compute parameters must be >= 0");
    for (const auto& sat : constellation.satellites) {
      sat.orbit.validate();
      const double limit = max_step_s(swath.swath_km, sat.orbit.altitude_km);
      if (step_s > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "sim: step_s " << step_s << " s exceeds " << limit << " s, the gap-free bound for a "
            << swath.swath_km << " km swath at " << sat.orbit.altitude_km << " km";
        throw DomainError(msg.str());
      }
    }
  }
};

struct ComputeLatency {
  double seconds = 0.0;
  double frame_deadline_s = 0.0;  // time for the ground track to advance one swath
  bool deadline_met = true;
};

inline ComputeLatency compute_latency(const ComputeModel& model, const SwathModel& swath, double altitude_km) {
  ComputeLatency out;
  out.seconds = std::visit(
      [](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ConstantCompute>) return m.seconds;
        else return m.tile_count * m.seconds_per_tile;
      },
      model);
  out.frame_deadline_s = swath.swath_km / ground_speed_km_s(altitude_km);
  out.deadline_met = out.seconds <= out.frame_deadline_s;
  return out;
}

// Empty optional means censored: nothing happened before the scan ended.
using Latency = std::optional<double>;

struct LatencyRecord {
  int event_id = 0;
  Latency capture_s;
  double compute_s = 0.0;
  Latency transmit_s;
  Latency end_to_end_s;
  std::optional<int> capturing_sat_id;

  friend bool operator==(const LatencyRecord&, const LatencyRecord&) = default;
};

struct CaptureResult {
  Latency latency_s;
  std::optional<int> sat_id;
};

namespace detail {

// Upper bound on how fast any sub-satellite point of `c` moves over the
// rotating Earth (great-circle km/s): inertial track speed plus the surface
// speed of the equator.
inline double max_track_speed_km_s(const Constellation& c) {
  double n_max = 0.0;
  for (const auto& s : c.satellites) n_max = std::max(n_max, mean_motion(s.orbit.altitude_km));
  return kEarth.radius_km * (n_max + kEarth.rotation_rad_s) * (1.0 + 1e-9);
}

inline double max_track_speed_km_s(const CircularOrbit& o) {
  return kEarth.radius_km * (mean_motion(o.altitude_km) + kEarth.rotation_rad_s) * (1.0 + 1e-9);
}

// Steps that can be skipped while a point `gap_km` outside a target circle
// approaches it at no more than `speed_km_s`. Every skipped step is provably
// still outside, so skipping yields exactly the dense-scan answer.
inline long safe_skip(double gap_km, double speed_km_s, double step_s) {
  const double steps = (gap_km - 1e-9) / (speed_km_s * step_s);
  if (!(steps >= 1.0)) return 1;
  if (steps > 1e15) return std::numeric_limits<long>::max() / 4;
  return static_cast<long>(std::floor(steps));
}

// Last step index k with origin + k*step <= end, or -1 if none.
inline long last_step(double origin_s, double end_s, double step_s) {
  if (origin_s > end_s) return -1;
  return static_cast<long>(std::floor((end_s - origin_s) / step_s + 1e-9));
}

// First step k in [0, k_limit] at which `sat` images `location`, else -1.
inline long first_capture_step(const CircularOrbit& orbit, const GeoPoint& location, const SwathModel& swath,
                               double start_s, long k_limit, const SimConfig& cfg, double speed_km_s) {
  long k = 0;
  while (k <= k_limit) {
    const GeoPoint sub = subsatellite_point(orbit, start_s + static_cast<double>(k) * cfg.step_s, cfg.greenwich0_deg);
    const double d = surface_distance(sub, location);
    if (d <= swath.radius_km()) return k;
    k += safe_skip(d - swath.radius_km(), speed_km_s, cfg.step_s);
  }
  return -1;
}

}  // namespace detail

// First step, on the event's own grid start + k*step, at which any satellite
// footprint contains the event. Ties go to the lowest satellite id.
inline CaptureResult capture_latency(const Constellation& constellation, const Event& event, const SwathModel& swath,
                                     const SimConfig& cfg) {
  CaptureResult out;
  long best = detail::last_step(event.start_time_s, cfg.scan_end_s(), cfg.step_s);
  if (best < 0) return out;
  std::optional<int> best_sat;
  long bound = best;
  for (const auto& sat : constellation.satellites) {
    const long k = detail::first_capture_step(sat.orbit, event.location, swath, event.start_time_s, bound, cfg,
                                              detail::max_track_speed_km_s(sat.orbit));
    if (k >= 0) {
      best = k;
      best_sat = sat.id;
      bound = k - 1;  // later ids must be strictly earlier to win
      if (bound < 0) break;
    }
  }
  if (best_sat) {
    out.latency_s = static_cast<double>(best) * cfg.step_s;
    out.sat_id = best_sat;
  }
  return out;
}

// Time from `ready_time_s` until satellite `sat_id` first enters the coverage
// circle of any station. Contact itself is instantaneous.
inline Latency transmission_latency(const Constellation& constellation, int sat_id, double ready_time_s,
                                    const std::vector<GroundStation>& stations, const SimConfig& cfg) {
  if (stations.empty()) return std::nullopt;
  const CircularOrbit& orbit = constellation.at(sat_id).orbit;
  const long k_limit = detail::last_step(ready_time_s, cfg.scan_end_s(), cfg.step_s);
  std::vector<double> alpha(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i)
    alpha[i] = coverage_central_angle(orbit.altitude_km, stations[i].min_elevation_deg);
  const double speed = detail::max_track_speed_km_s(orbit);
  long k = 0;
  while (k <= k_limit) {
    const GeoPoint sub = subsatellite_point(orbit, ready_time_s + static_cast<double>(k) * cfg.step_s, cfg.greenwich0_deg);
    double min_gap_km = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < stations.size(); ++i) {
      const double gamma = central_angle(sub, stations[i].location);
      if (gamma <= alpha[i]) return static_cast<double>(k) * cfg.step_s;
      min_gap_km = std::min(min_gap_km, (gamma - alpha[i]) * kEarth.radius_km);
    }
    k += detail::safe_skip(min_gap_km, speed, cfg.step_s);
  }
  return std::nullopt;
}

// Full capture -> compute -> downlink chain for one event. Only the capturing
// satellite may downlink; its clock starts once onboard processing finishes.
inline LatencyRecord evaluate_event(const Constellation& constellation, const Event& event,
                                    const std::vector<GroundStation>& stations, const SwathModel& swath,
                                    const SimConfig& cfg) {
  LatencyRecord rec;
  rec.event_id = event.id;
  const CaptureResult cap = capture_latency(constellation, event, swath, cfg);
  rec.capture_s = cap.latency_s;
  rec.capturing_sat_id = cap.sat_id;
  if (!cap.sat_id) {
    rec.compute_s = compute_latency(cfg.compute_model, swath, constellation.satellites.front().orbit.altitude_km).seconds;
    return rec;
  }
  const double alt = constellation.at(*cap.sat_id).orbit.altitude_km;
  rec.compute_s = compute_latency(cfg.compute_model, swath, alt).seconds;
  const double ready = event.start_time_s + *cap.latency_s + rec.compute_s;
  rec.transmit_s = transmission_latency(constellation, *cap.sat_id, ready, stations, cfg);
  if (rec.transmit_s) rec.end_to_end_s = *rec.capture_s + rec.compute_s + *rec.transmit_s;
  return rec;
}

// Thrown when a percentile is requested but every observation is censored.
class AllCensoredError : public DomainError {
 public:
  AllCensoredError() : DomainError("percentile: every observation is censored") {}
};

// Nearest-rank percentile: the ceil(q*N)-th smallest value (at least the first).
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("percentile: q must lie in [0, 1]");
  if (sorted.empty()) throw AllCensoredError();
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

inline std::vector<double> uncensored_sorted(const std::vector<Latency>& values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto& x : values)
    if (x) v.push_back(*x);
  std::sort(v.begin(), v.end());
  return v;
}

inline double percentile(const std::vector<Latency>& values, double q) {
  return percentile_sorted(uncensored_sorted(values), q);
}

struct LatencyStats {
  std::optional<double> median_s;  // empty when everything is censored
  std::optional<double> p95_s;
  double censored_fraction = 0.0;
  std::size_t count = 0;
  // (latency, fraction of uncensored observations <= latency), one entry per distinct latency.
  std::vector<std::pair<double, double>> cdf;

  friend bool operator==(const LatencyStats&, const LatencyStats&) = default;
};

inline LatencyStats summarize(const std::vector<Latency>& values) {
  LatencyStats s;
  s.count = values.size();
  const std::vector<double> v = uncensored_sorted(values);
  s.censored_fraction = values.empty() ? 0.0 : static_cast<double>(values.size() - v.size()) / values.size();
  if (!v.empty()) {
    s.median_s = percentile_sorted(v, 0.5);
    s.p95_s = percentile_sorted(v, 0.95);
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p = static_cast<double>(i + 1) / v.size();
    if (!s.cdf.empty() && s.cdf.back().first == v[i]) s.cdf.back().second = p;
    else s.cdf.emplace_back(v[i], p);
  }
  return s;
}

struct TrialRecord {
  int trial = 0;
  LatencyRecord record;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct MonteCarloResult {
  std::vector<TrialRecord> records;  // trial-major, events in input order
  LatencyStats capture;
  LatencyStats transmit;
  LatencyStats end_to_end;
  ComputeLatency compute;
};

// Runs `fn(i)` for i in [0, n) over a pool of threads. Each index is handled
// exactly once, so writing results by index is order-independent.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  unsigned hw = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  hw = static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(n, 1)));
  if (hw <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(hw);
  for (unsigned t = 0; t < hw; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline MonteCarloResult run_monte_carlo(const Constellation& constellation, const std::vector<EventSet>& event_sets,
                                        const std::vector<GroundStation>& stations, const SwathModel& swath,
                                        const SimConfig& cfg) {
  if (event_sets.empty()) throw DomainError("run_monte_carlo: at least one trial required");
  if (constellation.empty()) throw DomainError("run_monte_carlo: empty constellation");
  cfg.validate(swath, constellation);
  for (const auto& st : stations) st.validate();

  std::vector<std::pair<int, const Event*>> work;
  for (std::size_t t = 0; t < event_sets.size(); ++t)
    for (const auto& e : event_sets[t].events) work.emplace_back(static_cast<int>(t), &e);

  MonteCarloResult out;
  out.records.resize(work.size());
  parallel_for(work.size(), cfg.threads, [&](std::size_t i) {
    out.records[i] = {work[i].first, evaluate_event(constellation, *work[i].second, stations, swath, cfg)};
  });

  std::vector<Latency> cap, tx, e2e;
  cap.reserve(out.records.size());
  tx.reserve(out.records.size());
  e2e.reserve(out.records.size());
  for (const auto& r : out.records) {
    cap.push_back(r.record.capture_s);
    // Uncaptured events never reach the downlink stage and are censored there too.
    tx.push_back(r.record.transmit_s);
    e2e.push_back(r.record.end_to_end_s);
  }
  out.capture = summarize(cap);
  out.transmit = summarize(tx);
  out.end_to_end = summarize(e2e);
  out.compute = compute_latency(cfg.compute_model, swath, constellation.satellites.front().orbit.altitude_km);
  return out;
}

inline void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  auto opt = [](const Latency& v) { return v ? csv::fmt(*v) : std::string(); };
  out << "trial,event_id,capture_s,compute_s,transmit_s,end_to_end_s,censored\n";
  for (const auto& tr : records) {
    const auto& r = tr.record;
    out << tr.trial << ',' << r.event_id << ',' << opt(r.capture_s) << ',' << csv::fmt(r.compute_s) << ','
        << opt(r.transmit_s) << ',' << opt(r.end_to_end_s) << ',' << (r.end_to_end_s ? 0 : 1) << '\n';
  }
}

}  // namespace leolat
