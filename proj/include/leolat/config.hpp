#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "leolat/coverage.hpp"
#include "leolat/errors.hpp"
#include "leolat/events.hpp"
#include "leolat/io.hpp"
#include "leolat/orbit.hpp"
#include "leolat/sim.hpp"
#include "leolat/sweep.hpp"
#include "leolat/tle.hpp"

// Run configuration: one JSON document, see configs/README.md for the schema.
namespace leolat::config {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct TleSource { std::string path; };
struct ConstellationCsvSource { std::string path; };
using ConstellationSource = std::variant<ConstellationSpec, TleSource, ConstellationCsvSource>;

struct GridEvents { double spacing_deg = 10.0; };
struct RegionEvents { Region region; int count = 100; };
struct CsvEvents { std::string path; };
using EventSource = std::variant<GridEvents, RegionEvents, CsvEvents>;

struct StationFile { std::string path; };
struct CandidatePlacement {
  std::string candidates_path;
  int k = 12;
  std::set<std::string> forced;
  bool greedy = false;
};
using StationSource = std::variant<StationFile, CandidatePlacement>;

struct RunConfig {
  ConstellationSource constellation = ConstellationSpec{};
  std::optional<ConstellationSpec> extend;
  SwathModel swath;
  StationSource stations = StationFile{};
  EventSource events = GridEvents{};
  SimConfig sim;
  double event_horizon_s = 86400.0;
  int trials = 20;
  std::string output_dir = "out";
};

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError("config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError("config: unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError("config: '" + where + "." + key + "' has the wrong type");
  }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError("config: missing '" + where + "." + key + "'");
  return get<T>(j, key, where, T{});
}

inline std::string resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  if (!fs::exists(path)) throw ParseError("config: referenced file does not exist: " + path.string());
  return path.string();
}

inline PlaneSpread parse_spread(const std::string& s) {
  if (s == "half") return PlaneSpread::Half;
  if (s == "full") return PlaneSpread::Full;
  throw ParseError("config: plane_spread must be 'half' or 'full', got '" + s + "'");
}

inline ConstellationSpec parse_spec(const json& j, const std::string& where) {
  only_keys(j, where, {"num_sats", "num_planes", "altitude_km", "inclination_deg", "plane_spread", "phase_diff_deg"});
  ConstellationSpec s;
  s.num_sats = get<int>(j, "num_sats", where, s.num_sats);
  s.num_planes = get<int>(j, "num_planes", where, s.num_planes);
  s.altitude_km = get<double>(j, "altitude_km", where, s.altitude_km);
  s.inclination_deg = get<double>(j, "inclination_deg", where, s.inclination_deg);
  s.plane_spread = parse_spread(get<std::string>(j, "plane_spread", where, "half"));
  s.inter_plane_phase_deg = get<double>(j, "phase_diff_deg", where, 0.0);
  return s;
}

inline ComputeModel parse_compute(const json& j) {
  only_keys(j, "sim.compute", {"constant_s", "tiles", "seconds_per_tile"});
  const bool constant = j.contains("constant_s");
  const bool tiled = j.contains("tiles") || j.contains("seconds_per_tile");
  if (constant == tiled) throw ParseError("config: sim.compute needs either constant_s or tiles + seconds_per_tile");
  if (constant) return ConstantCompute{get<double>(j, "constant_s", "sim.compute", 0.0)};
  return PerTileCompute{require<int>(j, "tiles", "sim.compute"), require<double>(j, "seconds_per_tile", "sim.compute")};
}

}  // namespace detail

inline RunConfig parse_config(const json& root, const fs::path& base_dir) {
  using namespace detail;
  only_keys(root, "", {"constellation", "extend", "swath_km", "stations", "events", "sim", "output_dir"});
  RunConfig cfg;

  if (root.contains("constellation")) {
    const json& c = root.at("constellation");
    if (c.is_object() && c.contains("tle_file")) {
      only_keys(c, "constellation", {"tle_file"});
      cfg.constellation = TleSource{resolve(base_dir, require<std::string>(c, "tle_file", "constellation"))};
    } else if (c.is_object() && c.contains("csv_file")) {
      only_keys(c, "constellation", {"csv_file"});
      cfg.constellation = ConstellationCsvSource{resolve(base_dir, require<std::string>(c, "csv_file", "constellation"))};
    } else {
      cfg.constellation = parse_spec(c, "constellation");
    }
  }
  if (root.contains("extend")) cfg.extend = parse_spec(root.at("extend"), "extend");
  cfg.swath.swath_km = get<double>(root, "swath_km", "", kDefaultSwathKm);

  if (root.contains("stations")) {
    const json& s = root.at("stations");
    const bool file = s.is_object() && s.contains("file");
    const bool cand = s.is_object() && s.contains("candidates_file");
    if (file == cand) throw ParseError("config: stations needs exactly one of 'file' or 'candidates_file'");
    if (file) {
      only_keys(s, "stations", {"file"});
      cfg.stations = StationFile{resolve(base_dir, require<std::string>(s, "file", "stations"))};
    } else {
      only_keys(s, "stations", {"candidates_file", "k", "forced", "solver"});
      CandidatePlacement p;
      p.candidates_path = resolve(base_dir, require<std::string>(s, "candidates_file", "stations"));
      p.k = require<int>(s, "k", "stations");
      const auto forced = get<std::vector<std::string>>(s, "forced", "stations", {});
      p.forced = std::set<std::string>(forced.begin(), forced.end());
      const std::string solver = get<std::string>(s, "solver", "stations", "exact");
      if (solver != "exact" && solver != "greedy") throw ParseError("config: stations.solver must be exact or greedy");
      p.greedy = solver == "greedy";
      cfg.stations = p;
    }
  } else {
    throw ParseError("config: missing 'stations'");
  }

  if (root.contains("events")) {
    const json& e = root.at("events");
    only_keys(e, "events", {"grid_spacing_deg", "region", "count", "csv_file"});
    const int sources = int(e.contains("grid_spacing_deg")) + int(e.contains("region")) + int(e.contains("csv_file"));
    if (sources != 1) throw ParseError("config: events needs exactly one of grid_spacing_deg, region, csv_file");
    if (e.contains("grid_spacing_deg")) {
      cfg.events = GridEvents{require<double>(e, "grid_spacing_deg", "events")};
    } else if (e.contains("region")) {
      const json& r = e.at("region");
      only_keys(r, "events.region", {"lat_deg", "lon_deg", "width_km", "height_km"});
      RegionEvents re;
      try {
        re.region.center =
            GeoPoint(require<double>(r, "lat_deg", "events.region"), require<double>(r, "lon_deg", "events.region"));
      } catch (const DomainError& ex) {
        throw ParseError(std::string("config: events.region: ") + ex.what());
      }
      re.region.width_km = get<double>(r, "width_km", "events.region", 500.0);
      re.region.height_km = get<double>(r, "height_km", "events.region", 500.0);
      re.count = get<int>(e, "count", "events", 100);
      cfg.events = re;
    } else {
      cfg.events = CsvEvents{resolve(base_dir, require<std::string>(e, "csv_file", "events"))};
    }
  } else {
    throw ParseError("config: missing 'events'");
  }

  if (root.contains("sim")) {
    const json& s = root.at("sim");
    only_keys(s, "sim", {"step_s", "horizon_s", "extra_horizon_s", "event_horizon_s", "trials", "seed", "threads",
                         "compute", "greenwich0_deg"});
    cfg.sim.step_s = get<double>(s, "step_s", "sim", cfg.sim.step_s);
    cfg.sim.horizon_s = get<double>(s, "horizon_s", "sim", cfg.sim.horizon_s);
    cfg.sim.extra_horizon_s = get<double>(s, "extra_horizon_s", "sim", cfg.sim.extra_horizon_s);
    cfg.sim.seed = get<std::uint64_t>(s, "seed", "sim", cfg.sim.seed);
    cfg.sim.threads = get<int>(s, "threads", "sim", cfg.sim.threads);
    cfg.sim.greenwich0_deg = get<double>(s, "greenwich0_deg", "sim", 0.0);
    if (s.contains("compute")) cfg.sim.compute_model = parse_compute(s.at("compute"));
    cfg.event_horizon_s = get<double>(s, "event_horizon_s", "sim", cfg.event_horizon_s);
    cfg.trials = get<int>(s, "trials", "sim", cfg.trials);
  }
  cfg.output_dir = get<std::string>(root, "output_dir", "", cfg.output_dir);
  if (fs::path(cfg.output_dir).is_relative()) cfg.output_dir = (base_dir / cfg.output_dir).string();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  return parse_config(root, fs::path(path).parent_path());
}

inline Constellation resolve_constellation(const RunConfig& cfg) {
  Constellation c = std::visit(
      [](const auto& src) -> Constellation {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, ConstellationSpec>) return build_constellation(src);
        else if constexpr (std::is_same_v<S, TleSource>) return tle_catalog_to_constellation(load_tle_file(src.path)).constellation;
        else return load_constellation_csv(src.path);
      },
      cfg.constellation);
  if (cfg.extend) c = incremental_extend(c, *cfg.extend);
  if (c.empty()) throw DomainError("constellation is empty");
  return c;
}

inline std::vector<GeoPoint> resolve_event_points(const RunConfig& cfg) {
  return std::visit(
      [&](const auto& src) -> std::vector<GeoPoint> {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, GridEvents>) return uniform_grid(src.spacing_deg);
        else if constexpr (std::is_same_v<S, RegionEvents>) return sample_region(src.region, src.count, cfg.sim.seed);
        else return load_events_csv(src.path);
      },
      cfg.events);
}

struct ResolvedStations {
  std::vector<GroundStation> stations;
  std::optional<PlacementResult> placement;
  std::optional<CoverageMatrix> matrix;
};

// Station set for a run. A candidate source is solved for coverage of the
// configured event locations at the altitude of the first satellite.
inline ResolvedStations resolve_stations(const RunConfig& cfg, const Constellation& c,
                                         const std::vector<GeoPoint>& points) {
  ResolvedStations out;
  if (const auto* f = std::get_if<StationFile>(&cfg.stations)) {
    out.stations = load_stations_csv(f->path);
    return out;
  }
  const auto& p = std::get<CandidatePlacement>(cfg.stations);
  const auto candidates = load_stations_csv(p.candidates_path);
  out.matrix = build_coverage_matrix(candidates, points, c.satellites.front().orbit.altitude_km);
  PlacementProblem problem{*out.matrix, p.k, p.forced};
  out.placement = p.greedy ? solve_greedy(problem) : solve_exact(problem);
  out.stations = stations_by_id(candidates, out.placement->selected);
  return out;
}

inline SweepAxis parse_axis(const std::string& name, const std::vector<std::string>& values) {
  if (values.empty()) throw ParseError("sweep: axis values are empty");
  auto nums = [&] {
    std::vector<double> v;
    for (const auto& s : values) v.push_back(csv::parse_double(s, "--values", 1, name));
    return v;
  };
  auto ints = [&] {
    std::vector<int> v;
    for (double d : nums()) {
      if (d != static_cast<int>(d)) throw ParseError("sweep: " + name + " values must be integers");
      v.push_back(static_cast<int>(d));
    }
    return v;
  };
  if (name == "planes") return NumPlanesAxis{ints()};
  if (name == "inclination") return InclinationAxis{nums()};
  if (name == "altitude") return AltitudeAxis{nums()};
  if (name == "swath") return SwathAxis{nums()};
  if (name == "phase") return PhaseDiffAxis{nums()};
  if (name == "stations") return GroundStationCountAxis{ints()};
  if (name == "spread") {
    std::vector<PlaneSpread> v;
    for (const auto& s : values) v.push_back(detail::parse_spread(s));
    return PlaneSpreadAxis{v};
  }
  throw ParseError("sweep: unknown axis '" + name + "'");
}

}  // namespace leolat::config
