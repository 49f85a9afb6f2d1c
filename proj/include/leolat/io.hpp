#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "leolat/csv.hpp"
#include "leolat/errors.hpp"
#include "leolat/orbit.hpp"
#include "leolat/placement.hpp"
#include "leolat/sim.hpp"

namespace leolat {

inline void write_constellation_csv(std::ostream& out, const Constellation& c) {
  out << "id,altitude_km,inclination_deg,raan_deg,arg_lat0_deg\n";
  for (const auto& s : c.satellites)
    out << s.id << ',' << csv::fmt(s.orbit.altitude_km) << ',' << csv::fmt(s.orbit.inclination_deg) << ','
        << csv::fmt(s.orbit.raan_deg) << ',' << csv::fmt(s.orbit.arg_lat0_deg) << '\n';
}

// Ids must be dense from 0 in file order; epochs are 0.
inline Constellation read_constellation_csv(std::istream& in, const std::string& source) {
  const csv::Table t = csv::read_table(in, source);
  const std::size_t c_id = t.column("id");
  const std::size_t c_alt = t.column("altitude_km");
  const std::size_t c_inc = t.column("inclination_deg");
  const std::size_t c_raan = t.column("raan_deg");
  const std::size_t c_u = t.column("arg_lat0_deg");
  Constellation c;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t rn = t.row_numbers[i];
    const double id = csv::parse_double(row[c_id], source, rn, "id");
    if (id != static_cast<double>(i)) throw ParseError(csv::row_error(source, rn, "ids must be 0, 1, 2, ... in order"));
    CircularOrbit o;
    o.altitude_km = csv::parse_double(row[c_alt], source, rn, "altitude_km");
    o.inclination_deg = csv::parse_double(row[c_inc], source, rn, "inclination_deg");
    o.raan_deg = csv::parse_double(row[c_raan], source, rn, "raan_deg");
    o.arg_lat0_deg = csv::parse_double(row[c_u], source, rn, "arg_lat0_deg");
    try {
      o.validate();
    } catch (const DomainError& e) {
      throw ParseError(csv::row_error(source, rn, e.what()));
    }
    c.satellites.push_back({static_cast<int>(i), o});
  }
  return c;
}

inline Constellation load_constellation_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_constellation_csv(in, path);
}

inline nlohmann::ordered_json stats_to_json(const LatencyStats& s, bool with_cdf = true) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["median_s"] = s.median_s ? nlohmann::ordered_json(*s.median_s) : nlohmann::ordered_json(nullptr);
  j["p95_s"] = s.p95_s ? nlohmann::ordered_json(*s.p95_s) : nlohmann::ordered_json(nullptr);
  j["censored_fraction"] = s.censored_fraction;
  if (with_cdf) {
    auto cdf = nlohmann::ordered_json::array();
    for (const auto& [x, p] : s.cdf) cdf.push_back({x, p});
    j["cdf"] = std::move(cdf);
  }
  return j;
}

inline nlohmann::ordered_json result_to_json(const MonteCarloResult& r) {
  nlohmann::ordered_json j;
  j["capture"] = stats_to_json(r.capture);
  j["compute"] = {{"seconds", r.compute.seconds},
                  {"frame_deadline_s", r.compute.frame_deadline_s},
                  {"deadline_met", r.compute.deadline_met}};
  j["transmit"] = stats_to_json(r.transmit);
  j["end_to_end"] = stats_to_json(r.end_to_end);
  return j;
}

inline nlohmann::ordered_json placement_to_json(const PlacementResult& r, const CoverageMatrix& m, int k,
                                                const std::set<std::string>& forced, const std::string& solver) {
  nlohmann::ordered_json j;
  j["solver"] = solver;
  j["k"] = k;
  j["forced"] = std::vector<std::string>(forced.begin(), forced.end());
  j["selected"] = r.selected;
  j["covered_count"] = r.covered_count;
  j["num_events"] = m.num_events();
  j["num_candidates"] = m.num_candidates();
  j["optimal"] = r.optimal;
  return j;
}

}  // namespace leolat
