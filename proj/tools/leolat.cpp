// leolat: constellation / ground-station latency toolkit.
//
//   leolat gen-constellation --config run.json
//   leolat simulate          --config run.json
//   leolat place-gs          --config run.json [--greedy]
//   leolat sweep             --config run.json --axis planes --values 1,10,16
//
// Exit codes: 0 success, 1 domain or infeasibility error, 2 usage or parse
// error, 3 simulation finished but every event was censored.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leolat/config.hpp"
#include "leolat/io.hpp"
#include "leolat/placement.hpp"
#include "leolat/sim.hpp"
#include "leolat/sweep.hpp"

namespace fs = std::filesystem;
using namespace leolat;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAllCensored = 3;

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  return out;
}

std::string hours(const std::optional<double>& s) {
  if (!s) return "censored";
  std::ostringstream o;
  o << std::fixed << std::setprecision(1) << *s << " s (" << std::setprecision(2) << *s / 3600.0 << " h)";
  return o.str();
}

config::RunConfig load(const std::string& path, const std::string& output_override) {
  config::RunConfig cfg = config::load_config(path);
  if (!output_override.empty()) cfg.output_dir = output_override;
  return cfg;
}

int cmd_gen_constellation(const config::RunConfig& cfg) {
  const Constellation c = config::resolve_constellation(cfg);
  auto out = open_output(cfg.output_dir, "constellation.csv");
  write_constellation_csv(out, c);
  std::cout << "wrote " << c.size() << " satellites to " << (fs::path(cfg.output_dir) / "constellation.csv").string()
            << '\n';
  return 0;
}

int cmd_simulate(const config::RunConfig& cfg) {
  const Constellation c = config::resolve_constellation(cfg);
  const auto points = config::resolve_event_points(cfg);
  const auto stations = config::resolve_stations(cfg, c, points);
  const auto sets = assign_start_times(points, cfg.event_horizon_s, cfg.trials, cfg.sim.seed);
  const MonteCarloResult r = run_monte_carlo(c, sets, stations.stations, cfg.swath, cfg.sim);

  {
    auto out = open_output(cfg.output_dir, "records.csv");
    write_records_csv(out, r.records);
  }
  {
    auto out = open_output(cfg.output_dir, "stats.json");
    out << result_to_json(r).dump(2) << '\n';
  }
  std::cout << "satellites " << c.size() << ", stations " << stations.stations.size() << ", events "
            << points.size() << " x " << cfg.trials << " trials\n";
  std::cout << "capture     median " << hours(r.capture.median_s) << "  p95 " << hours(r.capture.p95_s)
            << "  censored " << r.capture.censored_fraction << '\n';
  std::cout << "compute     " << r.compute.seconds << " s (frame deadline " << r.compute.frame_deadline_s << " s, "
            << (r.compute.deadline_met ? "met" : "MISSED") << ")\n";
  std::cout << "transmit    median " << hours(r.transmit.median_s) << "  p95 " << hours(r.transmit.p95_s) << '\n';
  std::cout << "end-to-end  median " << hours(r.end_to_end.median_s) << "  p95 " << hours(r.end_to_end.p95_s)
            << "  censored " << r.end_to_end.censored_fraction << '\n';
  return r.end_to_end.median_s ? 0 : kExitAllCensored;
}

int cmd_place_gs(config::RunConfig cfg, bool greedy) {
  auto* placement = std::get_if<config::CandidatePlacement>(&cfg.stations);
  if (!placement) throw ParseError("place-gs needs stations.candidates_file in the config");
  if (greedy) placement->greedy = true;
  const Constellation c = config::resolve_constellation(cfg);
  const auto points = config::resolve_event_points(cfg);
  const auto resolved = config::resolve_stations(cfg, c, points);
  {
    auto out = open_output(cfg.output_dir, "selected_stations.csv");
    write_stations_csv(out, resolved.stations);
  }
  {
    auto out = open_output(cfg.output_dir, "placement_summary.json");
    out << placement_to_json(*resolved.placement, *resolved.matrix, placement->k, placement->forced,
                             placement->greedy ? "greedy" : "exact")
               .dump(2)
        << '\n';
  }
  std::cout << "selected " << resolved.placement->selected.size() << " of " << resolved.matrix->num_candidates()
            << " candidates, covering " << resolved.placement->covered_count << " / "
            << resolved.matrix->num_events() << " events (" << (resolved.placement->optimal ? "optimal" : "heuristic")
            << ")\n";
  for (const auto& id : resolved.placement->selected) std::cout << "  " << id << '\n';
  return 0;
}

int cmd_sweep(const config::RunConfig& cfg, const std::string& axis_name, const std::vector<std::string>& values,
              bool timing) {
  const SweepAxis axis = config::parse_axis(axis_name, values);
  const auto* base = std::get_if<ConstellationSpec>(&cfg.constellation);
  if (!base) throw ParseError("sweep needs a parametric constellation in the config");
  if (cfg.extend) throw ParseError("sweep does not support 'extend'");

  SweepInputs in;
  const auto points = config::resolve_event_points(cfg);
  in.event_sets = assign_start_times(points, cfg.event_horizon_s, cfg.trials, cfg.sim.seed);
  in.swath = cfg.swath;
  in.config = cfg.sim;
  if (std::holds_alternative<GroundStationCountAxis>(axis)) {
    const auto* p = std::get_if<config::CandidatePlacement>(&cfg.stations);
    if (!p) throw ParseError("station-count sweep needs stations.candidates_file in the config");
    in.candidates = load_stations_csv(p->candidates_path);
    in.placement_points = points;
    in.forced = p->forced;
    in.greedy_placement = p->greedy;
  } else {
    in.stations = config::resolve_stations(cfg, build_constellation(*base), points).stations;
  }
  const auto records = run_sweep(*base, axis, in);
  {
    auto out = open_output(cfg.output_dir, "sweep.csv");
    write_sweep_csv(out, records, timing);
  }
  std::cout << std::left << std::setw(10) << axis_name << std::setw(26) << "median capture" << std::setw(26)
            << "median transmit" << "censored\n";
  for (const auto& r : records)
    std::cout << std::setw(10) << r.value << std::setw(26) << hours(r.median_capture_s) << std::setw(26)
              << hours(r.median_transmit_s) << r.censored_fraction << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LEO constellation and ground-station latency toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_dir;
  bool greedy = false;
  bool timing = false;
  std::string axis;
  std::vector<std::string> values;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("-o,--output-dir", output_dir, "override output_dir from the config");
  };
  auto* gen = app.add_subcommand("gen-constellation", "write the satellite list as CSV");
  add_common(gen);
  auto* sim = app.add_subcommand("simulate", "Monte Carlo latency simulation");
  add_common(sim);
  auto* place = app.add_subcommand("place-gs", "select ground stations maximizing event coverage");
  add_common(place);
  place->add_flag("--greedy", greedy, "use the greedy solver instead of the exact one");
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter and report latency per value");
  add_common(sweep);
  sweep->add_option("--axis", axis, "planes | inclination | altitude | swath | phase | spread | stations")->required();
  sweep->add_option("--values", values, "comma-separated axis values")->required()->delimiter(',');
  sweep->add_flag("--timing", timing, "append wall_time_s to the sweep CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const config::RunConfig cfg = load(config_path, output_dir);
    if (*gen) return cmd_gen_constellation(cfg);
    if (*sim) return cmd_simulate(cfg);
    if (*place) return cmd_place_gs(cfg, greedy);
    if (*sweep) return cmd_sweep(cfg, axis, values, timing);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
