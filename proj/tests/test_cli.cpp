#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "leolat/config.hpp"
#include "leolat/io.hpp"

using namespace leolat;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = LEOLAT_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

int run(const std::string& args) {
  const std::string cmd = std::string(LEOLAT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) / ("leolat_cli_" + std::string(
                                                  ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    spit(dir_ / "stations.csv", slurp(kSource / "data/polar_stations.csv"));
    spit(dir_ / "candidates.csv", slurp(kSource / "data/candidates.csv"));
    spit(dir_ / "quakes.csv", slurp(kSource / "data/quakes.csv"));
    spit(dir_ / "sample.tle", slurp(kSource / "data/sample.tle"));
  }
  fs::path config(const std::string& name, const std::string& body) {
    spit(dir_ / name, body);
    return dir_ / name;
  }
  fs::path dir_;
};

const char* kSmall = R"({
  "constellation": {"num_sats": 8, "num_planes": 2, "altitude_km": 500, "inclination_deg": 97},
  "stations": {"file": "stations.csv"},
  "events": {"grid_spacing_deg": 30},
  "sim": {"horizon_s": 40000, "event_horizon_s": 20000, "trials": 3, "seed": 9, "threads": THREADS},
  "output_dir": "OUT"
})";

std::string small(const std::string& out, int threads = 0) {
  std::string s = kSmall;
  s.replace(s.find("THREADS"), 7, std::to_string(threads));
  s.replace(s.find("OUT"), 3, out);
  return s;
}

}  // namespace

TEST(ConfigParse, RejectsBadDocuments) {
  const fs::path base = kSource / "configs";
  auto bad = [&](const std::string& text) {
    EXPECT_THROW(config::parse_config(nlohmann::json::parse(text), base), ParseError) << text;
  };
  const std::string st = R"("stations": {"file": "../data/polar_stations.csv"})";
  const std::string ev = R"("events": {"grid_spacing_deg": 10})";
  bad("{" + st + "}");
  bad("{" + ev + "}");
  bad("{" + st + "," + ev + R"(, "bogus": 1})");
  bad("{" + st + R"(, "events": {"grid_spacing_deg": 10, "csv_file": "../data/quakes.csv"}})");
  bad("{" + ev + R"(, "stations": {"file": "missing.csv"}})");
  bad("{" + ev + R"(, "stations": {"file": "../data/polar_stations.csv", "candidates_file": "../data/candidates.csv", "k": 2}})");
  bad("{" + st + "," + ev + R"(, "sim": {"step_s": "fast"}})");
  bad("{" + st + "," + ev + R"(, "constellation": {"plane_spread": "quarter"}})");
  bad("{" + st + "," + ev + R"(, "sim": {"compute": {"constant_s": 1, "tiles": 3}}})");

  const auto cfg = config::parse_config(nlohmann::json::parse("{" + st + "," + ev + "}"), base);
  EXPECT_EQ(std::get<config::StationFile>(cfg.stations).path, (base / "../data/polar_stations.csv").string());
  EXPECT_EQ(cfg.trials, 20);
  EXPECT_EQ(cfg.sim.step_s, 5.0);
}

TEST(ConfigParse, BundledConfigsLoad) {
  for (const auto& e : fs::directory_iterator(kSource / "configs"))
    if (e.path().extension() == ".json") {
      EXPECT_NO_THROW(config::load_config(e.path().string())) << e.path();
    }
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("simulate"), 2);
  EXPECT_EQ(run("simulate -c " + (dir_ / "nope.json").string()), 2);
  const auto good = config("good.json", small("out"));
  EXPECT_EQ(run("sweep -c " + good.string() + " --axis warp --values 1"), 2);
  EXPECT_EQ(run("sweep -c " + good.string() + " --axis planes --values 1,x"), 2);
  EXPECT_EQ(run("sweep -c " + good.string() + " --axis planes --values 1.5"), 2);
  EXPECT_EQ(run("sweep -c " + good.string() + " --axis planes"), 2);
  EXPECT_EQ(run("place-gs -c " + good.string()), 2);

  std::string invalid = small("out");
  invalid.replace(invalid.find("\"num_planes\": 2"), 15, "\"num_planes\": 9");
  EXPECT_EQ(run("gen-constellation -c " + config("bad.json", invalid).string()), 1);

  const auto infeasible = config("inf.json", R"({
    "stations": {"candidates_file": "candidates.csv", "k": 500},
    "events": {"grid_spacing_deg": 30}, "output_dir": "out"})");
  EXPECT_EQ(run("place-gs -c " + infeasible.string()), 1);

  // Only high-latitude events against a 53 degree shell: nothing is captured.
  spit(dir_ / "arctic.csv", "lat_deg,lon_deg\n80,0\n-75,120\n");
  const auto censored = config("cen.json", R"({
    "constellation": {"num_sats": 8, "num_planes": 2, "inclination_deg": 53},
    "stations": {"file": "stations.csv"}, "events": {"csv_file": "arctic.csv"},
    "sim": {"trials": 2, "horizon_s": 20000, "event_horizon_s": 1000}, "output_dir": "cen"})");
  EXPECT_EQ(run("simulate -c " + censored.string()), 3);
  EXPECT_TRUE(fs::exists(dir_ / "cen/records.csv"));
}

TEST_F(Cli, GenConstellation) {
  const auto cfg = config("gen.json", R"({
    "constellation": {"num_sats": 160, "num_planes": 1},
    "stations": {"file": "stations.csv"}, "events": {"grid_spacing_deg": 30}, "output_dir": "gen"})");
  ASSERT_EQ(run("gen-constellation -c " + cfg.string()), 0);
  const Constellation c = load_constellation_csv((dir_ / "gen/constellation.csv").string());
  ASSERT_EQ(c.size(), 160u);
  for (const auto& s : c.satellites) EXPECT_EQ(s.orbit.raan_deg, 0.0);
  EXPECT_EQ(c, build_constellation({160, 1, 500, 97}));

  const auto tle = config("tle.json", R"({
    "constellation": {"tle_file": "sample.tle"},
    "stations": {"file": "stations.csv"}, "events": {"grid_spacing_deg": 30}, "output_dir": "tle"})");
  ASSERT_EQ(run("gen-constellation -c " + tle.string()), 0);
  const Constellation t = load_constellation_csv((dir_ / "tle/constellation.csv").string());
  const auto recs = load_tle_file((dir_ / "sample.tle").string());
  ASSERT_EQ(t.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(t.satellites[i].orbit.inclination_deg, recs[i].inclination_deg);
    EXPECT_EQ(t.satellites[i].orbit.raan_deg, recs[i].raan_deg);
    EXPECT_EQ(t.satellites[i].orbit.altitude_km, tle_altitude_km(recs[i]));
  }
}

TEST_F(Cli, SimulateTrivialOverheadIsZero) {
  // One satellite whose sub-point starts on the event, station on the event.
  const CircularOrbit o{500, 97, 0, 0, 0};
  std::ostringstream sats;
  write_constellation_csv(sats, Constellation{{{0, o}}});
  spit(dir_ / "one.csv", sats.str());
  spit(dir_ / "ev.csv", "lat_deg,lon_deg\n0,0\n");
  spit(dir_ / "gs.csv", "id,lat_deg,lon_deg,min_elev_deg\nhere,0,0,10\n");
  const auto cfg = config("triv.json", R"({
    "constellation": {"csv_file": "one.csv"}, "stations": {"file": "gs.csv"},
    "events": {"csv_file": "ev.csv"},
    "sim": {"trials": 1, "event_horizon_s": 1e-9, "horizon_s": 100}, "output_dir": "triv"})");
  ASSERT_EQ(run("simulate -c " + cfg.string()), 0);
  const auto stats = nlohmann::json::parse(slurp(dir_ / "triv/stats.json"));
  EXPECT_EQ(stats["end_to_end"]["median_s"], 0.0);
  EXPECT_EQ(stats["end_to_end"]["censored_fraction"], 0.0);
}

TEST_F(Cli, SimulateMatchesLibraryAndIsDeterministic) {
  const auto c1 = config("a.json", small("a", 1));
  const auto c4 = config("b.json", small("b", 4));
  ASSERT_EQ(run("simulate -c " + c1.string()), 0);
  ASSERT_EQ(run("simulate -c " + c4.string()), 0);
  ASSERT_EQ(run("simulate -c " + c1.string() + " -o " + (dir_ / "a2").string()), 0);
  for (const char* f : {"records.csv", "stats.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "a2" / f)) << f;
  }
  // Golden: the library called directly with the same inputs.
  const auto cfg = config::load_config(c1.string());
  const Constellation c = config::resolve_constellation(cfg);
  const auto pts = config::resolve_event_points(cfg);
  const auto st = config::resolve_stations(cfg, c, pts).stations;
  const auto r = run_monte_carlo(c, assign_start_times(pts, cfg.event_horizon_s, cfg.trials, cfg.sim.seed), st,
                                 cfg.swath, cfg.sim);
  std::ostringstream rec;
  write_records_csv(rec, r.records);
  EXPECT_EQ(rec.str(), slurp(dir_ / "a/records.csv"));
  EXPECT_EQ(result_to_json(r).dump(2) + "\n", slurp(dir_ / "a/stats.json"));
}

TEST_F(Cli, PlaceGs) {
  const auto all = config("all.json", R"({
    "stations": {"candidates_file": "stations.csv", "k": 8},
    "events": {"grid_spacing_deg": 30}, "output_dir": "all"})");
  ASSERT_EQ(run("place-gs -c " + all.string()), 0);
  auto want = load_stations_csv((dir_ / "stations.csv").string());
  std::sort(want.begin(), want.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  std::ostringstream o;
  write_stations_csv(o, want);
  EXPECT_EQ(slurp(dir_ / "all/selected_stations.csv"), o.str());

  const auto forced = config("forced.json", R"({
    "stations": {"candidates_file": "candidates.csv", "k": 5, "forced": ["c004"]},
    "events": {"csv_file": "quakes.csv"}, "output_dir": "forced"})");
  ASSERT_EQ(run("place-gs -c " + forced.string()), 0);
  ASSERT_EQ(run("place-gs -c " + forced.string() + " --greedy -o " + (dir_ / "greedy").string()), 0);
  const auto ex = nlohmann::json::parse(slurp(dir_ / "forced/placement_summary.json"));
  const auto gr = nlohmann::json::parse(slurp(dir_ / "greedy/placement_summary.json"));
  EXPECT_TRUE(ex["optimal"].get<bool>());
  EXPECT_FALSE(gr["optimal"].get<bool>());
  EXPECT_GE(ex["covered_count"].get<int>(), gr["covered_count"].get<int>());
  for (const auto* j : {&ex, &gr}) {
    const auto sel = (*j)["selected"].get<std::vector<std::string>>();
    EXPECT_EQ(sel.size(), 5u);
    EXPECT_NE(std::find(sel.begin(), sel.end(), "c004"), sel.end());
  }
  EXPECT_NE(slurp(dir_ / "forced/selected_stations.csv").find("c004,"), std::string::npos);
}

TEST_F(Cli, SweepSingletonMatchesSimulate) {
  const auto cfg = config("s.json", small("s"));
  ASSERT_EQ(run("simulate -c " + cfg.string()), 0);
  ASSERT_EQ(run("sweep -c " + cfg.string() + " --axis planes --values 2"), 0);
  ASSERT_EQ(run("sweep -c " + cfg.string() + " --axis planes --values 2 -o " + (dir_ / "s2").string()), 0);
  EXPECT_EQ(slurp(dir_ / "s/sweep.csv"), slurp(dir_ / "s2/sweep.csv"));
  const auto stats = nlohmann::json::parse(slurp(dir_ / "s/stats.json"));
  const auto table = csv::read_table_file((dir_ / "s/sweep.csv").string());
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.rows[0][table.column("median_capture_s")], csv::fmt(stats["capture"]["median_s"].get<double>()));
  EXPECT_EQ(table.rows[0][table.column("p95_transmit_s")], csv::fmt(stats["transmit"]["p95_s"].get<double>()));

  ASSERT_EQ(run("sweep -c " + cfg.string() + " --axis spread --values half,full --timing -o " + (dir_ / "t").string()), 0);
  EXPECT_NE(slurp(dir_ / "t/sweep.csv").find("wall_time_s"), std::string::npos);
}
