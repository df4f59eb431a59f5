#include <doctest.h>

#include <atomic>
#include <set>
#include <sstream>

#include "core/calibration.hpp"
#include "core/pipeline.hpp"
#include "core/sweep.hpp"

using namespace msense;

namespace {

SimConfig quiet_config() {
  SimConfig c;
  c.noise_power_dbm = -200.0;
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("drop seeds") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(drop_seed(1, i));
  CHECK(seen.size() == 1000);
  CHECK(drop_seed(1, 5) == drop_seed(1, 5));
  CHECK(drop_seed(1, 5) != drop_seed(2, 5));
}

TEST_CASE("scene building") {
  SimConfig c;
  std::set<std::size_t> counts;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Scene scene = build_scene(c, s, 3);
    CHECK(scene.saps.size() == 3);
    CHECK(scene.targets.size() >= 1);
    CHECK(scene.targets.size() <= 8);
    counts.insert(scene.targets.size());
    for (const auto& t : scene.targets) CHECK(t.scatter_points.size() == 15);
  }
  CHECK(counts.size() == 8);
  // SAP prefixes share the scene
  const Scene a = build_scene(c, 9, 1);
  const Scene b = build_scene(c, 9, 4);
  REQUIRE(a.targets.size() == b.targets.size());
  CHECK(a.targets[0].center == b.targets[0].center);
  CHECK(a.saps[0].position == b.saps[0].position);

  c.impulsive_targets = true;
  for (const auto& t : build_scene(c, 9, 1).targets) CHECK(t.scatter_points.size() == 1);
}

TEST_CASE("drops are deterministic") {
  SimConfig c;
  c.noise_power_dbm = -60.0;
  const DropDetail a = run_drop_detail(c, 77);
  const DropDetail b = run_drop_detail(c, 77);
  REQUIRE(a.fused.size() == b.fused.size());
  for (std::size_t i = 0; i < a.fused.size(); ++i) {
    CHECK(a.fused[i].position == b.fused[i].position);
    CHECK(a.fused[i].power_dbm == b.fused[i].power_dbm);
  }
  for (std::size_t s = 0; s < a.saps.size(); ++s) {
    CHECK(a.saps[s].extraction.peaks.size() == b.saps[s].extraction.peaks.size());
    CHECK(a.saps[s].noise_floor == b.saps[s].noise_floor);
  }
  CHECK(a.metrics.p_det == b.metrics.p_det);

  const DropResult r = run_drop(c, 77);
  CHECK(r.fused_count == a.fused.size());
  CHECK(r.peaks_per_sap.size() == 4);
  CHECK(r.metrics.precision == a.metrics.precision);
}

TEST_CASE("noise-free single target is found by every SAP and fused") {
  SimConfig c = quiet_config();
  c.n_targets_min = c.n_targets_max = 1;
  c.impulsive_targets = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DropDetail d = run_drop_detail(c, seed, true);
    REQUIRE(d.scene.targets.size() == 1);
    const Vec2 truth = d.scene.targets[0].center.xy();
    for (const auto& acq : d.saps) {
      REQUIRE(acq.periodogram.has_value());
      REQUIRE_FALSE(acq.extraction.peaks.empty());
      const Vec2 local = to_global(acq.extraction.peaks[0], acq.pose);
      CHECK((local - truth).norm() < 0.15);
    }
    REQUIRE(d.fused.size() >= 1);
    CHECK(d.metrics.p_det == 1.0);
    CHECK(d.fused[0].sources.size() == 4);
    CHECK((d.fused[0].position - truth).norm() < 0.1);
  }
}

TEST_CASE("a target hidden from every SAP is not reported under the multinode filter") {
  SimConfig c = quiet_config();
  Scene scene;
  scene.saps = place_saps(scene.room, 4);
  Target shell;
  shell.scatter_points = {{3, 3, 0.2}, {7, 7, 2.5}};
  shell.center = {5, 5, 1};
  shell.per_point_rcs = 0.5;
  scene.targets = {impulsive_target({5, 5, 1}), shell};
  std::vector<SapAcquisition> acqs;
  for (const auto& pose : scene.saps) acqs.push_back(acquire(c, scene, pose, 3));
  const SubsetOutcome out = evaluate_subset(c, scene, acqs, true);
  CHECK(out.counts.occluded_pairs == 4);
  CHECK(out.counts.target_sap_pairs == 8);
  for (const auto& d : out.fused) CHECK((d.position - Vec2{5, 5}).norm() > c.match_radius);
}

TEST_CASE("subset counts") {
  SimConfig c;
  const Scene scene = build_scene(c, 11, 4);
  std::vector<SapAcquisition> acqs;
  for (const auto& pose : scene.saps) acqs.push_back(acquire(c, scene, pose, 11));
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto sub = evaluate_subset(c, scene, std::span<const SapAcquisition>(acqs).first(n), false);
    CHECK(sub.counts.truths == scene.targets.size());
    CHECK(sub.counts.target_sap_pairs == scene.targets.size() * n);
    CHECK(sub.counts.detections == sub.fused.size());
    CHECK(sub.counts.true_positives == sub.match.pairs.size());
    const auto filtered = evaluate_subset(c, scene, std::span<const SapAcquisition>(acqs).first(n), true);
    CHECK(filtered.fused.size() <= sub.fused.size());
    if (n == 1) CHECK(filtered.fused.empty());
  }
}

TEST_CASE("sweep points") {
  const SimConfig base;
  CHECK(*config_for_point(base, SweepAxis::NoisePower, -40).noise_power_dbm == -40.0);
  CHECK(config_for_point(base, SweepAxis::NSaps, 2).n_saps == 2);
  CHECK(config_for_point(base, SweepAxis::NAntennas, 16).n_antennas == 16);
  CHECK(config_for_point(base, SweepAxis::Bandwidth, 400e6).n_subcarriers == 1492);
  const SimConfig t = config_for_point(base, SweepAxis::NTargets, 5);
  CHECK(t.n_targets_min == 5);
  CHECK(t.n_targets_max == 5);
  CHECK(config_for_point(base, SweepAxis::RoomSide, 6).room.side_y == 6.0);
  CHECK_THROWS_AS(config_for_point(base, SweepAxis::NAntennas, 2.5), Error);
  CHECK_THROWS_AS(config_for_point(base, SweepAxis::NTargets, 0), Error);
  for (const char* name : {"noise_power_dBm", "n_saps", "n_antennas", "bandwidth", "n_targets", "room_side"}) {
    CHECK(to_string(parse_axis(name)) == name);
  }
  CHECK_THROWS_AS(parse_axis("snr"), Error);
}

TEST_CASE("sweep rows, CSV and common seeds") {
  SweepSpec spec;
  spec.axis = SweepAxis::NoisePower;
  spec.values = {-80.0, -30.0};
  spec.drops_per_point = 4;
  std::vector<std::size_t> sink_sizes;
  const auto rows = run_sweep(spec, [&](const std::vector<SweepRow>& r) { sink_sizes.push_back(r.size()); });
  CHECK(rows.size() == 2 * 4 * 2);
  CHECK(sink_sizes == std::vector<std::size_t>{8, 8});
  for (const auto& r : rows) {
    CHECK(r.counts.drops == 4);
    CHECK(r.p_det_ci.lo <= r.metrics.p_det);
    CHECK(r.p_det_ci.hi >= r.metrics.p_det);
  }
  // the same drops are replayed at every point
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(rows[i].counts.truths == rows[i + 8].counts.truths);
    CHECK(rows[i].counts.occluded_pairs == rows[i + 8].counts.occluded_pairs);
  }
  std::ostringstream csv;
  write_csv_header(csv, spec.axis);
  write_csv_rows(csv, rows);
  CHECK(count_lines(csv.str()) == 17);
  CHECK(csv.str().rfind("noise_power_dBm,n_saps,filter,p_det,ci_lo,ci_hi,precision,f1,p_occ,drops,", 0) == 0);
  CHECK(csv.str().find("\n-80,1,0,") != std::string::npos);
  CHECK(csv.str().find("\n-30,4,1,") != std::string::npos);

  const auto again = run_sweep(spec);
  std::ostringstream csv2;
  write_csv_header(csv2, spec.axis);
  write_csv_rows(csv2, again);
  CHECK(csv2.str() == csv.str());

  const auto manifest = run_manifest(spec, "sweep");
  CHECK(manifest["csv_schema_version"] == kCsvSchemaVersion);
  CHECK(manifest["axis"] == "noise_power_dBm");
  CHECK(manifest["values"].size() == 2);
}

TEST_CASE("threads do not change results") {
  SweepSpec spec;
  spec.axis = SweepAxis::NTargets;
  spec.values = {3};
  spec.drops_per_point = 6;
  spec.sap_counts = {2};
  spec.base.threads = 1;
  const auto serial = run_sweep(spec);
  spec.base.threads = 3;
  const auto threaded = run_sweep(spec);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].counts.true_positives == threaded[i].counts.true_positives);
    CHECK(serial[i].counts.detections == threaded[i].counts.detections);
  }
}

TEST_CASE("n_saps axis yields one curve per point") {
  SweepSpec spec;
  spec.axis = SweepAxis::NSaps;
  spec.values = {1, 3};
  spec.drops_per_point = 2;
  spec.filters = {false};
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n_saps == 1);
  CHECK(rows[1].n_saps == 3);
}

TEST_CASE("sweep validation") {
  SweepSpec spec;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.values = {-50};
  spec.sap_counts = {5};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.sap_counts = {1};
  spec.drops_per_point = 0;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("parallel_for") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 4) throw_invalid("boom"); }), Error);
  std::atomic<int> n{0};
  parallel_for(0, 2, [&](std::size_t) { ++n; });
  CHECK(n == 0);
}

TEST_CASE("baseline sweep on a quiet channel") {
  SweepSpec spec;
  spec.values = {-200.0};
  spec.drops_per_point = 10;
  const auto rows = run_baseline(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_saps == 1);
  CHECK(rows[0].counts.truths == 10);
  CHECK(rows[0].metrics.p_det == 1.0);
}

TEST_CASE("thermal operating point") {
  const CheckResult r = check_thermal_operating_point();
  CHECK(r.passed);
  CHECK(r.measured == doctest::Approx(-84.97).epsilon(1e-3));
}
