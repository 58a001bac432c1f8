#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "modgraph/errors.hpp"
#include "modgraph/evaluation.hpp"
#include "modgraph/rng.hpp"

using namespace modgraph;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CellDescriptor make_cell(std::initializer_list<double> bins) {
  CellDescriptor cd;
  cd.bins = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(bins.size()));
  Eigen::Index i = 0;
  for (double v : bins) {
    cd.bins[i++] = v;
  }
  cd.descriptor = descriptor_of_values(cd.bins);
  return cd;
}

// Three cells with distinct directions and entropies.
DescriptorField varied_field() {
  DescriptorField f;
  f.emplace(GridIndex{0, 0}, make_cell({2, 0, 0, 0, 0, 0, 0, 0}));
  f.emplace(GridIndex{1, 0}, make_cell({0, 0, 1, 0, 0, 0, 0, 0}));
  f.emplace(GridIndex{2, 1}, make_cell({0, 0, 0, 0, 3, 1, 0, 0}));
  return f;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("scalar_histograms share one range across both samples") {
  const std::vector<double> a = {0.0, 1.0};
  const std::vector<double> b = {0.5, 1.0};
  const auto [ha, hb] = scalar_histograms(a, b, 20);
  CHECK(ha.size() == 20);
  CHECK(ha.sum() == doctest::Approx(1.0));
  CHECK(hb.sum() == doctest::Approx(1.0));
  CHECK(ha[0] == 0.5);
  CHECK(ha[19] == 0.5);  // the joint max lands in the last bin
  CHECK(hb[10] == 0.5);
  CHECK(hb[19] == 0.5);

  SUBCASE("identical constant samples collapse into one bin") {
    const auto [hc, hd] = scalar_histograms({3.0, 3.0}, {3.0}, 20);
    CHECK(hc[0] == 1.0);
    CHECK(hd[0] == 1.0);
  }

  SUBCASE("bad inputs are refused") {
    CHECK_THROWS_AS(scalar_histograms({}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(scalar_histograms({1.0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(scalar_histograms({1.0}, {1.0}, 0), std::invalid_argument);
  }
}

TEST_CASE("a field compared against itself reads as zero divergence") {
  const DescriptorField f = varied_field();
  const FieldComparison fc = evaluate_fields(f, f);
  CHECK(fc.overlap_cells == 3);
  CHECK(fc.entropy.js == 0.0);
  CHECK(fc.entropy.bhattacharyya == 0.0);
  CHECK(fc.entropy.wasserstein == 0.0);
  CHECK(fc.flow.js == 0.0);
  CHECK(fc.flow.bhattacharyya == 0.0);
  CHECK(fc.flow.wasserstein == 0.0);
  CHECK(fc.direction.wasserstein_deg == 0.0);
  CHECK(fc.direction.compared_cells == 3);
  CHECK(fc.direction.correlated_cells == 3);
  REQUIRE(fc.direction.correlation.has_value());
  CHECK(*fc.direction.correlation == doctest::Approx(1.0));
}

TEST_CASE("comparison covers only cells present in both fields") {
  DescriptorField a = varied_field();
  DescriptorField b;
  b.emplace(GridIndex{0, 0}, make_cell({2, 0, 0, 0, 0, 0, 0, 0}));
  b.emplace(GridIndex{9, 9}, make_cell({0, 0, 0, 0, 0, 0, 0, 9}));  // a lacks this

  const FieldComparison fc = evaluate_fields(a, b);
  CHECK(fc.overlap_cells == 1);
  CHECK(fc.entropy.js == 0.0);  // the one shared cell is identical
  CHECK(fc.direction.compared_cells == 1);
  CHECK(fc.direction.correlated_cells == 1);
  CHECK_FALSE(fc.direction.correlation.has_value());  // one pair is not enough
}

TEST_CASE("disjoint fields cannot be compared") {
  DescriptorField a;
  a.emplace(GridIndex{0, 0}, make_cell({1, 0}));
  DescriptorField b;
  b.emplace(GridIndex{5, 5}, make_cell({1, 0}));
  CHECK_THROWS_AS(evaluate_fields(a, b), EmptyOverlapError);
  CHECK_THROWS_AS(evaluate_fields(a, DescriptorField{}), EmptyOverlapError);
}

TEST_CASE("cells without usable direction are gated out, not zero-filled") {
  DescriptorField a = varied_field();
  DescriptorField b = varied_field();
  // Kill one side's bins for cell (1,0): entropy/flow still compare, but the
  // circular transport and correlation for that cell must be skipped.
  b.at({1, 0}) = make_cell({0, 0, 0, 0, 0, 0, 0, 0});
  const FieldComparison fc = evaluate_fields(a, b);
  CHECK(fc.overlap_cells == 3);
  CHECK(fc.direction.compared_cells == 2);
  CHECK(fc.direction.correlated_cells == 2);
}

TEST_CASE("aggregate means, deviations, and exclusions") {
  SceneReport r1;
  r1.scene_id = 1;
  r1.historical.entropy = {0.4, 0.2, 1.0};
  r1.historical.flow = {0.1, 0.3, 2.0};
  r1.historical.direction.wasserstein_deg = 10.0;
  r1.historical.direction.correlation = 0.9;
  r1.predicted = r1.historical;

  SceneReport r2 = r1;
  r2.scene_id = 2;
  r2.historical.entropy = {0.6, kInf, 3.0};  // disjoint histogram somewhere
  r2.historical.direction.wasserstein_deg = 30.0;
  r2.historical.direction.correlation = std::nullopt;

  const AggregateReport rep = aggregate({r1, r2});
  CHECK(rep.scene_count == 2);
  REQUIRE(rep.rows.size() == 6);
  CHECK(rep.rows[0].source == "historical");
  CHECK(rep.rows[0].data_type == "entropy");
  CHECK(rep.rows[1].data_type == "flow");
  CHECK(rep.rows[2].data_type == "direction");
  CHECK(rep.rows[3].source == "predicted");

  const AggregateRow& ent = rep.rows[0];
  REQUIRE(ent.js.has_value());
  CHECK(ent.js->mean == doctest::Approx(0.5));
  CHECK(ent.js->std_dev == doctest::Approx(std::sqrt(0.02)));
  CHECK(ent.js->count == 2);
  REQUIRE(ent.bhattacharyya.has_value());
  CHECK(ent.bhattacharyya->count == 1);     // the +inf scene dropped out
  CHECK(ent.bhattacharyya->excluded == 1);
  CHECK(ent.bhattacharyya->mean == doctest::Approx(0.2));
  CHECK(ent.bhattacharyya->std_dev == 0.0);  // single surviving value

  const AggregateRow& dir = rep.rows[2];
  CHECK_FALSE(dir.js.has_value());
  CHECK_FALSE(dir.bhattacharyya.has_value());
  REQUIRE(dir.wasserstein.has_value());
  CHECK(dir.wasserstein->mean == doctest::Approx(20.0));
  REQUIRE(dir.correlation.has_value());
  CHECK(dir.correlation->count == 1);  // the absent correlation was excluded
  CHECK(dir.correlation->excluded == 1);
  CHECK(dir.correlation->mean == doctest::Approx(0.9));

  // A single scene has no spread.
  const AggregateReport solo = aggregate({r1});
  CHECK(solo.rows[0].js->std_dev == 0.0);
  CHECK(solo.rows[0].js->count == 1);

  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("render_table shapes one row per source and data type") {
  SceneReport r;
  r.scene_id = 0;
  r.historical.entropy = {0.25, kInf, 1.5};
  r.historical.flow = {0.1, 0.2, 0.3};
  r.historical.direction.wasserstein_deg = 12.5;
  r.historical.direction.correlation = std::nullopt;
  r.predicted = r.historical;

  // A second scene with a finite Bhattacharyya so the exclusion suffix has a
  // surviving mean to attach to.
  SceneReport r2 = r;
  r2.scene_id = 1;
  r2.historical.entropy = {0.25, 0.2, 1.5};
  r2.predicted = r2.historical;

  const std::string table = render_table(aggregate({r, r2}));
  CHECK(table.find("scenes: 2") != std::string::npos);
  CHECK(table.find("historical") != std::string::npos);
  CHECK(table.find("predicted") != std::string::npos);
  CHECK(table.find("+/-") != std::string::npos);
  CHECK(table.find("(excl 1)") != std::string::npos);  // the +inf Bhattacharyya
  CHECK(table.find("n/a") != std::string::npos);       // direction has no JS

  std::size_t lines = 0;
  for (char c : table) {
    lines += c == '\n' ? 1 : 0;
  }
  CHECK(lines == 8);  // banner + header + 6 rows

  std::size_t entropy_rows = 0;
  std::size_t pos = 0;
  while ((pos = table.find("entropy", pos)) != std::string::npos) {
    ++entropy_rows;
    pos += 7;
  }
  CHECK(entropy_rows == 2);
}

TEST_CASE("aligned grid and sparse replays evaluate as equivalent") {
  // Same observations into the dense grid and the sparse map, grid origin on
  // the hash lattice: the rasterized field must match the grid field exactly,
  // in both the historical counts and the shared spectral predictions.
  const GridSpec spec{Position::Zero(), 0.5, 10, 10};
  const std::vector<double> periods = {120.0, 60.0};
  GridModel grid(spec, 8, periods);
  SparseHashMap map(0.5, 8);
  GlobalTemporalModel temporal(periods, 2, 8);
  NavGraph graph;  // no nodes: every cell stays unbound

  Rng rng(99);
  for (int i = 0; i < 600; ++i) {
    const Position p{rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0), 0.1};
    const double theta = rng.uniform(-kPi, kPi);
    const double t = 0.5 * static_cast<double>(i);
    grid.accumulate(p, theta, t);
    map.upsert_observation(p, theta, t);
  }
  for (const CellKey& key : map.keys_ordered()) {
    // Windows covering a full 120 s period so the spectral fit sees the whole
    // cosine and the evaluated predictions stay strictly positive.
    for (int w = 0; w < 12; ++w) {
      const double t_mid = 10.0 * w + 5.0;
      const double value =
          0.5 + 0.4 * std::cos(2.0 * kPi * t_mid / 120.0 + 0.1 * key.ix);
      temporal.ingest_window({key, 0}, t_mid, value);
      grid.temporal().ingest_window({key, 0}, t_mid, value);
    }
  }
  temporal.update_spectrum();
  grid.temporal().update_spectrum();

  const SceneReport report = evaluate_scene(graph, map, temporal, grid, 7, 45.0);
  CHECK(report.scene_id == 7);
  for (const FieldComparison* fc : {&report.historical, &report.predicted}) {
    CHECK(fc->overlap_cells == map.occupied_count());
    CHECK(fc->entropy.js <= 1e-12);
    CHECK(fc->entropy.bhattacharyya <= 1e-12);
    CHECK(fc->entropy.wasserstein <= 1e-12);
    CHECK(fc->flow.js <= 1e-12);
    CHECK(fc->flow.wasserstein <= 1e-12);
    CHECK(fc->direction.wasserstein_deg <= 1e-12);
  }
  REQUIRE(report.historical.direction.correlation.has_value());
  CHECK(*report.historical.direction.correlation == doctest::Approx(1.0));
}

}  // TEST_SUITE
