#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "sonarfusion/error.hpp"
#include "sonarfusion/partition.hpp"

using namespace sonarfusion;

namespace {

SonarReading reading_at(int id, Vec2 origin, double bearing, double range, bool max_range = false) {
  SonarReading r;
  r.id = id;
  r.pose = {origin, 0};
  r.bearing_deg = bearing;
  r.range = range;
  r.is_max_range = max_range;
  return r;
}

SonarReading aimed(int id, Vec2 origin, Vec2 target) {
  const Vec2 d = target - origin;
  return reading_at(id, origin, rad_to_deg(std::atan2(d.y, d.x)), std::round(d.norm()));
}

using CellFamily = std::set<std::vector<int>>;

CellFamily family(const RegionPartition& p) {
  CellFamily f;
  for (const Region& r : p.regions()) {
    f.insert(r.cells);
  }
  return f;
}

const Region* find_label(const RegionPartition& p, const std::string& label) {
  for (const Region& r : p.regions()) {
    if (p.label_string(r) == label) {
      return &r;
    }
  }
  return nullptr;
}

const SensorParams kSensor{};
const PriorParams kPrior{};

}  // namespace

TEST_CASE("label_cell") {
  const SonarReading r = reading_at(0, {10, 10}, 0, 40);
  CHECK(label_point({50, 10}, r, kSensor) == Symbol::Arc);
  CHECK(label_point({30, 10}, r, kSensor) == Symbol::Sector);
  CHECK(label_point({5, 10}, r, kSensor) == Symbol::Exterior);
  CHECK(label_point({60, 10}, r, kSensor) == Symbol::Exterior);
  CHECK(label_point({48.5, 10}, r, kSensor) == Symbol::Arc);
  CHECK(label_point({48.4, 10}, r, kSensor) == Symbol::Sector);
  // Just inside and outside the 12.5 degree half-width.
  CHECK(label_point(Vec2{10, 10} + 30.0 * direction(12.4), r, kSensor) == Symbol::Sector);
  CHECK(label_point(Vec2{10, 10} + 30.0 * direction(12.6), r, kSensor) == Symbol::Exterior);

  const SonarReading dropout = reading_at(1, {10, 10}, 0, 40, true);
  CHECK(label_point({50, 10}, dropout, kSensor) == Symbol::Exterior);
  CHECK(label_point({30, 10}, dropout, kSensor) == Symbol::Sector);

  Grid g{100, 100, 1.0};
  CHECK(label_cell(g, g.index(49, 9), r, kSensor) == Symbol::Arc);
}

TEST_CASE("single reading gives an arc region and a sector region") {
  Grid g{100, 100, 1.0};
  const std::vector<SonarReading> rs = {reading_at(0, {50, 10}, 90, 50)};
  const RegionPartition p = build_partition(g, rs, kSensor, kPrior, {});
  p.check_invariants();
  REQUIRE(p.regions().size() == 2);
  CHECK(find_label(p, "A0") != nullptr);
  CHECK(find_label(p, "S0") != nullptr);
  // Row-major first appearance: the sector starts nearer the sonar.
  CHECK(p.label_string(p.regions()[0]) == "S0");
  CHECK(p.regions()[0].id == 0);
}

TEST_CASE("two overlapping readings produce the crossing regions") {
  Grid g{140, 120, 1.0};
  const std::vector<SonarReading> rs = {aimed(1, {50, 20}, {50, 80}), aimed(2, {100, 50}, {50, 80})};
  const RegionPartition p = build_partition(g, rs, kSensor, kPrior, {});
  p.check_invariants();
  for (const char* label : {"A1.A2", "A1.S2", "S1.S2", "A1.E2", "S1.E2", "E1.A2", "E1.S2"}) {
    CAPTURE(label);
    CHECK(find_label(p, label) != nullptr);
  }
}

TEST_CASE("two disjoint cones give four regions") {
  Grid g{120, 60, 1.0};
  const std::vector<SonarReading> rs = {reading_at(0, {20, 5}, 90, 40),
                                       reading_at(1, {100, 5}, 90, 30)};
  const RegionPartition p = build_partition(g, rs, kSensor, kPrior, {});
  // Count label classes by direct enumeration with an independent labeler.
  std::set<std::vector<Symbol>> classes;
  for (int cell = 0; cell < g.cell_count(); ++cell) {
    std::vector<Symbol> v;
    for (const auto& r : rs) v.push_back(oracle::label_by_dot(g.center(cell), r, kSensor));
    if (v != std::vector<Symbol>(2, Symbol::Exterior)) classes.insert(v);
  }
  CHECK(classes.size() == 4);
  CHECK(p.regions().size() == 4);
}

TEST_CASE("partition labels agree with an independent labeler") {
  std::mt19937_64 rng(5);
  Grid g{60, 50, 1.0};
  SensorParams s;
  s.r_max = 60;
  for (int trial = 0; trial < 20; ++trial) {
    const auto rs = oracle::random_readings(rng, g, s, 5);
    const RegionPartition p = build_partition(g, rs, s, kPrior, {});
    p.check_invariants();
    for (int cell = 0; cell < g.cell_count(); ++cell) {
      std::vector<Symbol> expected;
      for (const auto& r : rs) expected.push_back(oracle::label_by_dot(g.center(cell), r, s));
      const int idx = p.region_index_of_cell(cell);
      if (idx == RegionPartition::kNoRegion) {
        CHECK(expected == std::vector<Symbol>(rs.size(), Symbol::Exterior));
      } else {
        CHECK(p.regions()[static_cast<std::size_t>(idx)].label == expected);
      }
    }
    // Every region in A(r_i) lies inside arc-or-sector of reading i.
    for (std::size_t i = 0; i < rs.size(); ++i) {
      for (std::size_t ri : p.regions_for_reading(i)) {
        for (int cell : p.regions()[ri].cells) {
          CHECK(oracle::label_by_dot(g.center(cell), rs[i], s) != Symbol::Exterior);
        }
      }
    }
  }
}

TEST_CASE("add_reading") {
  Grid g{120, 100, 1.0};
  SUBCASE("a cone that misses everything leaves old regions untouched") {
    const std::vector<SonarReading> rs = {reading_at(0, {20, 5}, 90, 40)};
    const RegionPartition before = build_partition(g, rs, kSensor, kPrior, {});
    const RegionPartition after = add_reading(before, reading_at(7, {100, 5}, 90, 30));
    after.check_invariants();
    CHECK(after.regions().size() <= before.regions().size() + 2);
    for (const Region& old : before.regions()) {
      const Region& now = after.region_by_id(old.id);
      CHECK(now.cells == old.cells);
      CHECK(now.prior_occupied == old.prior_occupied);
      CHECK(now.label.back() == Symbol::Exterior);
    }
  }
  SUBCASE("an arc overlapping the first sector splits it") {
    const SonarReading r1 = reading_at(1, {60, 10}, 90, 70);
    const RegionPartition one = build_partition(g, std::vector{r1}, kSensor, kPrior, {});
    const Region& s1 = *find_label(one, "S1");
    // Third reading aimed across the middle of S1 from the side.
    const RegionPartition two = add_reading(one, aimed(3, {110, 40}, {60, 40}));
    two.check_invariants();
    const Region* s1a3 = find_label(two, "S1.A3");
    const Region* s1s3 = find_label(two, "S1.S3");
    const Region* s1e3 = find_label(two, "S1.E3");
    REQUIRE(s1a3 != nullptr);
    REQUIRE(s1e3 != nullptr);
    std::size_t cells = s1a3->cells.size() + s1e3->cells.size() + (s1s3 ? s1s3->cells.size() : 0);
    CHECK(cells == s1.cells.size());
    CHECK(s1a3->id >= one.regions().back().id + 1);
    CHECK_THROWS_AS(add_reading(two, r1), ModelError);
  }
  SUBCASE("incremental in any order equals batch") {
    std::mt19937_64 rng(11);
    SensorParams s;
    s.r_max = 80;
    for (int trial = 0; trial < 20; ++trial) {
      auto rs = oracle::random_readings(rng, g, s, 4);
      const RegionPartition batch = build_partition(g, rs, s, kPrior, {});
      std::shuffle(rs.begin(), rs.end(), rng);
      RegionPartition inc = build_partition(g, std::vector{rs[0]}, s, kPrior, {});
      for (std::size_t i = 1; i < rs.size(); ++i) inc = add_reading(inc, rs[i]);
      inc.check_invariants();
      CHECK(family(inc) == family(batch));
    }
  }
}

TEST_CASE("traversed cells are excised before labeling") {
  Grid g{100, 100, 1.0};
  const std::vector<Pose> path = {{{50, 10}, 90}, {{50, 30}, 90}};
  const auto mask = traversed_cells(g, path, 4.0);
  const std::vector<SonarReading> rs = {reading_at(0, {50, 30}, 90, 40)};
  const RegionPartition p = build_partition(g, rs, kSensor, kPrior, mask);
  p.check_invariants();
  for (const Region& r : p.regions()) {
    for (int cell : r.cells) CHECK_FALSE(mask[static_cast<std::size_t>(cell)]);
  }
  const RegionPartition q = add_reading(p, reading_at(1, {50, 10}, 90, 60));
  q.check_invariants();
}

TEST_CASE("prior_occupancy") {
  const PriorParams prior{0.3, 0.8, 0.01, 0.1};
  CHECK(prior_occupancy(1e-9, prior) == doctest::Approx(0.3));
  CHECK(prior_occupancy(1e9, prior) == 0.8);
  CHECK(prior_occupancy((0.8 - 0.3) / (2 * 0.01), prior) == doctest::Approx(0.55));
  CHECK_THROWS_AS(prior_occupancy(0.0, prior), ModelError);
  CHECK_THROWS_AS(prior_occupancy(-1.0, prior), ModelError);
  double last = 0.0;
  for (double a = 0.5; a < 200; a *= 1.3) {
    const double p = prior_occupancy(a, prior);
    CHECK(p >= last);
    CHECK(p >= 0.3);
    CHECK(p <= 0.8);
    last = p;
  }
  // Splitting area 10 into 5 + 5 is not multiplicative in P(free).
  const double whole = 1.0 - prior_occupancy(10, prior);
  const double half = 1.0 - prior_occupancy(5, prior);
  CHECK(std::abs(whole - half * half) > 0.1);
}

TEST_CASE("exponential_prior") {
  CHECK(exponential_prior(0.0, 0.5) == 0.0);
  CHECK(exponential_prior(1.0, std::numbers::ln2) == doctest::Approx(0.5).epsilon(1e-15));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> area(0.01, 500), frac(0.0, 1.0), rate(1e-4, 0.1);
  for (int i = 0; i < 100; ++i) {
    const double a = area(rng), f = frac(rng), c = rate(rng);
    const double whole = 1.0 - exponential_prior(a, c);
    const double parts = (1.0 - exponential_prior(a * f, c)) * (1.0 - exponential_prior(a * (1 - f), c));
    CHECK(std::abs(whole - parts) <= 1e-12);
  }
  CHECK_THROWS_AS(exponential_prior(-1.0, 0.1), ModelError);
}

TEST_CASE("region dump format") {
  Grid g{100, 100, 1.0};
  const std::vector<SonarReading> rs = {reading_at(4, {50, 10}, 90, 50)};
  PriorParams prior{0.3, 0.4, 0.1, 0.1};
  const RegionPartition p = build_partition(g, rs, kSensor, prior, {});
  // The arc spans 3 units around r = 50 across a 25 degree cone.
  const Region& arc = *find_label(p, "A4");
  const std::string expected = "1 A4 " + std::to_string(arc.cells.size()) + " " +
                               std::to_string(arc.cells.size()) + " 0.400000\n";
  CHECK(p.dump().find(expected) != std::string::npos);
  CHECK(p.dump().rfind("0 S4 ", 0) == 0);
}

TEST_CASE("area uses physical units") {
  Grid g{50, 50, 2.0};
  const std::vector<SonarReading> rs = {reading_at(0, {50, 10}, 90, 50)};
  const RegionPartition p = build_partition(g, rs, kSensor, kPrior, {});
  for (const Region& r : p.regions()) {
    CHECK(r.area == doctest::Approx(4.0 * r.cells.size()));
  }
}
