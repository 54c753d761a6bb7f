#include <sstream>

#include "doctest.h"
#include "metsky/bench.hpp"
#include "metsky/skyline.hpp"

using namespace metsky;

namespace {

BenchConfig small_config() {
  BenchConfig c;
  c.dbSize = 300;
  c.capacity = 8;
  c.pivots = 12;
  c.queryCount = 4;
  c.examples = 2;
  c.seed = 7;
  return c;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("sweep axis names round-trip") {
  for (SweepAxis a : {SweepAxis::Pivots, SweepAxis::NodeSize, SweepAxis::DbSize,
                      SweepAxis::MExamples, SweepAxis::PartialK}) {
    CHECK(parse_sweep_axis(to_string(a)) == a);
    CHECK_FALSE(default_sweep_values(a).empty());
  }
  CHECK_FALSE(parse_sweep_axis("bogus").has_value());
}

TEST_CASE("workloads extend the database's generator stream") {
  BenchWorkload w = make_workload(ObjectKind::Vector, 200, 5, 3, 0.1, 4, 2, 9);
  Dataset direct = generate_vectors(200, 5, 3, 0.1, 9);
  REQUIRE(w.db.objects.size() == 200);
  for (std::size_t i = 0; i < 200; ++i)
    CHECK(w.db.objects[i].values == direct.objects[i].values);  // bit-identical
  REQUIRE(w.querySets.size() == 4);
  for (const auto& qs : w.querySets) CHECK(qs.size() == 2);
  // the query tail is exactly the continuation of the longer stream
  Dataset longer = generate_vectors(208, 5, 3, 0.1, 9);
  CHECK(w.querySets[0][0].values == longer.objects[200].values);
  CHECK(w.querySets[3][1].values == longer.objects[207].values);

  BenchWorkload pw = make_workload(ObjectKind::Polygon, 50, 0, 0, 0, 3, 2, 11);
  Dataset pdirect = generate_polygons(50, 11);
  for (std::size_t i = 0; i < 50; ++i)
    CHECK(pw.db.objects[i].values == pdirect.objects[i].values);
}

TEST_CASE("benchmark runs are deterministic and fully populated") {
  BenchConfig c = small_config();
  c.axis = SweepAxis::Pivots;
  c.sweepValues = {4, 8};
  const std::string a = run_bench(c);
  const std::string b = run_bench(c);
  CHECK(a == b);

  auto ls = lines(a);
  REQUIRE(ls.size() == 1 + c.sweepValues.size() * c.variants.size());
  CHECK(ls[0] ==
        "sweep,value,variant,avg_distance_computations,avg_heap_ops,"
        "avg_max_heap_size,avg_node_reads,avg_skyline_size,"
        "avg_dc_fraction_before_first,avg_heap_fraction_before_first,"
        "seq_scan_baseline");
  // spot-check one row's shape: 11 comma-separated fields, sane numbers
  std::istringstream row(ls[1]);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(row, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() == 11);
  CHECK(fields[0] == "pivots");
  CHECK(fields[1] == "4");
  CHECK(fields[2] == "mtree");
  CHECK(std::stod(fields[3]) > 0.0);
  CHECK(fields[10] == std::to_string(2 * 300));
}

TEST_CASE("each sweep axis actually varies its knob") {
  for (SweepAxis axis : {SweepAxis::Pivots, SweepAxis::NodeSize,
                         SweepAxis::DbSize, SweepAxis::MExamples,
                         SweepAxis::PartialK}) {
    BenchConfig c = small_config();
    c.variants = {MsqVariant::PMTreePsf};
    c.axis = axis;
    switch (axis) {
      case SweepAxis::Pivots: c.sweepValues = {4, 16}; break;
      case SweepAxis::NodeSize: c.sweepValues = {5, 20}; break;
      case SweepAxis::DbSize: c.sweepValues = {150, 500}; break;
      case SweepAxis::MExamples: c.sweepValues = {1, 3}; break;
      case SweepAxis::PartialK: c.sweepValues = {1, 1000}; break;
    }
    auto ls = lines(run_bench(c));
    REQUIRE(ls.size() == 3);
    CHECK(ls[1] != ls[2]);  // the axis made it into the measurements
    CHECK(ls[1].substr(0, ls[1].find(',')) == to_string(axis));
  }
}

TEST_CASE("verification accepts the implementation it ships with") {
  BenchConfig c = small_config();
  std::string report;
  CHECK(run_verify(c, &report) == 0);
  CHECK(report.empty());

  BenchConfig poly = small_config();
  poly.kind = ObjectKind::Polygon;
  poly.dbSize = 150;
  CHECK(run_verify(poly) == 0);
}
