#include <cmath>
#include <vector>

#include "doctest.h"
#include "metsky/dataset.hpp"
#include "metsky/metric.hpp"
#include "metsky/rng.hpp"

using namespace metsky;

namespace {

MetricObject vec(ObjectId id, std::vector<double> v) {
  return MetricObject{id, std::move(v)};
}

// Plain-double reference: directed max-min both ways, no early break, no
// squared-compare trick. The production version must match it bit for bit.
double hausdorff_reference(const MetricObject& a, const MetricObject& b) {
  auto directed = [](const MetricObject& x, const MetricObject& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.vertex_count(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < y.vertex_count(); ++j) {
        const double dx = x.values[2 * i] - y.values[2 * j];
        const double dy = x.values[2 * i + 1] - y.values[2 * j + 1];
        const double d = std::sqrt(dx * dx + dy * dy);
        best = std::min(best, d);
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace

TEST_CASE("l2 distance on a worked example") {
  DistanceCounter c;
  CHECK(l2_distance(vec(0, {1, 2, 3}).values, vec(1, {4, 6, 3}).values, c) == 5.0);
  CHECK(c.count == 1);
}

TEST_CASE("l2 distance of an object to itself is zero") {
  DistanceCounter c;
  Dataset ds = generate_vectors(50, 6, 3, 0.1, 11);
  for (const auto& o : ds.objects) CHECK(l2_distance(o.values, o.values, c) == 0.0);
}

TEST_CASE("l2 rejects dimension mismatch") {
  DistanceCounter c;
  CHECK_THROWS(l2_distance(vec(0, {1, 2}).values, vec(1, {1, 2, 3}).values, c));
}

TEST_CASE("hausdorff distance on a worked example") {
  // Two vertical five-point clouds, the second shifted by (1, 0); each
  // vertex's nearest counterpart is its translate, so the distance is 1.
  std::vector<double> a, b;
  for (int i = 0; i < 5; ++i) {
    a.push_back(0.0);
    a.push_back(0.2 * i);
    b.push_back(1.0);
    b.push_back(0.2 * i);
  }
  DistanceCounter c;
  CHECK(hausdorff_distance(a, b, c) == 1.0);
  CHECK(c.count == 1);
}

TEST_CASE("hausdorff is asymmetric in its directed parts but symmetric overall") {
  // b contains a plus one far vertex: directed(a -> b) = 0 but the overall
  // distance is the far vertex's gap.
  MetricObject a = vec(0, {0, 0, 0.1, 0});
  MetricObject b = vec(1, {0, 0, 0.1, 0, 0.1, 0.5});
  DistanceCounter c;
  const double d = hausdorff_distance(a.values, b.values, c);
  CHECK(d == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hausdorff_distance(b.values, a.values, c) == d);
}

TEST_CASE("hausdorff matches the plain reference implementation bit for bit") {
  Dataset ds = generate_polygons(120, 17);
  Rng rng(18);
  DistanceCounter c;
  for (int t = 0; t < 400; ++t) {
    const auto& a = ds.objects[rng.next_below(ds.objects.size())];
    const auto& b = ds.objects[rng.next_below(ds.objects.size())];
    CHECK(hausdorff_distance(a.values, b.values, c) == hausdorff_reference(a, b));
  }
}

TEST_CASE("hausdorff rejects empty and malformed vertex lists") {
  DistanceCounter c;
  CHECK_THROWS(hausdorff_distance(std::vector<double>{}, std::vector<double>{0, 0}, c));
  CHECK_THROWS(hausdorff_distance(std::vector<double>{0, 0, 1}, std::vector<double>{0, 0}, c));
}

TEST_CASE("metric axioms hold for both object kinds") {
  struct Case {
    Dataset ds;
    Metric metric;
  };
  std::vector<Case> cases;
  cases.push_back({generate_vectors(80, 8, 4, 0.2, 31), {}});
  cases.push_back({generate_polygons(80, 32), {}});
  for (auto& cs : cases) cs.metric = cs.ds.metric();

  for (const auto& cs : cases) {
    Rng rng(77);
    DistanceCounter c;
    for (int t = 0; t < 2000; ++t) {
      const auto& a = cs.ds.objects[rng.next_below(cs.ds.objects.size())];
      const auto& b = cs.ds.objects[rng.next_below(cs.ds.objects.size())];
      const auto& d = cs.ds.objects[rng.next_below(cs.ds.objects.size())];
      const double ab = cs.metric(a, b, c);
      const double ba = cs.metric(b, a, c);
      const double ad = cs.metric(a, d, c);
      const double db = cs.metric(d, b, c);
      CHECK(ab >= 0.0);
      CHECK(ab == ba);                    // symmetry, exact
      CHECK(ab <= ad + db + 1e-9);        // triangle
      CHECK(cs.metric(a, a, c) == 0.0);   // identity
    }
  }
}

TEST_CASE("metric validate rejects foreign objects") {
  Metric vm(ObjectKind::Vector, 4);
  CHECK_NOTHROW(vm.validate(vec(0, {1, 2, 3, 4})));
  CHECK_THROWS(vm.validate(vec(0, {1, 2, 3})));
  Metric pm(ObjectKind::Polygon, 0);
  CHECK_NOTHROW(pm.validate(vec(0, {0, 0, 1, 1, 0.5, 0.2, 0.1, 0.6, 0.9, 0.9})));
  CHECK_THROWS(pm.validate(vec(0, {0, 0, 1})));  // odd value count
  CHECK_THROWS(pm.validate(vec(0, {})));
}

TEST_CASE("distance counter sums every call") {
  Dataset ds = generate_vectors(10, 4, 2, 0.1, 5);
  Metric m = ds.metric();
  DistanceCounter c;
  for (int i = 0; i < 10; ++i) m(ds.objects[0], ds.objects[i], c);
  CHECK(c.count == 10);
}
