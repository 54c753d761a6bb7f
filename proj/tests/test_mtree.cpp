#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "metsky/mtree.hpp"
#include "metsky/rng.hpp"

using namespace metsky;

namespace {

double dist(const Metric& m, const MetricObject& a, const MetricObject& b) {
  DistanceCounter c;
  return m(a, b, c);
}

// Collect every object reachable from a subtree root.
void collect_objects(const MetricTree& t, PageId page,
                     std::vector<const MetricObject*>& out) {
  const Node& n = t.node(page);
  if (n.leaf) {
    for (const auto& ge : n.ground) out.push_back(&ge.object);
  } else {
    for (const auto& re : n.routing) collect_objects(t, re.child, out);
  }
}

int leaf_depth(const MetricTree& t, PageId page, int depth,
               std::vector<int>& depths) {
  const Node& n = t.node(page);
  if (n.leaf) {
    depths.push_back(depth);
    return depth;
  }
  for (const auto& re : n.routing) leaf_depth(t, re.child, depth + 1, depths);
  return depth;
}

// Full structural audit of one tree: utilization, balance, covering radii,
// parent distances, object partition.
void audit_tree(const MetricTree& t, const Dataset& ds) {
  const Metric& metric = t.metric();
  const std::uint32_t minUtil =
      (t.capacity() + 4) / 5;  // ceil(capacity / 5), >= 1

  std::vector<int> depths;
  leaf_depth(t, t.root_page(), 0, depths);
  REQUIRE(!depths.empty());
  CHECK(*std::min_element(depths.begin(), depths.end()) ==
        *std::max_element(depths.begin(), depths.end()));

  std::set<ObjectId> seen;
  std::vector<std::pair<PageId, bool>> stack = {{t.root_page(), true}};
  while (!stack.empty()) {
    auto [page, isRoot] = stack.back();
    stack.pop_back();
    const Node& n = t.node(page);
    CHECK(n.entry_count() <= t.capacity());
    if (!isRoot && ds.objects.size() > 1) CHECK(n.entry_count() >= minUtil);
    if (n.leaf) {
      for (const auto& ge : n.ground) CHECK(seen.insert(ge.object.id).second);
      continue;
    }
    // a root split creates exactly two entries, and the root only grows
    if (isRoot) CHECK(n.routing.size() >= 2);
    for (const auto& re : n.routing) {
      stack.push_back({re.child, false});
      std::vector<const MetricObject*> subtree;
      collect_objects(t, re.child, subtree);
      CHECK(!subtree.empty());
      for (const auto* o : subtree)
        CHECK(dist(metric, re.center, *o) <= re.coveringRadius + 1e-12);
      // child node's own entries reference this center as parent
      const Node& child = t.node(re.child);
      if (child.leaf) {
        for (const auto& ge : child.ground)
          CHECK(ge.toParentDistance ==
                doctest::Approx(dist(metric, re.center, ge.object)).epsilon(1e-12));
      } else {
        for (const auto& cre : child.routing)
          CHECK(cre.toParentDistance ==
                doctest::Approx(dist(metric, re.center, cre.center)).epsilon(1e-12));
      }
    }
  }
  CHECK(seen.size() == ds.objects.size());
  for (const auto& o : ds.objects) CHECK(seen.count(o.id) == 1);
}

std::vector<ObjectId> scan_range(const Dataset& ds, const Metric& metric,
                                 const MetricObject& q, double radius) {
  std::vector<ObjectId> ids;
  for (const auto& o : ds.objects) {
    DistanceCounter c;
    if (metric(o, q, c) <= radius) ids.push_back(o.id);
  }
  return ids;
}

std::vector<KnnNeighbor> scan_knn(const Dataset& ds, const Metric& metric,
                                  const MetricObject& q, std::size_t k) {
  std::vector<KnnNeighbor> all;
  for (const auto& o : ds.objects) {
    DistanceCounter c;
    all.push_back({o.id, metric(o, q, c)});
  }
  std::sort(all.begin(), all.end(), [](const KnnNeighbor& a, const KnnNeighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("build rejects tiny capacities and misnumbered ids") {
  Dataset ds = generate_vectors(10, 3, 2, 0.1, 1);
  CHECK_THROWS(MetricTree::build(ds, 3));
  ds.objects[4].id = 99;
  CHECK_THROWS(MetricTree::build(ds, 8));
}

TEST_CASE("structural invariants hold across kinds, sizes and capacities") {
  Rng rng(7);
  for (int t = 0; t < 14; ++t) {
    const std::size_t n = 1 + rng.next_below(900);
    const std::uint32_t capacity = 4 + static_cast<std::uint32_t>(rng.next_below(29));
    const bool poly = t % 3 == 2;
    Dataset ds = poly ? generate_polygons(n, 100 + t)
                      : generate_vectors(n, 2 + rng.next_below(9),
                                         1 + rng.next_below(6), 0.1, 100 + t);
    CAPTURE(n);
    CAPTURE(capacity);
    MetricTree tree = MetricTree::build(ds, capacity);
    CHECK(tree.object_count() == n);
    audit_tree(tree, ds);
  }
}

TEST_CASE("range query equals the linear scan") {
  Rng rng(8);
  for (int t = 0; t < 6; ++t) {
    const bool poly = t % 2 == 1;
    Dataset ds = poly ? generate_polygons(700, 200 + t)
                      : generate_vectors(700, 6, 5, 0.1, 200 + t);
    Dataset qs = poly ? generate_polygons(40, 900 + t)
                      : generate_vectors(40, 6, 5, 0.3, 900 + t);
    Metric metric = ds.metric();
    MetricTree tree = MetricTree::build(ds, 4 + rng.next_below(20));
    for (const auto& q : qs.objects) {
      // radius anchored at a random member distance => nonempty, nontrivial
      const double anchor =
          dist(metric, q, ds.objects[rng.next_below(ds.objects.size())]);
      for (double radius : {0.0, anchor * 0.5, anchor, anchor * 1.2}) {
        RangeResult r = tree.range_query(q, radius);
        CHECK(r.ids == scan_range(ds, metric, q, radius));
        CHECK(std::is_sorted(r.ids.begin(), r.ids.end()));
      }
    }
  }
}

TEST_CASE("every range prune is justified: no in-radius object is discarded") {
  Dataset ds = generate_vectors(400, 5, 4, 0.12, 33);
  Metric metric = ds.metric();
  MetricTree tree = MetricTree::build(ds, 10);
  Dataset qs = generate_vectors(15, 5, 4, 0.3, 34);
  std::uint64_t prunes = 0;
  for (const auto& q : qs.objects) {
    const double radius = 0.25;
    RangeAudit audit;
    audit.onRoutingPruned = [&](RangeAudit::Filter, const RoutingEntry& re) {
      ++prunes;
      std::vector<const MetricObject*> subtree;
      collect_objects(tree, re.child, subtree);
      for (const auto* o : subtree) CHECK(dist(metric, q, *o) > radius);
    };
    audit.onGroundPruned = [&](RangeAudit::Filter, const GroundEntry& ge) {
      ++prunes;
      CHECK(dist(metric, q, ge.object) > radius);
    };
    RangeResult r = tree.range_query(q, radius, &audit);
    CHECK(r.ids == scan_range(ds, metric, q, radius));
  }
  CHECK(prunes > 0);  // the audit exercised real pruning decisions
}

TEST_CASE("knn equals the linear scan incl. duplicate-distance ties") {
  Rng rng(9);
  Dataset ds = generate_vectors(500, 4, 3, 0.08, 44);
  // force exact ties: clone some objects under fresh ids
  for (int i = 0; i < 50; ++i) {
    MetricObject copy = ds.objects[rng.next_below(500)];
    copy.id = ds.objects.size();
    ds.objects.push_back(std::move(copy));
  }
  Metric metric = ds.metric();
  MetricTree tree = MetricTree::build(ds, 12);
  Dataset qs = generate_vectors(25, 4, 3, 0.2, 45);
  for (const auto& q : qs.objects) {
    for (std::size_t k : {1ul, 2ul, 7ul, 100ul}) {
      KnnResult r = tree.knn_query(q, k);
      auto want = scan_knn(ds, metric, q, k);
      REQUIRE(r.neighbors.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(r.neighbors[i].id == want[i].id);
        CHECK(r.neighbors[i].distance == want[i].distance);
      }
      CHECK_FALSE(r.truncated);
    }
  }
}

TEST_CASE("knn beyond the database size returns everything, flagged") {
  Dataset ds = generate_vectors(37, 3, 2, 0.1, 50);
  MetricTree tree = MetricTree::build(ds, 6);
  KnnResult r = tree.knn_query(ds.objects[0], 100);
  CHECK(r.neighbors.size() == 37);
  CHECK(r.truncated);
  CHECK(r.neighbors[0].id == 0);  // the query is a member, distance 0
  CHECK(r.neighbors[0].distance == 0.0);
  CHECK(tree.knn_query(ds.objects[0], 0).neighbors.empty());
}

TEST_CASE("degenerate databases: empty, singleton, all-identical") {
  Dataset empty;
  empty.kind = ObjectKind::Vector;
  empty.dimension = 3;
  MetricTree te = MetricTree::build(empty, 5);
  MetricObject q{0, {0.1, 0.2, 0.3}};
  CHECK(te.range_query(q, 10).ids.empty());
  CHECK(te.knn_query(q, 3).neighbors.empty());

  Dataset one = generate_vectors(1, 3, 1, 0.1, 51);
  MetricTree t1 = MetricTree::build(one, 5);
  CHECK(t1.range_query(one.objects[0], 0.0).ids ==
        std::vector<ObjectId>{0});

  Dataset same;
  same.kind = ObjectKind::Vector;
  same.dimension = 2;
  for (ObjectId i = 0; i < 60; ++i) same.objects.push_back({i, {0.5, 0.5}});
  MetricTree ts = MetricTree::build(same, 5);
  RangeResult all = ts.range_query({0, {0.5, 0.5}}, 0.0);
  CHECK(all.ids.size() == 60);
  KnnResult k5 = ts.knn_query({0, {0.25, 0.5}}, 5);
  REQUIRE(k5.neighbors.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(k5.neighbors[i].id == i);  // id ties
}

TEST_CASE("node reads are counted per fetch with no caching") {
  Dataset ds = generate_vectors(50, 3, 2, 0.1, 52);
  MetricTree tree = MetricTree::build(ds, 5);
  QueryStats st;
  tree.fetch_node(tree.root_page(), st);
  tree.fetch_node(tree.root_page(), st);
  CHECK(st.nodeReads == 2);
  RangeResult r = tree.range_query(ds.objects[0], 0.05);
  CHECK(r.stats.nodeReads >= 1);
}

TEST_CASE("index files round-trip structurally and behaviorally") {
  for (int poly = 0; poly < 2; ++poly) {
    Dataset ds = poly ? generate_polygons(350, 60) : generate_vectors(350, 7, 4, 0.1, 60);
    MetricTree tree = MetricTree::build(ds, 9);
    const auto path = temp_file("metsky_tree_roundtrip.idx");
    tree.save(path);
    MetricTree back = MetricTree::load(path);

    CHECK(back.node_count() == tree.node_count());
    CHECK(back.root_page() == tree.root_page());
    CHECK(back.capacity() == tree.capacity());
    CHECK(back.object_count() == tree.object_count());
    CHECK(back.metric().kind() == tree.metric().kind());
    CHECK(back.metric().dimension() == tree.metric().dimension());
    for (PageId p = 0; p < tree.node_count(); ++p) {
      const Node& a = tree.node(p);
      const Node& b = back.node(p);
      REQUIRE(a.leaf == b.leaf);
      REQUIRE(a.entry_count() == b.entry_count());
      for (std::size_t i = 0; i < a.routing.size(); ++i) {
        CHECK(a.routing[i].center.id == b.routing[i].center.id);
        CHECK(a.routing[i].center.values == b.routing[i].center.values);
        CHECK(a.routing[i].coveringRadius == b.routing[i].coveringRadius);
        CHECK(a.routing[i].toParentDistance == b.routing[i].toParentDistance);
        CHECK(a.routing[i].child == b.routing[i].child);
        CHECK(a.routing[i].hrMin == b.routing[i].hrMin);
        CHECK(a.routing[i].hrMax == b.routing[i].hrMax);
      }
      for (std::size_t i = 0; i < a.ground.size(); ++i) {
        CHECK(a.ground[i].object.id == b.ground[i].object.id);
        CHECK(a.ground[i].object.values == b.ground[i].object.values);
        CHECK(a.ground[i].toParentDistance == b.ground[i].toParentDistance);
        CHECK(a.ground[i].pd == b.ground[i].pd);
      }
    }

    // identical query behavior, counters included
    Dataset qs = poly ? generate_polygons(10, 61) : generate_vectors(10, 7, 4, 0.3, 61);
    for (const auto& q : qs.objects) {
      RangeResult r1 = tree.range_query(q, 0.3);
      RangeResult r2 = back.range_query(q, 0.3);
      CHECK(r1.ids == r2.ids);
      CHECK(r1.stats.distanceComputations == r2.stats.distanceComputations);
      CHECK(r1.stats.nodeReads == r2.stats.nodeReads);
      KnnResult k1 = tree.knn_query(q, 9);
      KnnResult k2 = back.knn_query(q, 9);
      REQUIRE(k1.neighbors.size() == k2.neighbors.size());
      for (std::size_t i = 0; i < k1.neighbors.size(); ++i) {
        CHECK(k1.neighbors[i].id == k2.neighbors[i].id);
        CHECK(k1.neighbors[i].distance == k2.neighbors[i].distance);
      }
    }
    std::filesystem::remove(path);
  }
}

TEST_CASE("corrupt index files are rejected with clear errors") {
  Dataset ds = generate_vectors(80, 4, 2, 0.1, 70);
  MetricTree tree = MetricTree::build(ds, 6);
  const auto path = temp_file("metsky_tree_corrupt.idx");
  tree.save(path);

  // truncation
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size / 2);
  CHECK_THROWS_WITH_AS(MetricTree::load(path), doctest::Contains("truncated"),
                       std::runtime_error);

  // bad magic
  tree.save(path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("GARBAGE!", 8);
  }
  CHECK_THROWS(MetricTree::load(path));

  CHECK_THROWS(MetricTree::load(temp_file("metsky_no_such_file.idx")));
  std::filesystem::remove(path);
}
