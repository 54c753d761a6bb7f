#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "metsky/dataset.hpp"
#include "metsky/metric.hpp"

namespace metsky {

using PageId = std::uint32_t;

// Per-query cost accounting. Every query operation starts from a zeroed
// instance; build costs live on the tree, not here.
struct QueryStats {
  std::uint64_t distanceComputations = 0;
  std::uint64_t heapPushes = 0;
  std::uint64_t heapPops = 0;
  std::uint64_t heapRemovals = 0;
  std::uint64_t maxHeapSize = 0;
  std::uint64_t nodeReads = 0;
  std::uint64_t distanceComputationsAtFirstSkyline = 0;
  std::uint64_t heapOpsAtFirstSkyline = 0;

  std::uint64_t heap_ops() const { return heapPushes + heapPops + heapRemovals; }
};

// Global pivots shared by the whole tree. Routing entries keep min/max rings
// over the first hrCount pivots; ground entries keep exact distances to the
// first pdCount pivots (selection order). Empty set = plain metric tree.
struct PivotSet {
  std::vector<MetricObject> pivots;
  std::uint32_t hrCount = 0;
  std::uint32_t pdCount = 0;

  std::size_t count() const { return pivots.size(); }
  bool empty() const { return pivots.empty(); }
};

struct RoutingEntry {
  MetricObject center;
  double coveringRadius = 0.0;
  double toParentDistance = 0.0;  // 0 in the root node
  PageId child = 0;
  std::vector<double> hrMin;  // exact-tight per-pivot minimum over the subtree
  std::vector<double> hrMax;  // exact-tight per-pivot maximum over the subtree
};

struct GroundEntry {
  MetricObject object;
  double toParentDistance = 0.0;
  std::vector<double> pd;  // exact distances to the first pdCount pivots
};

struct Node {
  bool leaf = true;
  std::vector<RoutingEntry> routing;
  std::vector<GroundEntry> ground;

  std::size_t entry_count() const {
    return leaf ? ground.size() : routing.size();
  }
};

// Optional hooks letting tests re-verify every pruning decision a range
// query makes. Null members are skipped.
struct RangeAudit {
  enum class Filter { Pivot, Parent, Basic };
  std::function<void(Filter, const RoutingEntry&)> onRoutingPruned;
  std::function<void(Filter, const GroundEntry&)> onGroundPruned;
};

struct RangeResult {
  std::vector<ObjectId> ids;  // sorted
  QueryStats stats;
};

struct KnnNeighbor {
  ObjectId id = 0;
  double distance = 0.0;
};

struct KnnResult {
  std::vector<KnnNeighbor> neighbors;  // ascending (distance, id)
  bool truncated = false;              // k exceeded the database size
  QueryStats stats;
};

// Paged, height-balanced metric tree with covering-radius routing entries,
// built by single-path inserts. With a non-empty PivotSet the tree also
// maintains pivot rings and both queries gain the pivot-interval filter.
class MetricTree {
 public:
  // Inserts ds one object at a time. capacity is the max entries per node
  // (>= 4); non-root nodes keep at least ceil(0.2 * capacity) entries.
  // priorBuildDistances folds distance computations spent before insertion
  // (pivot selection) into build_distance_computations().
  static MetricTree build(const Dataset& ds, std::uint32_t capacity,
                          PivotSet pivots = {},
                          std::uint64_t priorBuildDistances = 0);

  // Exact range query: ids of all objects within radius of q.
  // Filter order per entry: pivot intervals, parent distance, basic.
  RangeResult range_query(const MetricObject& q, double radius,
                          const RangeAudit* audit = nullptr) const;

  // Exact k nearest neighbors, ties broken by smaller id. k > n returns all
  // n objects with truncated = true.
  KnnResult knn_query(const MetricObject& q, std::size_t k) const;

  // Counted node access: one logical read per call, no caching.
  const Node& fetch_node(PageId id, QueryStats& stats) const;
  // Uncounted access for audits and serialization.
  const Node& node(PageId id) const;

  PageId root_page() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t object_count() const { return objectCount_; }
  std::uint32_t capacity() const { return capacity_; }
  const Metric& metric() const { return metric_; }
  const PivotSet& pivot_set() const { return pivots_; }
  std::uint64_t build_distance_computations() const { return buildDistances_; }

  // Fixed-size page image; magic MTREE1 without pivots, PMTREE1 with.
  void save(const std::filesystem::path& path) const;
  static MetricTree load(const std::filesystem::path& path);

 private:
  friend class TreeBuilder;
  MetricTree() = default;

  Metric metric_;
  std::uint32_t capacity_ = 0;
  PageId root_ = 0;
  std::size_t objectCount_ = 0;
  std::uint64_t buildDistances_ = 0;
  PivotSet pivots_;
  std::vector<Node> nodes_;
};

}  // namespace metsky
