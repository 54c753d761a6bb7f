#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "metsky/mtree.hpp"
#include "metsky/skyline.hpp"

namespace metsky {

// Index traversal strategies for the metric skyline query. All four return
// the identical, exact skyline; they differ only in pruning machinery and
// therefore cost.
enum class MsqVariant {
  MTree,         // parent + basic distance boxes only (pivot data ignored)
  PMTree,        // + pivot-ring boxes
  PMTreePsf,     // + pivot-skyline filtering
  PMTreePsfDef,  // + deferred basic-box computation
};

const char* to_string(MsqVariant v);
std::optional<MsqVariant> parse_variant(const std::string& name);

// delta(P_j, Q_i) for every pivot j and query example i; costs p*m distance
// computations, charged once at query start.
struct QueryToPivotMatrix {
  std::size_t pivotCount = 0;
  std::size_t exampleCount = 0;
  std::vector<double> d;  // row-major, pivot j at row j

  double at(std::size_t pivot, std::size_t example) const {
    return d[pivot * exampleCount + example];
  }
};

QueryToPivotMatrix compute_q2p(const PivotSet& pivots,
                               std::span<const MetricObject> queries,
                               const Metric& metric, DistanceCounter& counter);

// Distance box for an entry R under parent P, from stored data only (zero
// distance computations): per example i with t = delta(P, R), r = covering
// radius (0 for ground entries),
//   lb_i = max(dQP_i - (t + r), (t - r) - dQP_i, 0),  ub_i = dQP_i + t + r.
Mddr par_mddr(const QPoint& parentQueryDistances, double toParentDistance,
              double coveringRadius);

// Distance box from fresh center-to-example distances (the m computations
// are charged where entryQueryDistances is produced, see query_point):
//   lb_i = max(dRQ_i - r, 0),  ub_i = dRQ_i + r.
Mddr b_mddr(const QPoint& entryQueryDistances, double coveringRadius);

// Distance box in pivot space (zero distance computations): routing entries
// use their min/max rings, ground entries their exact pivot distances.
Mddr piv_mddr(std::span<const double> hrMin, std::span<const double> hrMax,
              const QueryToPivotMatrix& q2p);
Mddr piv_mddr_point(std::span<const double> pd, const QueryToPivotMatrix& q2p);

// Skyline of the pivots' QPoints, read straight off the matrix columns.
std::vector<IdPoint> compute_pivot_skyline(const PivotSet& pivots,
                                           const QueryToPivotMatrix& q2p);

// Test hooks; null members are skipped.
struct MsqObserver {
  std::function<void(double key)> onPop;
  std::function<void(ObjectId id, const QPoint& point)> onEmit;
};

struct SkylineRecord {
  ObjectId id = 0;
  QPoint point;
  QueryStats statsAtEmission;  // cumulative snapshot when this object surfaced
};

struct MsqResult {
  std::vector<SkylineRecord> skyline;  // emission order (non-decreasing L1)
  QueryStats stats;
  bool stoppedAtLimit = false;
};

// Best-first metric skyline over the tree. Emits the exact skyline of the
// database under the given query examples; with `limit`, stops as soon as
// that many objects have been emitted (the output is a prefix of the
// unlimited run and every counter is <= the unlimited run's).
MsqResult msq(const MetricTree& tree, std::span<const MetricObject> queries,
              MsqVariant variant, std::optional<std::size_t> limit = {},
              const MsqObserver* observer = nullptr);

// Fractions of the total cost spent before the first skyline object
// surfaced (expansion phase) — distance computations and heap operations
// (pushes + pops + removals).
struct PhaseProfile {
  double distanceFraction = 0.0;
  double heapOpFraction = 0.0;
};

PhaseProfile phase_profile(const QueryStats& stats);

}  // namespace metsky
