#pragma once

#include <span>
#include <vector>

#include "metsky/dataset.hpp"
#include "metsky/metric.hpp"

namespace metsky {

// A database object mapped into query space: coordinate i is the distance
// to query example i.
using QPoint = std::vector<double>;

struct IdPoint {
  ObjectId id = 0;
  QPoint v;
};

// Axis-aligned box of distance lower/upper bounds in query space.
struct Mddr {
  std::vector<double> lb;
  std::vector<double> ub;

  std::size_t dims() const { return lb.size(); }
  static Mddr point(const QPoint& p) { return Mddr{p, p}; }
  bool contains(const QPoint& p, double tol = 0.0) const;
};

// Strict Pareto dominance: a <= b everywhere and a < b somewhere.
bool dominates(const QPoint& a, const QPoint& b);

// p dominates every point that could lie in r: p <= r.lb everywhere with one
// coordinate strictly below. Given the pointwise comparison this coincides
// with the L1 corner rule (sum p_i < sum lb_i); callers holding a cached
// l1_min_corner key can use l1_norm(p) >= key as a cheap "cannot dominate"
// pre-check.
bool mddr_dominated_by(const QPoint& p, const Mddr& r);

double l1_norm(const QPoint& p);
double l1_min_corner(const Mddr& r);

// Per-dimension [max lb, min ub]. Roundoff inversions are clamped to the
// lower bound with a diagnostic on stderr (sound boxes over one object set
// cannot truly be disjoint).
Mddr intersect(const Mddr& a, const Mddr& b);

// Exact skyline by the sort-first scan: order by (L1 norm, coordinates
// lexicographically, id), then keep each point no earlier kept point
// dominates. Returned in that order.
std::vector<IdPoint> sort_first_skyline(std::vector<IdPoint> points);

// Distances from one object to each query example; charges exactly
// queries.size() distance computations.
QPoint query_point(const MetricObject& obj,
                   std::span<const MetricObject> queries, const Metric& metric,
                   DistanceCounter& counter);

// Sequential-scan oracle: maps every object to its QPoint (n*m distance
// computations) and runs the O(n^2) pairwise dominance test. Returns sorted
// external ids.
std::vector<ObjectId> brute_force_metric_skyline(
    const Dataset& ds, std::span<const MetricObject> queries,
    DistanceCounter& counter);

}  // namespace metsky
