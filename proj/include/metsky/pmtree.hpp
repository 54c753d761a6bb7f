#pragma once

#include <span>

#include "metsky/mtree.hpp"

namespace metsky {

// Greedy max-min pivot selection: the first pivot is uniform over the
// database; each next pivot is the member of a fixed random candidate sample
// (size min(n, 50*p), drawn once) maximizing its minimum distance to the
// pivots chosen so far, ties by smaller id. p == n returns every object.
// Distance evaluations are charged to `counter`.
PivotSet select_pivots(const Dataset& ds, std::uint32_t p,
                       std::uint32_t hrCount, std::uint32_t pdCount,
                       std::uint64_t seed, DistanceCounter& counter);

// Convenience wrapper: select pivots, then run the shared tree builder.
// The insertion/split path is byte-for-byte the one MetricTree::build uses,
// so topology depends only on (dataset, capacity).
MetricTree build_pm(const Dataset& ds, std::uint32_t capacity, std::uint32_t p,
                    double innerPivotFraction, std::uint64_t seed);

// L-infinity interval filters in pivot space. queryPivotDistances[t] is
// delta(Q, P_t); prune when some ring makes any object within `radius` of Q
// impossible. Zero distance computations.
bool pivot_intervals_prune(std::span<const double> hrMin,
                           std::span<const double> hrMax,
                           std::span<const double> queryPivotDistances,
                           double radius);
bool pivot_distances_prune(std::span<const double> pd,
                           std::span<const double> queryPivotDistances,
                           double radius);

}  // namespace metsky
