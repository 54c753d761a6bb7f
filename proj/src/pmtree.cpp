#include "metsky/pmtree.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "metsky/rng.hpp"

namespace metsky {

PivotSet select_pivots(const Dataset& ds, std::uint32_t p,
                       std::uint32_t hrCount, std::uint32_t pdCount,
                       std::uint64_t seed, DistanceCounter& counter) {
  PivotSet ps;
  if (p == 0) return ps;
  const std::size_t n = ds.size();
  if (p > n)
    throw std::invalid_argument("select_pivots: more pivots than objects");
  if (hrCount > p || pdCount > p)
    throw std::invalid_argument("select_pivots: ring counts exceed pivot count");
  const Metric metric = ds.metric();
  Rng rng(seed);

  const std::size_t first = static_cast<std::size_t>(rng.next_below(n));

  // Fixed candidate sample of distinct indices (partial Fisher-Yates).
  const std::size_t sampleSize =
      std::min<std::size_t>(n, static_cast<std::size_t>(50) * p);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < sampleSize; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(sampleSize);

  std::vector<std::size_t> chosen{first};
  std::vector<bool> taken(n, false);
  taken[first] = true;
  std::vector<double> minDist(sampleSize);
  for (std::size_t c = 0; c < sampleSize; ++c)
    minDist[c] = metric(ds.objects[idx[c]], ds.objects[first], counter);

  while (chosen.size() < p) {
    double bestVal = -1.0;
    std::size_t bestCand = sampleSize;
    for (std::size_t c = 0; c < sampleSize; ++c) {
      if (taken[idx[c]]) continue;
      if (minDist[c] > bestVal ||
          (minDist[c] == bestVal && idx[c] < idx[bestCand]))
        bestVal = minDist[c], bestCand = c;
    }
    if (bestCand == sampleSize)
      throw std::logic_error("select_pivots: candidate sample exhausted");
    const std::size_t next = idx[bestCand];
    taken[next] = true;
    chosen.push_back(next);
    for (std::size_t c = 0; c < sampleSize; ++c) {
      if (taken[idx[c]]) continue;
      const double d = metric(ds.objects[idx[c]], ds.objects[next], counter);
      if (d < minDist[c]) minDist[c] = d;
    }
  }

  ps.pivots.reserve(p);
  for (std::size_t id : chosen) ps.pivots.push_back(ds.objects[id]);
  ps.hrCount = hrCount;
  ps.pdCount = pdCount;
  return ps;
}

MetricTree build_pm(const Dataset& ds, std::uint32_t capacity, std::uint32_t p,
                    double innerPivotFraction, std::uint64_t seed) {
  if (innerPivotFraction < 0.0 || innerPivotFraction > 1.0)
    throw std::invalid_argument("build_pm: innerPivotFraction must be in [0, 1]");
  const std::uint32_t hr =
      static_cast<std::uint32_t>(std::ceil(innerPivotFraction * p));
  DistanceCounter selection;
  PivotSet ps = select_pivots(ds, p, std::min(hr, p), p, seed, selection);
  return MetricTree::build(ds, capacity, std::move(ps), selection.count);
}

bool pivot_intervals_prune(std::span<const double> hrMin,
                           std::span<const double> hrMax,
                           std::span<const double> queryPivotDistances,
                           double radius) {
  for (std::size_t t = 0; t < hrMin.size(); ++t) {
    if (queryPivotDistances[t] + radius < hrMin[t] ||
        queryPivotDistances[t] - radius > hrMax[t])
      return true;
  }
  return false;
}

bool pivot_distances_prune(std::span<const double> pd,
                           std::span<const double> queryPivotDistances,
                           double radius) {
  for (std::size_t t = 0; t < pd.size(); ++t) {
    if (std::abs(queryPivotDistances[t] - pd[t]) > radius) return true;
  }
  return false;
}

}  // namespace metsky
