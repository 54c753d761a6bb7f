#include "metsky/msq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace metsky {

const char* to_string(MsqVariant v) {
  switch (v) {
    case MsqVariant::MTree: return "mtree";
    case MsqVariant::PMTree: return "pmtree";
    case MsqVariant::PMTreePsf: return "pmtree+psf";
    case MsqVariant::PMTreePsfDef: return "pmtree+psf+def";
  }
  return "?";
}

std::optional<MsqVariant> parse_variant(const std::string& name) {
  if (name == "mtree") return MsqVariant::MTree;
  if (name == "pmtree") return MsqVariant::PMTree;
  if (name == "pmtree+psf") return MsqVariant::PMTreePsf;
  if (name == "pmtree+psf+def") return MsqVariant::PMTreePsfDef;
  return std::nullopt;
}

QueryToPivotMatrix compute_q2p(const PivotSet& pivots,
                               std::span<const MetricObject> queries,
                               const Metric& metric, DistanceCounter& counter) {
  QueryToPivotMatrix m;
  m.pivotCount = pivots.count();
  m.exampleCount = queries.size();
  m.d.resize(m.pivotCount * m.exampleCount);
  for (std::size_t j = 0; j < m.pivotCount; ++j)
    for (std::size_t i = 0; i < m.exampleCount; ++i)
      m.d[j * m.exampleCount + i] = metric(queries[i], pivots.pivots[j], counter);
  return m;
}

Mddr par_mddr(const QPoint& parentQueryDistances, double toParentDistance,
              double coveringRadius) {
  const double out = toParentDistance + coveringRadius;
  const double in = toParentDistance - coveringRadius;
  Mddr box;
  box.lb.reserve(parentQueryDistances.size());
  box.ub.reserve(parentQueryDistances.size());
  for (double dq : parentQueryDistances) {
    box.lb.push_back(std::max({dq - out, in - dq, 0.0}));
    box.ub.push_back(dq + out);
  }
  return box;
}

Mddr b_mddr(const QPoint& entryQueryDistances, double coveringRadius) {
  Mddr box;
  box.lb.reserve(entryQueryDistances.size());
  box.ub.reserve(entryQueryDistances.size());
  for (double d : entryQueryDistances) {
    box.lb.push_back(std::max(d - coveringRadius, 0.0));
    box.ub.push_back(d + coveringRadius);
  }
  return box;
}

Mddr piv_mddr(std::span<const double> hrMin, std::span<const double> hrMax,
              const QueryToPivotMatrix& q2p) {
  const std::size_t m = q2p.exampleCount;
  Mddr box;
  box.lb.assign(m, 0.0);
  box.ub.assign(m, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < hrMin.size(); ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const double dq = q2p.at(j, i);
      box.lb[i] = std::max({box.lb[i], dq - hrMax[j], hrMin[j] - dq});
      box.ub[i] = std::min(box.ub[i], dq + hrMax[j]);
    }
  }
  return box;
}

Mddr piv_mddr_point(std::span<const double> pd, const QueryToPivotMatrix& q2p) {
  return piv_mddr(pd, pd, q2p);
}

std::vector<IdPoint> compute_pivot_skyline(const PivotSet& pivots,
                                           const QueryToPivotMatrix& q2p) {
  std::vector<IdPoint> pts;
  pts.reserve(pivots.count());
  for (std::size_t j = 0; j < pivots.count(); ++j) {
    IdPoint p;
    p.id = pivots.pivots[j].id;
    p.v.assign(q2p.d.begin() + j * q2p.exampleCount,
               q2p.d.begin() + (j + 1) * q2p.exampleCount);
    pts.push_back(std::move(p));
  }
  return sort_first_skyline(std::move(pts));
}

namespace {

constexpr std::uint8_t kEquipB = 0;
constexpr std::uint8_t kEquipPivPar = 1;

struct HeapItem {
  double key = 0.0;
  std::uint8_t equip = kEquipB;
  bool ground = false;
  std::uint64_t tieId = 0;  // object id for ground, child page for routing
  Mddr mddr;
  QPoint point;           // ground + B: the exact QPoint
  QPoint queryDistances;  // routing + B: delta(Q_i, center), reused by children
  const RoutingEntry* re = nullptr;  // deferred routing source
  const GroundEntry* ge = nullptr;   // deferred ground source
};

// Pop order: smallest (key, B-before-PIV_PAR, routing-before-ground, tieId).
// The tuple is unique per live item, so the pop sequence is total.
bool pops_later(const HeapItem& a, const HeapItem& b) {
  return std::tuple(a.key, a.equip, a.ground, a.tieId) >
         std::tuple(b.key, b.equip, b.ground, b.tieId);
}

}  // namespace

MsqResult msq(const MetricTree& tree, std::span<const MetricObject> queries,
              MsqVariant variant, std::optional<std::size_t> limit,
              const MsqObserver* observer) {
  if (queries.empty()) throw std::invalid_argument("msq: no query examples");
  const Metric& metric = tree.metric();
  for (const auto& q : queries) metric.validate(q);
  const bool usePivots = variant != MsqVariant::MTree;
  const bool usePsf =
      variant == MsqVariant::PMTreePsf || variant == MsqVariant::PMTreePsfDef;
  const bool useDef = variant == MsqVariant::PMTreePsfDef;
  if (usePivots && tree.pivot_set().empty())
    throw std::invalid_argument(
        "msq: variant requires a pivot-equipped index (got none)");
  if (limit && *limit == 0) throw std::invalid_argument("msq: limit must be >= 1");

  MsqResult res;
  QueryStats& st = res.stats;
  DistanceCounter dc;

  QueryToPivotMatrix q2p;
  std::vector<IdPoint> psl;
  std::vector<double> pslL1;
  if (usePivots) {
    q2p = compute_q2p(tree.pivot_set(), queries, metric, dc);
    if (usePsf) {
      psl = compute_pivot_skyline(tree.pivot_set(), q2p);
      pslL1.reserve(psl.size());
      for (const auto& p : psl) pslL1.push_back(l1_norm(p.v));
    }
  }

  std::vector<HeapItem> heap;
  auto push_item = [&](HeapItem&& it) {
    heap.push_back(std::move(it));
    std::push_heap(heap.begin(), heap.end(), pops_later);
    ++st.heapPushes;
    st.maxHeapSize = std::max<std::uint64_t>(st.maxHeapSize, heap.size());
  };

  std::vector<QPoint> mss;
  std::vector<double> mssL1;

  // Dominance filter against the skyline found so far (all variants) and
  // the pivot skyline (+PSF). The cached L1 keys give the cheap scalar
  // pre-check: a point with L1 >= the box's min-corner sum cannot dominate.
  auto filtered = [&](const Mddr& box) {
    const double corner = l1_min_corner(box);
    for (std::size_t s = 0; s < mss.size(); ++s)
      if (mssL1[s] < corner && mddr_dominated_by(mss[s], box)) return true;
    if (usePsf)
      for (std::size_t s = 0; s < psl.size(); ++s)
        if (pslL1[s] < corner && mddr_dominated_by(psl[s].v, box)) return true;
    return false;
  };

  // Root entries always carry a B box, intersected with the pivot box for
  // pivot-aware variants; no filtering happens before the first emission.
  {
    const Node& root = tree.fetch_node(tree.root_page(), st);
    if (root.leaf) {
      for (const auto& ge : root.ground) {
        HeapItem it;
        it.ground = true;
        it.tieId = ge.object.id;
        it.point = query_point(ge.object, queries, metric, dc);
        it.mddr = Mddr::point(it.point);
        if (usePivots) it.mddr = intersect(it.mddr, piv_mddr_point(ge.pd, q2p));
        it.key = l1_min_corner(it.mddr);
        push_item(std::move(it));
      }
    } else {
      for (const auto& re : root.routing) {
        HeapItem it;
        it.tieId = re.child;
        it.queryDistances = query_point(re.center, queries, metric, dc);
        it.mddr = b_mddr(it.queryDistances, re.coveringRadius);
        if (usePivots)
          it.mddr = intersect(it.mddr, piv_mddr(re.hrMin, re.hrMax, q2p));
        it.key = l1_min_corner(it.mddr);
        push_item(std::move(it));
      }
    }
  }

  bool firstEmitted = false;
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), pops_later);
    HeapItem cur = std::move(heap.back());
    heap.pop_back();
    ++st.heapPops;
    if (observer && observer->onPop) observer->onPop(cur.key);

    if (cur.equip == kEquipPivPar) {
      // Deferred item: re-check, then pay for its B box.
      if (filtered(cur.mddr)) continue;
      const MetricObject& obj = cur.ground ? cur.ge->object : cur.re->center;
      const double radius = cur.ground ? 0.0 : cur.re->coveringRadius;
      QPoint qd = query_point(obj, queries, metric, dc);
      Mddr box = intersect(b_mddr(qd, radius), cur.mddr);
      if (filtered(box)) continue;
      HeapItem next;
      next.equip = kEquipB;
      next.ground = cur.ground;
      next.tieId = cur.tieId;
      next.mddr = std::move(box);
      next.key = l1_min_corner(next.mddr);
      if (cur.ground)
        next.point = std::move(qd);
      else
        next.queryDistances = std::move(qd);
      push_item(std::move(next));
      continue;
    }

    if (cur.ground) {
      // Skyline object found; everything it dominates leaves heap and PSL.
      st.distanceComputations = dc.count;
      if (!firstEmitted) {
        firstEmitted = true;
        st.distanceComputationsAtFirstSkyline = dc.count;
        st.heapOpsAtFirstSkyline = st.heap_ops();
      }
      mss.push_back(cur.point);
      mssL1.push_back(l1_norm(cur.point));
      res.skyline.push_back({cur.tieId, std::move(cur.point), st});
      if (observer && observer->onEmit)
        observer->onEmit(res.skyline.back().id, res.skyline.back().point);
      if (limit && res.skyline.size() == *limit) {
        res.stoppedAtLimit = true;
        break;
      }
      const QPoint& s = mss.back();
      const double sL1 = mssL1.back();
      const std::size_t before = heap.size();
      auto kept = std::remove_if(heap.begin(), heap.end(), [&](const HeapItem& it) {
        return sL1 < it.key && mddr_dominated_by(s, it.mddr);
      });
      heap.erase(kept, heap.end());
      if (heap.size() != before) {
        st.heapRemovals += before - heap.size();
        std::make_heap(heap.begin(), heap.end(), pops_later);
      }
      for (std::size_t i = psl.size(); i-- > 0;) {
        if (dominates(s, psl[i].v)) {
          psl.erase(psl.begin() + static_cast<std::ptrdiff_t>(i));
          pslL1.erase(pslL1.begin() + static_cast<std::ptrdiff_t>(i));
        }
      }
      continue;
    }

    // Routing item with a paid B box: expand its child node.
    const Node& child = tree.fetch_node(static_cast<PageId>(cur.tieId), st);
    if (child.leaf) {
      for (const auto& ge : child.ground) {
        Mddr box = intersect(par_mddr(cur.queryDistances, ge.toParentDistance, 0.0),
                             cur.mddr);
        if (usePivots) box = intersect(box, piv_mddr_point(ge.pd, q2p));
        if (filtered(box)) continue;
        if (useDef) {
          HeapItem it;
          it.equip = kEquipPivPar;
          it.ground = true;
          it.tieId = ge.object.id;
          it.mddr = std::move(box);
          it.key = l1_min_corner(it.mddr);
          it.ge = &ge;
          push_item(std::move(it));
          continue;
        }
        QPoint qd = query_point(ge.object, queries, metric, dc);
        Mddr full = intersect(b_mddr(qd, 0.0), box);
        if (filtered(full)) continue;
        HeapItem it;
        it.ground = true;
        it.tieId = ge.object.id;
        it.mddr = std::move(full);
        it.key = l1_min_corner(it.mddr);
        it.point = std::move(qd);
        push_item(std::move(it));
      }
    } else {
      for (const auto& re : child.routing) {
        Mddr box = intersect(
            par_mddr(cur.queryDistances, re.toParentDistance, re.coveringRadius),
            cur.mddr);
        if (usePivots) box = intersect(box, piv_mddr(re.hrMin, re.hrMax, q2p));
        if (filtered(box)) continue;
        if (useDef) {
          HeapItem it;
          it.equip = kEquipPivPar;
          it.tieId = re.child;
          it.mddr = std::move(box);
          it.key = l1_min_corner(it.mddr);
          it.re = &re;
          push_item(std::move(it));
          continue;
        }
        QPoint qd = query_point(re.center, queries, metric, dc);
        Mddr full = intersect(b_mddr(qd, re.coveringRadius), box);
        if (filtered(full)) continue;
        HeapItem it;
        it.tieId = re.child;
        it.mddr = std::move(full);
        it.key = l1_min_corner(it.mddr);
        it.queryDistances = std::move(qd);
        push_item(std::move(it));
      }
    }
  }

  st.distanceComputations = dc.count;
  return res;
}

PhaseProfile phase_profile(const QueryStats& stats) {
  PhaseProfile p;
  if (stats.distanceComputations > 0)
    p.distanceFraction = static_cast<double>(stats.distanceComputationsAtFirstSkyline) /
                         static_cast<double>(stats.distanceComputations);
  if (stats.heap_ops() > 0)
    p.heapOpFraction = static_cast<double>(stats.heapOpsAtFirstSkyline) /
                       static_cast<double>(stats.heap_ops());
  return p;
}

}  // namespace metsky
