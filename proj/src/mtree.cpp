#include "metsky/mtree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "metsky/pmtree.hpp"

namespace metsky {

// ---------------------------------------------------------------- building

class TreeBuilder {
 public:
  TreeBuilder(MetricTree& t, const Dataset& ds) : t_(t), ds_(ds) {}

  void run(std::uint64_t priorDistances) {
    const std::size_t p = t_.pivots_.count();
    if (p > 0) pivotDist_.resize(ds_.size());
    t_.nodes_.push_back(Node{});
    t_.root_ = 0;
    for (std::size_t i = 0; i < ds_.objects.size(); ++i) {
      if (ds_.objects[i].id != i)
        throw std::invalid_argument("MetricTree::build: object ids must be 0..n-1 in order");
      insert(ds_.objects[i]);
    }
    t_.objectCount_ = ds_.size();
    t_.buildDistances_ = priorDistances + dc_.count;
  }

 private:
  struct PathStep {
    PageId page;
    std::size_t entryIdx;
  };

  MetricTree& t_;
  const Dataset& ds_;
  DistanceCounter dc_;
  std::vector<std::vector<double>> pivotDist_;  // object id -> all p pivot distances

  double dist(const MetricObject& a, const MetricObject& b) {
    return t_.metric_(a, b, dc_);
  }

  void insert(const MetricObject& obj) {
    const PivotSet& piv = t_.pivots_;
    const double* pd = nullptr;
    if (!piv.empty()) {
      auto& cache = pivotDist_[obj.id];
      cache.reserve(piv.count());
      for (const auto& pv : piv.pivots) cache.push_back(dist(obj, pv));
      pd = cache.data();
    }

    std::vector<PathStep> path;
    PageId cur = t_.root_;
    double lastDist = 0.0;
    while (!t_.nodes_[cur].leaf) {
      Node& n = t_.nodes_[cur];
      std::size_t best = 0;
      double bestD = std::numeric_limits<double>::infinity();
      double bestEnl = std::numeric_limits<double>::infinity();
      std::vector<double> dv(n.routing.size());
      for (std::size_t i = 0; i < n.routing.size(); ++i) {
        const RoutingEntry& re = n.routing[i];
        dv[i] = dist(re.center, obj);
        const double enl = std::max(0.0, dv[i] - re.coveringRadius);
        const bool better =
            enl < bestEnl ||
            (enl == bestEnl &&
             (dv[i] < bestD ||
              (dv[i] == bestD && re.child < n.routing[best].child)));
        if (better) {
          best = i;
          bestD = dv[i];
          bestEnl = enl;
        }
      }
      RoutingEntry& re = n.routing[best];
      if (dv[best] > re.coveringRadius) re.coveringRadius = dv[best];
      for (std::size_t t = 0; t < re.hrMin.size(); ++t) {
        re.hrMin[t] = std::min(re.hrMin[t], pd[t]);
        re.hrMax[t] = std::max(re.hrMax[t], pd[t]);
      }
      path.push_back({cur, best});
      lastDist = dv[best];
      cur = re.child;
    }

    GroundEntry ge;
    ge.object = obj;
    ge.toParentDistance = path.empty() ? 0.0 : lastDist;
    if (!piv.empty()) ge.pd.assign(pd, pd + piv.pdCount);
    t_.nodes_[cur].ground.push_back(std::move(ge));
    if (t_.nodes_[cur].ground.size() > t_.capacity_) split_upward(cur, std::move(path));
  }

  // Promotion (sampled mM_RAD) + generalized-hyperplane partition with the
  // minimum-utilization clamp. Replaces node `id` with the left half,
  // appends the right half, returns the two promoted routing entries
  // (toParentDistance left for the caller to fill).
  std::pair<RoutingEntry, RoutingEntry> split_node(PageId id) {
    Node& n = t_.nodes_[id];
    const bool leaf = n.leaf;
    const std::size_t count = n.entry_count();
    const std::size_t minUtil = (t_.capacity_ + 4) / 5;  // ceil(0.2 * C)

    std::vector<std::size_t> cands;
    if (count <= 10) {
      for (std::size_t i = 0; i < count; ++i) cands.push_back(i);
    } else {
      for (std::size_t j = 0; j < 10; ++j) cands.push_back(j * count / 10);
    }

    auto center_of = [&](std::size_t i) -> const MetricObject& {
      return leaf ? n.ground[i].object : n.routing[i].center;
    };
    std::vector<double> matrix(count * count,
                               std::numeric_limits<double>::quiet_NaN());
    auto edist = [&](std::size_t a, std::size_t b) -> double {
      if (a == b) return 0.0;
      double& slot = matrix[std::min(a, b) * count + std::max(a, b)];
      if (std::isnan(slot)) slot = dist(center_of(a), center_of(b));
      return slot;
    };

    struct Plan {
      std::vector<std::size_t> A, B;
      double rA = 0.0, rB = 0.0;
      std::size_t a = 0, b = 0;
    };
    auto evaluate = [&](std::size_t a, std::size_t b) {
      Plan plan;
      plan.a = a;
      plan.b = b;
      std::vector<std::pair<double, std::size_t>> others;
      others.reserve(count - 2);
      for (std::size_t e = 0; e < count; ++e)
        if (e != a && e != b) others.emplace_back(edist(e, a) - edist(e, b), e);
      std::sort(others.begin(), others.end());
      std::size_t pos = 0;
      while (pos < others.size() && others[pos].first <= 0.0) ++pos;
      const std::size_t lo = minUtil > 0 ? minUtil - 1 : 0;
      const std::size_t hi = others.size() - lo;
      pos = std::clamp(pos, lo, hi);
      plan.A.push_back(a);
      plan.B.push_back(b);
      for (std::size_t i = 0; i < others.size(); ++i)
        (i < pos ? plan.A : plan.B).push_back(others[i].second);
      auto radius = [&](const std::vector<std::size_t>& side, std::size_t c) {
        double r = 0.0;
        for (std::size_t e : side) {
          const double d =
              edist(e, c) + (leaf ? 0.0 : t_.nodes_[id].routing[e].coveringRadius);
          if (d > r) r = d;
        }
        return r;
      };
      plan.rA = radius(plan.A, a);
      plan.rB = radius(plan.B, b);
      return plan;
    };

    Plan best;
    bool haveBest = false;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      for (std::size_t j = i + 1; j < cands.size(); ++j) {
        Plan p = evaluate(cands[i], cands[j]);
        const auto key = [](const Plan& x) {
          return std::tuple(std::max(x.rA, x.rB), std::min(x.rA, x.rB), x.a, x.b);
        };
        if (!haveBest || key(p) < key(best)) {
          best = std::move(p);
          haveBest = true;
        }
      }
    }

    std::sort(best.A.begin(), best.A.end());
    std::sort(best.B.begin(), best.B.end());

    RoutingEntry ra, rb;
    ra.center = center_of(best.a);
    rb.center = center_of(best.b);
    ra.coveringRadius = best.rA;
    rb.coveringRadius = best.rB;
    const std::uint32_t hrCount = t_.pivots_.hrCount;
    auto fill_rings = [&](RoutingEntry& re, const std::vector<std::size_t>& side) {
      if (t_.pivots_.empty() || hrCount == 0) return;
      re.hrMin.assign(hrCount, std::numeric_limits<double>::infinity());
      re.hrMax.assign(hrCount, -std::numeric_limits<double>::infinity());
      for (std::size_t e : side) {
        if (leaf) {
          const auto& cache = pivotDist_[n.ground[e].object.id];
          for (std::uint32_t t = 0; t < hrCount; ++t) {
            re.hrMin[t] = std::min(re.hrMin[t], cache[t]);
            re.hrMax[t] = std::max(re.hrMax[t], cache[t]);
          }
        } else {
          const RoutingEntry& ch = n.routing[e];
          for (std::uint32_t t = 0; t < hrCount; ++t) {
            re.hrMin[t] = std::min(re.hrMin[t], ch.hrMin[t]);
            re.hrMax[t] = std::max(re.hrMax[t], ch.hrMax[t]);
          }
        }
      }
    };
    fill_rings(ra, best.A);
    fill_rings(rb, best.B);

    Node left, right;
    left.leaf = right.leaf = leaf;
    auto move_out = [&](const std::vector<std::size_t>& side, std::size_t promoted,
                        Node& dst) {
      for (std::size_t e : side) {
        if (leaf) {
          GroundEntry ge = std::move(n.ground[e]);
          ge.toParentDistance = edist(e, promoted);
          dst.ground.push_back(std::move(ge));
        } else {
          RoutingEntry re = std::move(n.routing[e]);
          re.toParentDistance = edist(e, promoted);
          dst.routing.push_back(std::move(re));
        }
      }
    };
    move_out(best.A, best.a, left);
    move_out(best.B, best.b, right);

    ra.child = id;
    t_.nodes_[id] = std::move(left);
    t_.nodes_.push_back(std::move(right));
    rb.child = static_cast<PageId>(t_.nodes_.size() - 1);
    return {std::move(ra), std::move(rb)};
  }

  void split_upward(PageId nodeId, std::vector<PathStep> path) {
    while (t_.nodes_[nodeId].entry_count() > t_.capacity_) {
      auto [ra, rb] = split_node(nodeId);
      if (path.empty()) {
        Node newRoot;
        newRoot.leaf = false;
        ra.toParentDistance = 0.0;
        rb.toParentDistance = 0.0;
        newRoot.routing.push_back(std::move(ra));
        newRoot.routing.push_back(std::move(rb));
        t_.nodes_.push_back(std::move(newRoot));
        t_.root_ = static_cast<PageId>(t_.nodes_.size() - 1);
        return;
      }
      const PathStep step = path.back();
      path.pop_back();
      if (path.empty()) {
        ra.toParentDistance = 0.0;  // parent is the root
        rb.toParentDistance = 0.0;
      } else {
        const PathStep& up = path.back();
        const MetricObject& grand = t_.nodes_[up.page].routing[up.entryIdx].center;
        ra.toParentDistance = dist(ra.center, grand);
        rb.toParentDistance = dist(rb.center, grand);
      }
      Node& parent = t_.nodes_[step.page];
      parent.routing[step.entryIdx] = std::move(ra);
      parent.routing.push_back(std::move(rb));
      nodeId = step.page;
    }
  }
};

MetricTree MetricTree::build(const Dataset& ds, std::uint32_t capacity,
                             PivotSet pivots, std::uint64_t priorBuildDistances) {
  if (capacity < 4)
    throw std::invalid_argument("MetricTree::build: capacity must be >= 4");
  if (!pivots.empty()) {
    if (pivots.hrCount > pivots.count() || pivots.pdCount > pivots.count())
      throw std::invalid_argument("MetricTree::build: ring counts exceed pivot count");
  } else {
    pivots.hrCount = pivots.pdCount = 0;
  }
  MetricTree t;
  t.metric_ = ds.metric();
  t.capacity_ = capacity;
  t.pivots_ = std::move(pivots);
  TreeBuilder(t, ds).run(priorBuildDistances);
  return t;
}

// ---------------------------------------------------------------- queries

const Node& MetricTree::fetch_node(PageId id, QueryStats& stats) const {
  ++stats.nodeReads;
  return node(id);
}

const Node& MetricTree::node(PageId id) const {
  if (id >= nodes_.size())
    throw std::out_of_range("MetricTree: page " + std::to_string(id) +
                            " out of range");
  return nodes_[id];
}

RangeResult MetricTree::range_query(const MetricObject& q, double radius,
                                    const RangeAudit* audit) const {
  metric_.validate(q);
  if (radius < 0.0 || std::isnan(radius))
    throw std::invalid_argument("range_query: radius must be >= 0");
  RangeResult res;
  DistanceCounter dc;
  std::vector<double> qp;
  if (!pivots_.empty()) {
    qp.reserve(pivots_.count());
    for (const auto& pv : pivots_.pivots) qp.push_back(metric_(q, pv, dc));
  }

  auto walk = [&](auto&& self, PageId page,
                  std::optional<double> parentD) -> void {
    const Node& n = fetch_node(page, res.stats);
    if (!n.leaf) {
      for (const auto& re : n.routing) {
        if (!qp.empty() && pivot_intervals_prune(re.hrMin, re.hrMax, qp, radius)) {
          if (audit && audit->onRoutingPruned)
            audit->onRoutingPruned(RangeAudit::Filter::Pivot, re);
          continue;
        }
        if (parentD && std::abs(*parentD - re.toParentDistance) >
                           radius + re.coveringRadius) {
          if (audit && audit->onRoutingPruned)
            audit->onRoutingPruned(RangeAudit::Filter::Parent, re);
          continue;
        }
        const double d = metric_(q, re.center, dc);
        if (d > radius + re.coveringRadius) {
          if (audit && audit->onRoutingPruned)
            audit->onRoutingPruned(RangeAudit::Filter::Basic, re);
          continue;
        }
        self(self, re.child, d);
      }
    } else {
      for (const auto& ge : n.ground) {
        if (!qp.empty() && pivot_distances_prune(ge.pd, qp, radius)) {
          if (audit && audit->onGroundPruned)
            audit->onGroundPruned(RangeAudit::Filter::Pivot, ge);
          continue;
        }
        if (parentD && std::abs(*parentD - ge.toParentDistance) > radius) {
          if (audit && audit->onGroundPruned)
            audit->onGroundPruned(RangeAudit::Filter::Parent, ge);
          continue;
        }
        const double d = metric_(q, ge.object, dc);
        if (d > radius) {
          if (audit && audit->onGroundPruned)
            audit->onGroundPruned(RangeAudit::Filter::Basic, ge);
          continue;
        }
        res.ids.push_back(ge.object.id);
      }
    }
  };
  walk(walk, root_, std::nullopt);
  res.stats.distanceComputations = dc.count;
  std::sort(res.ids.begin(), res.ids.end());
  return res;
}

KnnResult MetricTree::knn_query(const MetricObject& q, std::size_t k) const {
  metric_.validate(q);
  KnnResult res;
  res.truncated = k > objectCount_;
  if (k == 0) return res;
  DistanceCounter dc;
  std::vector<double> qp;
  if (!pivots_.empty()) {
    qp.reserve(pivots_.count());
    for (const auto& pv : pivots_.pivots) qp.push_back(metric_(q, pv, dc));
  }

  struct QueueItem {
    double lb;
    PageId page;
    double parentD;
    bool hasParent;
  };
  auto later = [](const QueueItem& a, const QueueItem& b) {
    return std::tie(a.lb, a.page) > std::tie(b.lb, b.page);
  };
  std::priority_queue<QueueItem, std::vector<QueueItem>, decltype(later)> pq(later);

  // k current best (distance, id), largest on top; full size defines the
  // dynamic radius.
  std::priority_queue<std::pair<double, ObjectId>> best;
  const double inf = std::numeric_limits<double>::infinity();
  auto tau = [&] { return best.size() == k ? best.top().first : inf; };

  pq.push({0.0, root_, 0.0, false});
  ++res.stats.heapPushes;
  res.stats.maxHeapSize = 1;
  while (!pq.empty()) {
    const QueueItem it = pq.top();
    pq.pop();
    ++res.stats.heapPops;
    if (it.lb > tau()) break;
    const Node& n = fetch_node(it.page, res.stats);
    if (n.leaf) {
      for (const auto& ge : n.ground) {
        if (!qp.empty() && pivot_distances_prune(ge.pd, qp, tau())) continue;
        if (it.hasParent &&
            std::abs(it.parentD - ge.toParentDistance) > tau())
          continue;
        const double d = metric_(q, ge.object, dc);
        const std::pair<double, ObjectId> cand{d, ge.object.id};
        if (best.size() < k) {
          best.push(cand);
        } else if (cand < best.top()) {
          best.pop();
          best.push(cand);
        }
      }
    } else {
      for (const auto& re : n.routing) {
        if (!qp.empty() && pivot_intervals_prune(re.hrMin, re.hrMax, qp, tau()))
          continue;
        if (it.hasParent && std::abs(it.parentD - re.toParentDistance) -
                                    re.coveringRadius >
                                tau())
          continue;
        const double d = metric_(q, re.center, dc);
        const double lb = std::max(0.0, d - re.coveringRadius);
        if (lb > tau()) continue;
        pq.push({lb, re.child, d, true});
        ++res.stats.heapPushes;
        res.stats.maxHeapSize = std::max<std::uint64_t>(res.stats.maxHeapSize, pq.size());
      }
    }
  }
  res.neighbors.resize(best.size());
  for (std::size_t i = best.size(); i-- > 0;) {
    res.neighbors[i] = {best.top().second, best.top().first};
    best.pop();
  }
  res.stats.distanceComputations = dc.count;
  return res;
}

// ----------------------------------------------------------- serialization

namespace {

constexpr char kMagicM[8] = {'M', 'T', 'R', 'E', 'E', '1', 0, 0};
constexpr char kMagicPM[8] = {'P', 'M', 'T', 'R', 'E', 'E', '1', 0};
constexpr std::uint32_t kFormatVersion = 1;

void put_u8(std::string& b, std::uint8_t v) { b.push_back(static_cast<char>(v)); }
void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_f64(std::string& b, double v) { put_u64(b, std::bit_cast<std::uint64_t>(v)); }

struct ByteReader {
  const unsigned char* p;
  const unsigned char* end;
  std::string context;

  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n)
      throw std::runtime_error("MetricTree::load: truncated " + context);
  }
  std::uint8_t u8() {
    need(1);
    return *p++;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    p += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

void put_object(std::string& b, const MetricObject& o) {
  put_u64(b, o.id);
  put_u32(b, static_cast<std::uint32_t>(o.values.size()));
  for (double v : o.values) put_f64(b, v);
}

MetricObject get_object(ByteReader& r) {
  MetricObject o;
  o.id = r.u64();
  const std::uint32_t len = r.u32();
  o.values.resize(len);
  for (auto& v : o.values) v = r.f64();
  return o;
}

std::string serialize_node(const Node& n) {
  std::string b;
  put_u8(b, n.leaf ? 1 : 0);
  put_u32(b, static_cast<std::uint32_t>(n.entry_count()));
  if (n.leaf) {
    for (const auto& ge : n.ground) {
      put_object(b, ge.object);
      put_f64(b, ge.toParentDistance);
      put_u32(b, static_cast<std::uint32_t>(ge.pd.size()));
      for (double v : ge.pd) put_f64(b, v);
    }
  } else {
    for (const auto& re : n.routing) {
      put_object(b, re.center);
      put_f64(b, re.coveringRadius);
      put_f64(b, re.toParentDistance);
      put_u32(b, re.child);
      put_u32(b, static_cast<std::uint32_t>(re.hrMin.size()));
      for (double v : re.hrMin) put_f64(b, v);
      for (double v : re.hrMax) put_f64(b, v);
    }
  }
  return b;
}

Node deserialize_node(ByteReader& r) {
  Node n;
  n.leaf = r.u8() != 0;
  const std::uint32_t count = r.u32();
  if (n.leaf) {
    n.ground.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      GroundEntry ge;
      ge.object = get_object(r);
      ge.toParentDistance = r.f64();
      const std::uint32_t pdLen = r.u32();
      ge.pd.resize(pdLen);
      for (auto& v : ge.pd) v = r.f64();
      n.ground.push_back(std::move(ge));
    }
  } else {
    n.routing.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      RoutingEntry re;
      re.center = get_object(r);
      re.coveringRadius = r.f64();
      re.toParentDistance = r.f64();
      re.child = r.u32();
      const std::uint32_t hrLen = r.u32();
      re.hrMin.resize(hrLen);
      for (auto& v : re.hrMin) v = r.f64();
      re.hrMax.resize(hrLen);
      for (auto& v : re.hrMax) v = r.f64();
      n.routing.push_back(std::move(re));
    }
  }
  return n;
}

std::size_t round_up(std::size_t v, std::size_t step) {
  return (v + step - 1) / step * step;
}

}  // namespace

void MetricTree::save(const std::filesystem::path& path) const {
  std::vector<std::string> nodeImages;
  nodeImages.reserve(nodes_.size());
  std::size_t maxNode = 0;
  for (const auto& n : nodes_) {
    nodeImages.push_back(serialize_node(n));
    maxNode = std::max(maxNode, nodeImages.back().size());
  }

  std::string pivotBlock;
  for (const auto& pv : pivots_.pivots) put_object(pivotBlock, pv);

  const std::size_t pageSize = round_up(std::max<std::size_t>(maxNode, 128), 256);

  std::string header;
  header.append(pivots_.empty() ? kMagicM : kMagicPM, 8);
  put_u32(header, kFormatVersion);
  put_u32(header, static_cast<std::uint32_t>(pageSize));
  put_u32(header, capacity_);
  put_u8(header, metric_.kind() == ObjectKind::Vector ? 0 : 1);  // metric: L2 / Hausdorff
  put_u8(header, static_cast<std::uint8_t>(metric_.kind()));     // object kind
  put_u8(header, 0);
  put_u8(header, 0);
  put_u32(header, metric_.dimension());
  put_u32(header, root_);
  put_u32(header, static_cast<std::uint32_t>(nodes_.size()));
  const std::size_t headerPages = 1 + (pivotBlock.size() + pageSize - 1) / pageSize;
  put_u32(header, static_cast<std::uint32_t>(headerPages));
  put_u32(header, static_cast<std::uint32_t>(pivots_.count()));
  put_u32(header, pivots_.hrCount);
  put_u32(header, pivots_.pdCount);
  put_u64(header, objectCount_);
  put_u64(header, buildDistances_);
  if (header.size() > pageSize)
    throw std::runtime_error("MetricTree::save: header exceeds page size");

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("MetricTree::save: cannot open " + path.string());
  auto write_page_padded = [&](const std::string& img) {
    f.write(img.data(), static_cast<std::streamsize>(img.size()));
    const std::string pad(pageSize - img.size() % pageSize == pageSize
                              ? 0
                              : pageSize - img.size() % pageSize,
                          '\0');
    f.write(pad.data(), static_cast<std::streamsize>(pad.size()));
  };
  write_page_padded(header);
  if (!pivotBlock.empty()) write_page_padded(pivotBlock);
  for (const auto& img : nodeImages) write_page_padded(img);
  if (!f) throw std::runtime_error("MetricTree::save: write failed for " + path.string());
}

MetricTree MetricTree::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("MetricTree::load: cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 16)
    throw std::runtime_error("MetricTree::load: file too small: " + path.string());

  const bool isPM = std::memcmp(bytes.data(), kMagicPM, 8) == 0;
  if (!isPM && std::memcmp(bytes.data(), kMagicM, 8) != 0)
    throw std::runtime_error("MetricTree::load: bad magic in " + path.string());

  ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()) + 8,
               reinterpret_cast<const unsigned char*>(bytes.data()) + bytes.size(),
               "header"};
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw std::runtime_error("MetricTree::load: unsupported format version " +
                             std::to_string(version));
  const std::uint32_t pageSize = r.u32();
  const std::uint32_t capacity = r.u32();
  const std::uint8_t metricKind = r.u8();
  const std::uint8_t objectKind = r.u8();
  r.u8();
  r.u8();
  const std::uint32_t dimension = r.u32();
  const std::uint32_t rootPage = r.u32();
  const std::uint32_t nodeCount = r.u32();
  const std::uint32_t headerPages = r.u32();
  const std::uint32_t pivotCount = r.u32();
  const std::uint32_t hrCount = r.u32();
  const std::uint32_t pdCount = r.u32();
  const std::uint64_t objectCount = r.u64();
  const std::uint64_t buildDistances = r.u64();

  if (metricKind > 1 || objectKind > 1 || metricKind != objectKind)
    throw std::runtime_error("MetricTree::load: inconsistent kind bytes");
  if (pageSize == 0 || nodeCount == 0 || rootPage >= nodeCount)
    throw std::runtime_error("MetricTree::load: malformed header");
  if (isPM == (pivotCount == 0))
    throw std::runtime_error("MetricTree::load: magic/pivot-count mismatch");
  const std::size_t expected =
      (static_cast<std::size_t>(headerPages) + nodeCount) * pageSize;
  if (bytes.size() < expected)
    throw std::runtime_error("MetricTree::load: truncated file (" +
                             std::to_string(bytes.size()) + " of " +
                             std::to_string(expected) + " bytes)");

  MetricTree t;
  t.metric_ = Metric(static_cast<ObjectKind>(objectKind),
                     objectKind == 0 ? dimension : 0);
  t.capacity_ = capacity;
  t.root_ = rootPage;
  t.objectCount_ = objectCount;
  t.buildDistances_ = buildDistances;

  if (pivotCount > 0) {
    ByteReader pr{reinterpret_cast<const unsigned char*>(bytes.data()) + pageSize,
                  reinterpret_cast<const unsigned char*>(bytes.data()) +
                      static_cast<std::size_t>(headerPages) * pageSize,
                  "pivot block"};
    t.pivots_.pivots.reserve(pivotCount);
    for (std::uint32_t i = 0; i < pivotCount; ++i)
      t.pivots_.pivots.push_back(get_object(pr));
    t.pivots_.hrCount = hrCount;
    t.pivots_.pdCount = pdCount;
  }

  t.nodes_.reserve(nodeCount);
  for (std::uint32_t i = 0; i < nodeCount; ++i) {
    const std::size_t off = (static_cast<std::size_t>(headerPages) + i) * pageSize;
    ByteReader nr{reinterpret_cast<const unsigned char*>(bytes.data()) + off,
                  reinterpret_cast<const unsigned char*>(bytes.data()) + off + pageSize,
                  "node page " + std::to_string(i)};
    t.nodes_.push_back(deserialize_node(nr));
  }
  return t;
}

}  // namespace metsky
