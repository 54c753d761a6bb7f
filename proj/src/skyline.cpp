#include "metsky/skyline.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

namespace metsky {

bool Mddr::contains(const QPoint& p, double tol) const {
  if (p.size() != lb.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] < lb[i] - tol || p[i] > ub[i] + tol) return false;
  return true;
}

bool dominates(const QPoint& a, const QPoint& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dominates: dimension mismatch");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

bool mddr_dominated_by(const QPoint& p, const Mddr& r) {
  if (p.size() != r.lb.size())
    throw std::invalid_argument("mddr_dominated_by: dimension mismatch");
  bool strict = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > r.lb[i]) return false;
    if (p[i] < r.lb[i]) strict = true;
  }
  return strict;
}

double l1_norm(const QPoint& p) {
  double s = 0.0;
  for (double x : p) s += x;
  return s;
}

double l1_min_corner(const Mddr& r) { return l1_norm(r.lb); }

Mddr intersect(const Mddr& a, const Mddr& b) {
  if (a.lb.size() != b.lb.size())
    throw std::invalid_argument("intersect: dimension mismatch");
  Mddr out;
  out.lb.resize(a.lb.size());
  out.ub.resize(a.lb.size());
  for (std::size_t i = 0; i < a.lb.size(); ++i) {
    out.lb[i] = std::max(a.lb[i], b.lb[i]);
    out.ub[i] = std::min(a.ub[i], b.ub[i]);
    if (out.ub[i] < out.lb[i]) {
      std::cerr << "metsky: intersect: roundoff inversion clamped (dim " << i
                << ", lb " << out.lb[i] << ", ub " << out.ub[i] << ")\n";
      out.ub[i] = out.lb[i];
    }
  }
  return out;
}

std::vector<IdPoint> sort_first_skyline(std::vector<IdPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const IdPoint& a, const IdPoint& b) {
              const double la = l1_norm(a.v);
              const double lb = l1_norm(b.v);
              if (la != lb) return la < lb;
              if (a.v != b.v) return a.v < b.v;
              return a.id < b.id;
            });
  std::vector<IdPoint> skyline;
  for (auto& p : points) {
    bool dominated = false;
    for (const auto& s : skyline) {
      if (dominates(s.v, p.v)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) skyline.push_back(std::move(p));
  }
  return skyline;
}

QPoint query_point(const MetricObject& obj,
                   std::span<const MetricObject> queries, const Metric& metric,
                   DistanceCounter& counter) {
  QPoint v;
  v.reserve(queries.size());
  for (const auto& q : queries) v.push_back(metric(q, obj, counter));
  return v;
}

std::vector<ObjectId> brute_force_metric_skyline(
    const Dataset& ds, std::span<const MetricObject> queries,
    DistanceCounter& counter) {
  if (queries.empty())
    throw std::invalid_argument("brute_force_metric_skyline: no query examples");
  const Metric metric = ds.metric();
  std::vector<QPoint> pts;
  pts.reserve(ds.size());
  for (const auto& o : ds.objects)
    pts.push_back(query_point(o, queries, metric, counter));
  std::vector<ObjectId> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i && dominates(pts[j], pts[i])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(ds.objects[i].id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace metsky
