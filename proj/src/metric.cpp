#include "metsky/metric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace metsky {

double l2_distance(std::span<const double> u, std::span<const double> v,
                   DistanceCounter& counter) {
  if (u.size() != v.size())
    throw std::invalid_argument("l2_distance: dimension mismatch (" +
                                std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()) + ")");
  ++counter.count;
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double diff = u[i] - v[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

namespace {

// max over a-vertices of min over b-vertices of squared point distance.
// Skipping the remainder of an inner scan once it drops below the running
// max cannot change the max, so the result is bit-identical to the full scan.
double directed_sq(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); i += 2) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); j += 2) {
      const double dx = a[i] - b[j];
      const double dy = a[i + 1] - b[j + 1];
      const double d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        if (best <= worst) break;
      }
    }
    if (best > worst) worst = best;
  }
  return worst;
}

}  // namespace

double hausdorff_distance(std::span<const double> a, std::span<const double> b,
                          DistanceCounter& counter) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("hausdorff_distance: empty polygon");
  if (a.size() % 2 != 0 || b.size() % 2 != 0)
    throw std::invalid_argument("hausdorff_distance: odd coordinate count");
  ++counter.count;
  return std::sqrt(std::max(directed_sq(a, b), directed_sq(b, a)));
}

Metric::Metric(ObjectKind kind, std::uint32_t dimension)
    : kind_(kind), dimension_(dimension) {
  if (kind_ == ObjectKind::Vector && dimension_ == 0)
    throw std::invalid_argument("Metric: vector metric needs dimension >= 1");
}

void Metric::validate(const MetricObject& o) const {
  if (kind_ == ObjectKind::Vector) {
    if (o.values.size() != dimension_)
      throw std::invalid_argument(
          "Metric: object dimension " + std::to_string(o.values.size()) +
          " does not match metric dimension " + std::to_string(dimension_));
  } else {
    if (o.values.empty() || o.values.size() % 2 != 0)
      throw std::invalid_argument("Metric: malformed polygon object");
  }
}

double Metric::operator()(const MetricObject& a, const MetricObject& b,
                          DistanceCounter& counter) const {
  if (kind_ == ObjectKind::Vector) {
    if (a.values.size() != dimension_ || b.values.size() != dimension_)
      throw std::invalid_argument("Metric: vector dimension mismatch");
    return l2_distance(a.values, b.values, counter);
  }
  return hausdorff_distance(a.values, b.values, counter);
}

}  // namespace metsky
