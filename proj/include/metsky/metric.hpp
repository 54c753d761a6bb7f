#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace metsky {

using ObjectId = std::uint64_t;

enum class ObjectKind : std::uint8_t {
  Vector = 0,   // d-dimensional point, L2 distance
  Polygon = 1,  // unordered 2-d vertex cloud, Hausdorff distance
};

// One database object. Vectors store their d coordinates; polygons store
// interleaved vertex coordinates x0 y0 x1 y1 ...
struct MetricObject {
  ObjectId id = 0;
  std::vector<double> values;

  std::size_t vertex_count() const { return values.size() / 2; }
};

// Explicit accounting context: one increment per metric-function invocation.
// Build and query paths own separate counters; nothing global.
struct DistanceCounter {
  std::uint64_t count = 0;
};

double l2_distance(std::span<const double> u, std::span<const double> v,
                   DistanceCounter& counter);

// Symmetric Hausdorff distance between two vertex clouds (interleaved x,y).
// Counts as ONE distance computation regardless of vertex counts.
double hausdorff_distance(std::span<const double> a, std::span<const double> b,
                          DistanceCounter& counter);

// Dispatching metric bound to an object kind (and dimension, for vectors).
class Metric {
 public:
  Metric() = default;
  Metric(ObjectKind kind, std::uint32_t dimension);

  ObjectKind kind() const { return kind_; }
  std::uint32_t dimension() const { return dimension_; }

  double operator()(const MetricObject& a, const MetricObject& b,
                    DistanceCounter& counter) const;

  // Throws std::invalid_argument when the object does not fit this metric.
  void validate(const MetricObject& o) const;

 private:
  ObjectKind kind_ = ObjectKind::Vector;
  std::uint32_t dimension_ = 0;
};

}  // namespace metsky
