#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "metsky/metric.hpp"

namespace metsky {

// A generated or loaded database. Object ids are always 0..n-1 in order.
struct Dataset {
  ObjectKind kind = ObjectKind::Vector;
  std::uint32_t dimension = 0;  // vectors only, 0 for polygons
  std::uint64_t seed = 0;
  std::vector<MetricObject> objects;

  std::size_t size() const { return objects.size(); }
  Metric metric() const {
    return Metric(kind, kind == ObjectKind::Vector ? dimension : 0);
  }
};

bool operator==(const Dataset& a, const Dataset& b);

// n polygons in the unit square. Vertex counts are uniform in [5, 15]; the
// first vertex is uniform in the square; each further vertex is uniform on
// the intersection of the square with the disc of radius 0.1*sqrt(2) around
// its predecessor (rejection sampling from the disc's bounding box).
Dataset generate_polygons(std::size_t n, std::uint64_t seed);

// n vectors in [0,1]^dim from a clustered gaussian mixture: `clusters`
// centers uniform in the cube, then per object a uniformly chosen center
// plus N(0, spread^2) per coordinate, clamped to [0,1].
Dataset generate_vectors(std::size_t n, std::uint32_t dim,
                         std::size_t clusters, double spread,
                         std::uint64_t seed);

// Line-oriented text format, 17 significant digits (round-trips doubles):
//   VEC <dim> <n> <seed>      followed by n lines of dim coordinates
//   POLY <n> <seed>           followed by n lines: k x1 y1 ... xk yk
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace metsky
