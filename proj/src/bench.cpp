#include "metsky/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "metsky/pmtree.hpp"
#include "metsky/skyline.hpp"

namespace metsky {

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Pivots: return "pivots";
    case SweepAxis::NodeSize: return "node-size";
    case SweepAxis::DbSize: return "db-size";
    case SweepAxis::MExamples: return "examples";
    case SweepAxis::PartialK: return "limit";
  }
  return "?";
}

std::optional<SweepAxis> parse_sweep_axis(const std::string& name) {
  if (name == "pivots") return SweepAxis::Pivots;
  if (name == "node-size") return SweepAxis::NodeSize;
  if (name == "db-size") return SweepAxis::DbSize;
  if (name == "examples") return SweepAxis::MExamples;
  if (name == "limit") return SweepAxis::PartialK;
  return std::nullopt;
}

std::vector<std::size_t> default_sweep_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Pivots: return {16, 32, 64, 128, 256};
    case SweepAxis::NodeSize: return {10, 20, 40, 80};
    case SweepAxis::DbSize: return {1000, 2000, 5000, 10000};
    case SweepAxis::MExamples: return {1, 2, 3, 4};
    case SweepAxis::PartialK: return {1, 2, 5, 10};
  }
  return {};
}

BenchWorkload make_workload(ObjectKind kind, std::size_t dbSize,
                            std::size_t dimension, std::size_t clusters,
                            double spread, std::size_t queryCount,
                            std::size_t examples, std::uint64_t seed) {
  if (examples == 0) throw std::invalid_argument("workload: examples must be >= 1");
  const std::size_t total = dbSize + queryCount * examples;
  Dataset all = kind == ObjectKind::Vector
                    ? generate_vectors(total, static_cast<std::uint32_t>(dimension),
                                       clusters, spread, seed)
                    : generate_polygons(total, seed);
  BenchWorkload w;
  w.db.kind = all.kind;
  w.db.dimension = all.dimension;
  w.db.seed = seed;
  w.db.objects.assign(all.objects.begin(),
                      all.objects.begin() + static_cast<std::ptrdiff_t>(dbSize));
  w.querySets.reserve(queryCount);
  for (std::size_t q = 0; q < queryCount; ++q) {
    std::vector<MetricObject> set;
    set.reserve(examples);
    for (std::size_t i = 0; i < examples; ++i)
      set.push_back(all.objects[dbSize + q * examples + i]);
    w.querySets.push_back(std::move(set));
  }
  return w;
}

namespace {

BenchConfig apply_sweep_value(BenchConfig c, std::size_t value) {
  switch (c.axis) {
    case SweepAxis::Pivots: c.pivots = value; break;
    case SweepAxis::NodeSize: c.capacity = value; break;
    case SweepAxis::DbSize: c.dbSize = value; break;
    case SweepAxis::MExamples: c.examples = value; break;
    case SweepAxis::PartialK: c.limit = value; break;
  }
  return c;
}

struct VariantTrees {
  std::optional<MetricTree> plain;  // pivot-free, for the plain-tree variant
  std::optional<MetricTree> pm;     // shared by all pivot-aware variants
};

VariantTrees build_trees(const BenchConfig& c, const Dataset& db) {
  VariantTrees t;
  bool needPlain = false, needPm = false;
  for (MsqVariant v : c.variants)
    (v == MsqVariant::MTree ? needPlain : needPm) = true;
  if (needPlain) t.plain = MetricTree::build(db, c.capacity);
  if (needPm)
    t.pm = build_pm(db, c.capacity, c.pivots, c.innerPivotFraction, c.seed);
  return t;
}

}  // namespace

std::string run_bench(const BenchConfig& config) {
  std::string csv =
      "sweep,value,variant,avg_distance_computations,avg_heap_ops,"
      "avg_max_heap_size,avg_node_reads,avg_skyline_size,"
      "avg_dc_fraction_before_first,avg_heap_fraction_before_first,"
      "seq_scan_baseline\n";
  const std::vector<std::size_t> values = config.sweepValues.empty()
                                              ? default_sweep_values(config.axis)
                                              : config.sweepValues;
  for (std::size_t value : values) {
    const BenchConfig eff = apply_sweep_value(config, value);
    const BenchWorkload w =
        make_workload(eff.kind, eff.dbSize, eff.dimension, eff.clusters,
                      eff.spread, eff.queryCount, eff.examples, eff.seed);
    const VariantTrees trees = build_trees(eff, w.db);
    for (MsqVariant variant : eff.variants) {
      const MetricTree& tree =
          variant == MsqVariant::MTree ? *trees.plain : *trees.pm;
      double dcSum = 0, heapSum = 0, maxHeapSum = 0, readSum = 0, skySum = 0;
      double dcFracSum = 0, heapFracSum = 0;
      for (const auto& qs : w.querySets) {
        MsqResult r = msq(tree, qs, variant, eff.limit);
        dcSum += static_cast<double>(r.stats.distanceComputations);
        heapSum += static_cast<double>(r.stats.heap_ops());
        maxHeapSum += static_cast<double>(r.stats.maxHeapSize);
        readSum += static_cast<double>(r.stats.nodeReads);
        skySum += static_cast<double>(r.skyline.size());
        PhaseProfile ph = phase_profile(r.stats);
        dcFracSum += ph.distanceFraction;
        heapFracSum += ph.heapOpFraction;
      }
      const double n = static_cast<double>(w.querySets.size());
      char buf[512];
      std::snprintf(buf, sizeof buf,
                    "%s,%zu,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%zu\n",
                    to_string(eff.axis), value, to_string(variant), dcSum / n,
                    heapSum / n, maxHeapSum / n, readSum / n, skySum / n,
                    dcFracSum / n, heapFracSum / n, eff.examples * eff.dbSize);
      csv += buf;
    }
  }
  return csv;
}

std::size_t run_verify(const BenchConfig& config, std::string* report) {
  const BenchWorkload w =
      make_workload(config.kind, config.dbSize, config.dimension,
                    config.clusters, config.spread, config.queryCount,
                    config.examples, config.seed);
  const VariantTrees trees = build_trees(config, w.db);
  std::size_t mismatches = 0;
  for (std::size_t qi = 0; qi < w.querySets.size(); ++qi) {
    DistanceCounter oracleCounter;
    const std::vector<ObjectId> expected =
        brute_force_metric_skyline(w.db, w.querySets[qi], oracleCounter);
    for (MsqVariant variant : config.variants) {
      const MetricTree& tree =
          variant == MsqVariant::MTree ? *trees.plain : *trees.pm;
      MsqResult r = msq(tree, w.querySets[qi], variant);
      std::vector<ObjectId> got;
      got.reserve(r.skyline.size());
      for (const auto& rec : r.skyline) got.push_back(rec.id);
      std::sort(got.begin(), got.end());
      if (got != expected) {
        ++mismatches;
        if (report) {
          char buf[256];
          std::snprintf(buf, sizeof buf,
                        "query %zu, %s: expected %zu skyline objects, got %zu\n",
                        qi, to_string(variant), expected.size(), got.size());
          *report += buf;
        }
      }
    }
  }
  return mismatches;
}

}  // namespace metsky
