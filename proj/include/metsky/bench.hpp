#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metsky/dataset.hpp"
#include "metsky/msq.hpp"

namespace metsky {

// Which knob a benchmark run varies; every other knob stays at its
// configured value.
enum class SweepAxis {
  Pivots,     // pivot count of the pivot-equipped index
  NodeSize,   // node capacity (entries per page)
  DbSize,     // database size
  MExamples,  // query examples per skyline query
  PartialK,   // emission limit (partial result size)
};

const char* to_string(SweepAxis axis);
std::optional<SweepAxis> parse_sweep_axis(const std::string& name);

struct BenchConfig {
  ObjectKind kind = ObjectKind::Vector;
  std::size_t dimension = 12;  // vector datasets only
  std::size_t clusters = 10;   // vector datasets only
  double spread = 0.05;        // vector datasets only
  std::size_t dbSize = 10000;
  std::size_t capacity = 20;
  std::size_t pivots = 128;
  double innerPivotFraction = 0.5;
  std::size_t queryCount = 50;
  std::size_t examples = 2;
  std::optional<std::size_t> limit;
  std::vector<MsqVariant> variants = {MsqVariant::MTree, MsqVariant::PMTree,
                                      MsqVariant::PMTreePsf,
                                      MsqVariant::PMTreePsfDef};
  SweepAxis axis = SweepAxis::Pivots;
  std::vector<std::size_t> sweepValues;  // empty: per-axis defaults
  std::uint64_t seed = 42;
};

std::vector<std::size_t> default_sweep_values(SweepAxis axis);

// Database plus query examples drawn from one generator stream: the first
// dbSize objects are bit-identical to a standalone generation of dbSize
// objects, and the tail supplies queryCount blocks of m examples from the
// same source distribution.
struct BenchWorkload {
  Dataset db;
  std::vector<std::vector<MetricObject>> querySets;
};

BenchWorkload make_workload(ObjectKind kind, std::size_t dbSize,
                            std::size_t dimension, std::size_t clusters,
                            double spread, std::size_t queryCount,
                            std::size_t examples, std::uint64_t seed);

// Runs the configured sweep and returns the full CSV (header + one row per
// sweep value and variant, averages over queryCount queries). Deterministic:
// equal configs produce byte-identical output.
std::string run_bench(const BenchConfig& config);

// Runs every configured variant on every query set and compares the result
// against the sequential-scan oracle (ignores axis/sweepValues). Returns the
// number of mismatching (query, variant) pairs; details go to `report` when
// given.
std::size_t run_verify(const BenchConfig& config, std::string* report = nullptr);

}  // namespace metsky
