// Command-line front end: dataset generation, index build, skyline queries,
// verification against the sequential-scan oracle, and benchmark sweeps.

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metsky/bench.hpp"
#include "metsky/dataset.hpp"
#include "metsky/msq.hpp"
#include "metsky/pmtree.hpp"
#include "metsky/skyline.hpp"

namespace {

using namespace metsky;

ObjectKind parse_kind(const std::string& s) {
  return s == "polygon" ? ObjectKind::Polygon : ObjectKind::Vector;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<MsqVariant> parse_variants(const std::vector<std::string>& names) {
  std::vector<MsqVariant> out;
  for (const auto& n : names) {
    auto v = parse_variant(n);
    if (!v) throw std::runtime_error("unknown variant: " + n);
    out.push_back(*v);
  }
  if (out.empty())
    out = {MsqVariant::MTree, MsqVariant::PMTree, MsqVariant::PMTreePsf,
           MsqVariant::PMTreePsfDef};
  return out;
}

std::string format_query_csv(const MsqResult& res) {
  std::string csv;
  const std::size_t m = res.skyline.empty() ? 0 : res.skyline.front().point.size();
  csv += "rank,id,l1";
  for (std::size_t i = 0; i < m; ++i) {
    char col[32];
    std::snprintf(col, sizeof col, ",d%zu", i);
    csv += col;
  }
  csv += '\n';
  char buf[64];
  for (std::size_t r = 0; r < res.skyline.size(); ++r) {
    const auto& rec = res.skyline[r];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g", r,
                  static_cast<unsigned long long>(rec.id), l1_norm(rec.point));
    csv += buf;
    for (double d : rec.point) {
      std::snprintf(buf, sizeof buf, ",%.17g", d);
      csv += buf;
    }
    csv += '\n';
  }
  const QueryStats& st = res.stats;
  const PhaseProfile ph = phase_profile(st);
  char line[512];
  std::snprintf(line, sizeof line,
                "# skyline_size=%zu stopped_at_limit=%d\n"
                "# distance_computations=%llu heap_pushes=%llu heap_pops=%llu "
                "heap_removals=%llu max_heap_size=%llu node_reads=%llu\n"
                "# at_first_skyline: distance_computations=%llu heap_ops=%llu "
                "(fractions %.6f / %.6f)\n",
                res.skyline.size(), res.stoppedAtLimit ? 1 : 0,
                static_cast<unsigned long long>(st.distanceComputations),
                static_cast<unsigned long long>(st.heapPushes),
                static_cast<unsigned long long>(st.heapPops),
                static_cast<unsigned long long>(st.heapRemovals),
                static_cast<unsigned long long>(st.maxHeapSize),
                static_cast<unsigned long long>(st.nodeReads),
                static_cast<unsigned long long>(st.distanceComputationsAtFirstSkyline),
                static_cast<unsigned long long>(st.heapOpsAtFirstSkyline),
                ph.distanceFraction, ph.heapOpFraction);
  csv += line;
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric-space skyline toolkit (M-tree / PM-tree indexes)"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a dataset file");
  std::string genKind = "vector", genOut;
  std::size_t genN = 0, genDim = 12, genClusters = 10;
  double genSpread = 0.05;
  std::uint64_t genSeed = 42;
  gen->add_option("--kind", genKind)->check(CLI::IsMember({"vector", "polygon"}));
  gen->add_option("--n", genN, "object count")->required();
  gen->add_option("--dim", genDim, "vector dimension");
  gen->add_option("--clusters", genClusters, "gaussian mixture components");
  gen->add_option("--spread", genSpread, "per-coordinate std deviation");
  gen->add_option("--seed", genSeed);
  gen->add_option("--out", genOut, "dataset file path")->required();

  // build
  auto* build = app.add_subcommand("build", "build an index from a dataset");
  std::string buildData, buildIndex;
  std::size_t buildCapacity = 20, buildPivots = 128;
  double buildFraction = 0.5;
  std::uint64_t buildSeed = 42;
  build->add_option("--data", buildData, "dataset file")->required();
  build->add_option("--index", buildIndex, "index file to write")->required();
  build->add_option("--capacity", buildCapacity, "entries per node");
  build->add_option("--pivots", buildPivots,
                    "global pivots; 0 builds a pivot-free tree");
  build->add_option("--inner-pivot-fraction", buildFraction,
                    "fraction of pivots carried as rings on inner entries");
  build->add_option("--seed", buildSeed, "pivot selection seed");

  // query
  auto* query = app.add_subcommand("query", "run one metric skyline query");
  std::string queryIndex, queryQueries, queryVariant, queryOut;
  std::size_t queryLimit = 0;
  query->add_option("--index", queryIndex)->required();
  query->add_option("--queries", queryQueries,
                    "dataset file whose objects are the query examples")
      ->required();
  query->add_option("--variant", queryVariant,
                    "default: most filtered variant the index supports")
      ->check(CLI::IsMember({"mtree", "pmtree", "pmtree+psf", "pmtree+psf+def"}));
  query->add_option("--limit", queryLimit, "stop after this many results (0 = all)");
  query->add_option("--out", queryOut, "CSV path (default stdout)");

  // bench / verify share their flag set
  auto* bench = app.add_subcommand("bench", "benchmark sweep, CSV output");
  auto* verify = app.add_subcommand(
      "verify", "compare every variant against the sequential-scan oracle");
  struct BenchFlags {
    std::string kind = "vector", out;
    BenchConfig cfg;
    std::size_t limit = 0;
    std::vector<std::string> variants;
    std::string sweep = "pivots";
    std::vector<std::size_t> sweepValues;
  };
  BenchFlags bf, vf;
  vf.cfg.dbSize = 2000;  // keeps the O(n^2) oracle affordable
  auto add_common = [](CLI::App* cmd, BenchFlags& f) {
    cmd->add_option("--kind", f.kind)->check(CLI::IsMember({"vector", "polygon"}));
    cmd->add_option("--n", f.cfg.dbSize, "database size");
    cmd->add_option("--dim", f.cfg.dimension);
    cmd->add_option("--clusters", f.cfg.clusters);
    cmd->add_option("--spread", f.cfg.spread);
    cmd->add_option("--capacity", f.cfg.capacity);
    cmd->add_option("--pivots", f.cfg.pivots);
    cmd->add_option("--inner-pivot-fraction", f.cfg.innerPivotFraction);
    cmd->add_option("--queries", f.cfg.queryCount, "query sets to run");
    cmd->add_option("--examples", f.cfg.examples, "query examples per set");
    cmd->add_option("--limit", f.limit, "stop after this many results (0 = all)");
    cmd->add_option("--variant", f.variants, "variants to run (repeatable)")
        ->check(CLI::IsMember({"mtree", "pmtree", "pmtree+psf", "pmtree+psf+def"}));
    cmd->add_option("--seed", f.cfg.seed);
    cmd->add_option("--out", f.out, "output path (default stdout)");
  };
  add_common(bench, bf);
  add_common(verify, vf);
  bench->add_option("--sweep", bf.sweep, "axis to vary")
      ->check(CLI::IsMember({"pivots", "node-size", "db-size", "examples", "limit"}));
  bench->add_option("--sweep-values", bf.sweepValues, "values for the axis");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const ObjectKind kind = parse_kind(genKind);
      Dataset ds = kind == ObjectKind::Vector
                       ? generate_vectors(genN, static_cast<std::uint32_t>(genDim),
                                          genClusters, genSpread, genSeed)
                       : generate_polygons(genN, genSeed);
      save_dataset(ds, genOut);
      std::fprintf(stderr, "wrote %zu %s objects to %s\n", ds.objects.size(),
                   genKind.c_str(), genOut.c_str());
    } else if (*build) {
      Dataset ds = load_dataset(buildData);
      MetricTree tree =
          build_pm(ds, static_cast<std::uint32_t>(buildCapacity),
                   static_cast<std::uint32_t>(buildPivots), buildFraction,
                   buildSeed);
      tree.save(buildIndex);
      std::fprintf(stderr,
                   "built index: %zu objects, %zu nodes, capacity %u, "
                   "%zu pivots, %llu build distance computations\n",
                   tree.object_count(), tree.node_count(), tree.capacity(),
                   tree.pivot_set().count(),
                   static_cast<unsigned long long>(
                       tree.build_distance_computations()));
    } else if (*query) {
      MetricTree tree = MetricTree::load(queryIndex);
      Dataset qds = load_dataset(queryQueries);
      if (qds.kind != tree.metric().kind())
        throw std::runtime_error("query examples and index disagree on object kind");
      MsqVariant variant = tree.pivot_set().empty() ? MsqVariant::MTree
                                                    : MsqVariant::PMTreePsfDef;
      if (!queryVariant.empty()) variant = *parse_variant(queryVariant);
      std::optional<std::size_t> limit;
      if (queryLimit > 0) limit = queryLimit;
      MsqResult res = msq(tree, qds.objects, variant, limit);
      write_text(queryOut, format_query_csv(res));
    } else if (*bench) {
      bf.cfg.kind = parse_kind(bf.kind);
      bf.cfg.variants = parse_variants(bf.variants);
      if (bf.limit > 0) bf.cfg.limit = bf.limit;
      bf.cfg.axis = *parse_sweep_axis(bf.sweep);
      bf.cfg.sweepValues = bf.sweepValues;
      write_text(bf.out, run_bench(bf.cfg));
    } else if (*verify) {
      vf.cfg.kind = parse_kind(vf.kind);
      vf.cfg.variants = parse_variants(vf.variants);
      if (vf.limit > 0) vf.cfg.limit = vf.limit;
      std::string report;
      const std::size_t bad = run_verify(vf.cfg, &report);
      report += bad == 0 ? "all variants match the sequential-scan oracle\n"
                         : "MISMATCHES: " + std::to_string(bad) + "\n";
      write_text(vf.out, report);
      return bad == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
