#include "metsky/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "metsky/rng.hpp"

namespace metsky {

namespace {

constexpr double kMaxVertexGap = 0.1 * 1.4142135623730951;  // 10% of the unit-square diagonal

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path,
                             std::size_t record, const std::string& what) {
  throw std::runtime_error("load_dataset(" + path.string() + "): record " +
                           std::to_string(record) + ": " + what);
}

// Whitespace-splitting field reader over one line.
struct FieldReader {
  const char* cur;
  const char* end;

  explicit FieldReader(const std::string& line)
      : cur(line.data()), end(line.data() + line.size()) {}

  bool next_double(double& out) {
    while (cur != end && (*cur == ' ' || *cur == '\t')) ++cur;
    if (cur == end) return false;
    auto [ptr, ec] = std::from_chars(cur, end, out);
    if (ec != std::errc()) return false;
    cur = ptr;
    return true;
  }

  bool next_u64(std::uint64_t& out) {
    while (cur != end && (*cur == ' ' || *cur == '\t')) ++cur;
    if (cur == end) return false;
    auto [ptr, ec] = std::from_chars(cur, end, out);
    if (ec != std::errc()) return false;
    cur = ptr;
    return true;
  }

  bool at_end() {
    while (cur != end && (*cur == ' ' || *cur == '\t' || *cur == '\r')) ++cur;
    return cur == end;
  }
};

}  // namespace

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.kind != b.kind || a.dimension != b.dimension || a.seed != b.seed ||
      a.objects.size() != b.objects.size())
    return false;
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    if (a.objects[i].id != b.objects[i].id ||
        a.objects[i].values != b.objects[i].values)
      return false;
  }
  return true;
}

Dataset generate_polygons(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_polygons: n must be >= 1");
  Dataset ds;
  ds.kind = ObjectKind::Polygon;
  ds.dimension = 0;
  ds.seed = seed;
  ds.objects.reserve(n);
  Rng rng(seed);
  const double r = kMaxVertexGap;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = 5 + static_cast<std::size_t>(rng.next_below(11));
    MetricObject obj;
    obj.id = i;
    obj.values.reserve(2 * k);
    double px = rng.next_unit();
    double py = rng.next_unit();
    obj.values.push_back(px);
    obj.values.push_back(py);
    for (std::size_t j = 1; j < k; ++j) {
      double x, y;
      for (;;) {
        x = px + (2.0 * rng.next_unit() - 1.0) * r;
        y = py + (2.0 * rng.next_unit() - 1.0) * r;
        const double dx = x - px;
        const double dy = y - py;
        if (x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0 &&
            dx * dx + dy * dy <= r * r)
          break;
      }
      obj.values.push_back(x);
      obj.values.push_back(y);
      px = x;
      py = y;
    }
    ds.objects.push_back(std::move(obj));
  }
  return ds;
}

Dataset generate_vectors(std::size_t n, std::uint32_t dim,
                         std::size_t clusters, double spread,
                         std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_vectors: n must be >= 1");
  if (dim == 0) throw std::invalid_argument("generate_vectors: dim must be >= 1");
  if (clusters == 0)
    throw std::invalid_argument("generate_vectors: clusters must be >= 1");
  if (spread < 0.0)
    throw std::invalid_argument("generate_vectors: spread must be >= 0");
  Dataset ds;
  ds.kind = ObjectKind::Vector;
  ds.dimension = dim;
  ds.seed = seed;
  ds.objects.reserve(n);
  Rng rng(seed);
  std::vector<double> centers(clusters * dim);
  for (auto& c : centers) c = rng.next_unit();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = static_cast<std::size_t>(rng.next_below(clusters));
    MetricObject obj;
    obj.id = i;
    obj.values.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j)
      obj.values[j] = clamp01(centers[c * dim + j] + spread * rng.next_gaussian());
    ds.objects.push_back(std::move(obj));
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::string out;
  out.reserve(ds.size() * 64);
  if (ds.kind == ObjectKind::Vector) {
    out += "VEC " + std::to_string(ds.dimension) + " " +
           std::to_string(ds.size()) + " " + std::to_string(ds.seed) + "\n";
    for (const auto& o : ds.objects) {
      for (std::size_t j = 0; j < o.values.size(); ++j) {
        if (j) out += ' ';
        append_double(out, o.values[j]);
      }
      out += '\n';
    }
  } else {
    out += "POLY " + std::to_string(ds.size()) + " " +
           std::to_string(ds.seed) + "\n";
    for (const auto& o : ds.objects) {
      out += std::to_string(o.vertex_count());
      for (double v : o.values) {
        out += ' ';
        append_double(out, v);
      }
      out += '\n';
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_dataset: cannot open " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("save_dataset: write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_dataset: cannot open " + path.string());
  std::string header;
  if (!std::getline(f, header))
    throw std::runtime_error("load_dataset(" + path.string() + "): empty file");

  Dataset ds;
  std::uint64_t n = 0;
  {
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag == "VEC") {
      ds.kind = ObjectKind::Vector;
      if (!(hs >> ds.dimension >> n >> ds.seed) || ds.dimension == 0)
        throw std::runtime_error("load_dataset(" + path.string() +
                                 "): malformed VEC header");
    } else if (tag == "POLY") {
      ds.kind = ObjectKind::Polygon;
      ds.dimension = 0;
      if (!(hs >> n >> ds.seed))
        throw std::runtime_error("load_dataset(" + path.string() +
                                 "): malformed POLY header");
    } else {
      throw std::runtime_error("load_dataset(" + path.string() +
                               "): unknown header tag '" + tag + "'");
    }
  }

  ds.objects.reserve(n);
  std::string line;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!std::getline(f, line))
      parse_fail(path, i, "file truncated (expected " + std::to_string(n) +
                              " records)");
    FieldReader fr(line);
    MetricObject obj;
    obj.id = i;
    if (ds.kind == ObjectKind::Vector) {
      obj.values.resize(ds.dimension);
      for (std::uint32_t j = 0; j < ds.dimension; ++j)
        if (!fr.next_double(obj.values[j]))
          parse_fail(path, i, "expected " + std::to_string(ds.dimension) +
                                  " coordinates");
    } else {
      std::uint64_t k = 0;
      if (!fr.next_u64(k)) parse_fail(path, i, "missing vertex count");
      if (k < 5 || k > 15)
        parse_fail(path, i, "vertex count " + std::to_string(k) +
                                " outside [5, 15]");
      obj.values.resize(2 * k);
      for (std::uint64_t j = 0; j < 2 * k; ++j)
        if (!fr.next_double(obj.values[j]))
          parse_fail(path, i, "expected " + std::to_string(2 * k) +
                                  " vertex coordinates");
    }
    if (!fr.at_end()) parse_fail(path, i, "trailing data on record line");
    ds.objects.push_back(std::move(obj));
  }
  while (std::getline(f, line))
    if (line.find_first_not_of(" \t\r\n") != std::string::npos)
      throw std::runtime_error("load_dataset(" + path.string() +
                               "): trailing data after record " +
                               std::to_string(n - 1));
  return ds;
}

}  // namespace metsky
