#include "wlsh/metric.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "wlsh/binary_io.hpp"

namespace wlsh {

namespace {
constexpr std::string_view kDatasetMagic = "WLSHDATA";
constexpr std::uint32_t kDatasetVersion = 1;
}  // namespace

Metric Metric::lp(double p) {
  if (!(p > 0.0 && p <= 2.0)) {
    throw ConfigError("l_p metric requires 0 < p <= 2, got " + std::to_string(p));
  }
  return {Kind::kLp, p};
}

std::string Metric::name() const {
  switch (kind) {
    case Kind::kLp: {
      std::ostringstream os;
      os << "l" << p;
      return os.str();
    }
    case Kind::kHamming:
      return "hamming";
    case Kind::kAngular:
      return "angular";
  }
  return "?";
}

void validate_weights(const WeightVector& w) {
  if (w.weights.empty()) throw ConfigError("empty weight vector");
  for (double v : w.weights) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("weight vector " + std::to_string(w.id) +
                        " has a nonpositive weight");
    }
  }
}

Dataset::Dataset(std::size_t d, ValueRange range, std::vector<std::int32_t> coords)
    : d_(d), range_(range), coords_(std::move(coords)) {
  if (d_ == 0) throw ConfigError("dataset dimensionality must be positive");
  if (coords_.size() % d_ != 0) throw ConfigError("coordinate count is not a multiple of d");
  if (range_.hi < range_.lo) throw ConfigError("dataset value range is inverted");
  n_ = coords_.size() / d_;
  for (std::int32_t v : coords_) {
    if (v < range_.lo || v > range_.hi) {
      throw ConfigError("dataset coordinate " + std::to_string(v) +
                        " outside declared value range");
    }
  }
}

Point Dataset::point(std::size_t i) const {
  auto r = row(i);
  return {static_cast<std::uint32_t>(i), std::vector<double>(r.begin(), r.end())};
}

std::uint64_t Dataset::digest() const {
  io::Fnv1a h;
  h.update(static_cast<std::uint64_t>(n_));
  h.update(static_cast<std::uint64_t>(d_));
  h.update(range_.lo);
  h.update(range_.hi);
  h.update(coords_.data(), coords_.size() * sizeof(std::int32_t));
  return h.value();
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  io::put_magic(out, kDatasetMagic);
  io::put<std::uint32_t>(out, kDatasetVersion);
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(ds.size()));
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(ds.dim()));
  io::put<std::int32_t>(out, ds.range().lo);
  io::put<std::int32_t>(out, ds.range().hi);
  io::put_span<std::int32_t>(out, ds.coords());
}

Dataset read_dataset(std::istream& in) {
  io::expect_magic(in, kDatasetMagic);
  const auto version = io::get<std::uint32_t>(in);
  if (version != kDatasetVersion) throw IoError("unsupported dataset version");
  const auto n = io::get<std::uint32_t>(in);
  const auto d = io::get<std::uint32_t>(in);
  ValueRange range;
  range.lo = io::get<std::int32_t>(in);
  range.hi = io::get<std::int32_t>(in);
  auto coords = io::get_vector<std::int32_t>(in, static_cast<std::size_t>(n) * d);
  return Dataset(d, range, std::move(coords));
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_dataset(out, ds);
  if (!out) throw IoError("write failed: " + path);
}

Dataset parse_text_dataset(std::istream& in) {
  std::vector<std::int32_t> coords;
  std::size_t d = 0;
  std::int32_t lo = std::numeric_limits<std::int32_t>::max();
  std::int32_t hi = std::numeric_limits<std::int32_t>::min();
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::size_t count = 0;
    long long v;
    while (ls >> v) {
      if (v < std::numeric_limits<std::int32_t>::min() ||
          v > std::numeric_limits<std::int32_t>::max()) {
        throw IoError("coordinate out of 32-bit range");
      }
      coords.push_back(static_cast<std::int32_t>(v));
      lo = std::min<std::int32_t>(lo, static_cast<std::int32_t>(v));
      hi = std::max<std::int32_t>(hi, static_cast<std::int32_t>(v));
      ++count;
    }
    if (!ls.eof()) throw IoError("non-integer token in text dataset");
    if (count == 0) continue;
    if (d == 0) d = count;
    if (count != d) throw IoError("ragged text dataset");
  }
  if (d == 0) throw IoError("empty text dataset");
  return Dataset(d, {lo, hi}, std::move(coords));
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string head(kDatasetMagic.size(), '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  in.clear();
  in.seekg(0);
  if (head == kDatasetMagic) return read_dataset(in);
  return parse_text_dataset(in);
}

double weighted_distance(const Metric& metric, const WeightVector& w, const Point& x,
                         const Point& y) {
  validate_weights(w);
  return weighted_distance<double, double>(metric, w.weights, x.coords, y.coords);
}

std::vector<Neighbor> brute_force_knn(const Dataset& ds, const Metric& metric,
                                      const WeightVector& w, std::span<const double> q,
                                      std::size_t k) {
  if (k == 0 || k > ds.size()) throw ConfigError("brute_force_knn requires 1 <= k <= n");
  if (q.size() != ds.dim() || w.dim() != ds.dim()) {
    throw ConfigError("dimensionality mismatch in brute_force_knn");
  }
  std::vector<Neighbor> all(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    all[i] = {static_cast<std::uint32_t>(i),
              weighted_distance<std::int32_t, double>(metric, w.weights, ds.row(i), q)};
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  all.resize(k);
  return all;
}

}  // namespace wlsh
