#include "wlsh/lsh_family.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>

#include "wlsh/binary_io.hpp"
#include "wlsh/quadrature.hpp"

namespace wlsh {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

StableSampler::StableSampler(double p, std::uint64_t seed) : p_(p), rng_(seed) {
  if (!(p > 0.0 && p <= 2.0)) throw ConfigError("p-stable sampler requires 0 < p <= 2");
}

double StableSampler::operator()() {
  if (p_ == 2.0) return normal_(rng_);
  if (p_ == 1.0) return cauchy_(rng_);
  // Chambers-Mallows-Stuck, symmetric case.
  constexpr double kPi = std::numbers::pi;
  double v, cos_v, e;
  do {
    v = kPi * (uniform_(rng_) - 0.5);
    cos_v = std::cos(v);
  } while (cos_v <= 0.0);
  do {
    e = exponential_(rng_);
  } while (e <= 0.0);
  const double alpha = p_;
  return std::sin(alpha * v) / std::pow(cos_v, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / e, (1.0 - alpha) / alpha);
}

LpHashFunction sample_hash_function(double p, std::size_t d, double w, int b_range_levels,
                                    int c, const WeightVector& base, std::uint64_t seed) {
  if (!(w > 0.0)) throw ConfigError("bucket width must be positive");
  if (c < 2) throw ConfigError("approximation ratio c must be an integer >= 2");
  if (b_range_levels < 0) throw ConfigError("b_range_levels must be nonnegative");
  if (base.dim() != d) throw ConfigError("base weight vector dimensionality mismatch");
  StableSampler sampler(p, seed);
  LpHashFunction f;
  f.a.resize(d);
  for (auto& v : f.a) v = sampler();
  f.w = w;
  f.base_weights = base.weights;
  const double b_max = std::pow(static_cast<double>(c), b_range_levels) * w;
  std::mt19937_64 rng(mix_seed(seed, 0xb5ULL));
  f.b_star = std::uniform_real_distribution<double>(0.0, b_max)(rng);
  return f;
}

void write_hash_function(std::ostream& out, const LpHashFunction& f) {
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(f.dim()));
  io::put<double>(out, f.w);
  io::put<double>(out, f.b_star);
  io::put_span<double>(out, f.a);
}

LpHashFunction read_hash_function(std::istream& in, std::span<const double> base_weights) {
  LpHashFunction f;
  const auto d = io::get<std::uint32_t>(in);
  if (d != base_weights.size()) throw IoError("hash function dimensionality mismatch");
  f.w = io::get<double>(in);
  f.b_star = io::get<double>(in);
  f.a = io::get_vector<double>(in, d);
  f.base_weights.assign(base_weights.begin(), base_weights.end());
  return f;
}

namespace detail {

// Sorted |X| samples plus prefix sums, so that
//   P(r) = E[max(0, 1 - |X| r / w)]
// and its standard error are O(log N) lookups.
struct StableSampleTable {
  static constexpr std::size_t kSamples = 400000;

  std::vector<double> sorted;
  std::vector<double> prefix;     // prefix[i] = sum of sorted[0..i)
  std::vector<double> prefix_sq;  // same for squares

  explicit StableSampleTable(double p) {
    StableSampler sampler(p, mix_seed(0x57ab1eULL, static_cast<std::uint64_t>(p * 1e6)));
    sorted.resize(kSamples);
    for (auto& v : sorted) v = std::abs(sampler());
    std::sort(sorted.begin(), sorted.end());
    prefix.assign(kSamples + 1, 0.0);
    prefix_sq.assign(kSamples + 1, 0.0);
    for (std::size_t i = 0; i < kSamples; ++i) {
      prefix[i + 1] = prefix[i] + sorted[i];
      prefix_sq[i + 1] = prefix_sq[i] + sorted[i] * sorted[i];
    }
  }

  ProbabilityEstimate estimate(double s) const {
    const auto k = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), s) - sorted.begin());
    const double n = static_cast<double>(kSamples);
    const double cnt = static_cast<double>(k);
    const double mean = (cnt - prefix[k] / s) / n;
    const double second = (cnt - 2.0 * prefix[k] / s + prefix_sq[k] / (s * s)) / n;
    const double var = std::max(0.0, second - mean * mean) * n / (n - 1.0);
    return {mean, std::sqrt(var / n)};
  }
};

namespace {
std::shared_ptr<const StableSampleTable> stable_table(double p) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const StableSampleTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[p];
  if (!slot) slot = std::make_shared<const StableSampleTable>(p);
  return slot;
}
}  // namespace

}  // namespace detail

CollisionProbability CollisionProbability::lp(double p, double bucket_width) {
  CollisionProbability cp;
  cp.metric_ = Metric::lp(p);
  if (!(bucket_width > 0.0)) throw ConfigError("bucket width must be positive");
  cp.w_ = bucket_width;
  if (p != 1.0 && p != 2.0) cp.table_ = detail::stable_table(p);
  return cp;
}

CollisionProbability CollisionProbability::hamming(double weight_sum) {
  if (!(weight_sum > 0.0)) throw ConfigError("Hamming weight sum must be positive");
  CollisionProbability cp;
  cp.metric_ = Metric::hamming();
  cp.weight_sum_ = weight_sum;
  return cp;
}

CollisionProbability CollisionProbability::angular() {
  CollisionProbability cp;
  cp.metric_ = Metric::angular();
  return cp;
}

ProbabilityEstimate CollisionProbability::estimate(double r) const {
  if (!(r > 0.0)) throw ConfigError("collision probability requires r > 0");
  switch (metric_.kind) {
    case Metric::Kind::kHamming:
      return {std::max(0.0, 1.0 - r / weight_sum_), 0.0};
    case Metric::Kind::kAngular:
      return {std::max(0.0, 1.0 - r / std::numbers::pi), 0.0};
    case Metric::Kind::kLp:
      break;
  }
  // Substituting u = t / r:  P = int_0^{w/r} f(u) (1 - u r / w) du.
  const double s = w_ / r;
  if (table_) return table_->estimate(s);
  double value;
  if (metric_.p == 1.0) {
    value = numeric::adaptive_simpson(
        [s](double u) { return 2.0 / (std::numbers::pi * (1.0 + u * u)) * (1.0 - u / s); },
        0.0, s);
  } else {
    const double c = std::sqrt(2.0 / std::numbers::pi);
    value = numeric::adaptive_simpson(
        [s, c](double u) { return c * std::exp(-0.5 * u * u) * (1.0 - u / s); }, 0.0, s);
  }
  return {value, 0.0};
}

HammingHashFunction sample_hamming_hash(const WeightVector& base, std::uint64_t seed) {
  validate_weights(base);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(base.weights.begin(), base.weights.end());
  HammingHashFunction f;
  f.coordinate = pick(rng);
  f.weight = base.weights[f.coordinate];
  return f;
}

AngularHashFunction sample_angular_hash(const WeightVector& base, std::uint64_t seed) {
  validate_weights(base);
  StableSampler sampler(2.0, seed);
  AngularHashFunction f;
  f.u.resize(base.dim());
  for (auto& v : f.u) v = sampler();
  f.base_weights = base.weights;
  return f;
}

}  // namespace wlsh
