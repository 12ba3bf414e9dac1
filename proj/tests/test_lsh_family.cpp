#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "wlsh/lsh_family.hpp"

using namespace wlsh;

namespace {

// Pair (x, y) whose weighted l_p distance under w is exactly r.
std::pair<std::vector<double>, std::vector<double>> pair_at(std::mt19937_64& rng,
                                                            const std::vector<double>& w,
                                                            double p, double r) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  const std::size_t d = w.size();
  std::vector<double> x(d), delta(d), y(d);
  for (auto& v : x) v = u(rng);
  for (auto& v : delta) v = g(rng);
  std::vector<double> zero(d, 0.0);
  const double len = oracle::lp_distance(w, delta, zero, p);
  for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + delta[i] * r / len;
  return {x, y};
}

double collision_frequency(double p, double w_bucket, int levels, double r, int trials,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const WeightVector base{0, oracle::random_weights(rng, 8)};
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const auto [x, y] = pair_at(rng, base.weights, p, r);
    const auto f = sample_hash_function(p, 8, w_bucket, levels, 3, base, mix_seed(seed, t));
    hits += hash_bucket(f, std::span<const double>(x)) == hash_bucket(f, std::span<const double>(y));
  }
  return static_cast<double>(hits) / trials;
}

}  // namespace

TEST_CASE("quadrature collision probability matches the closed forms") {
  for (double w : {0.3, 1.0, 4.0}) {
    for (double r : {0.01, 0.2, 1.0, 3.0, 50.0}) {
      CHECK(CollisionProbability::lp(1, w)(r) == doctest::Approx(oracle::p_l1(w, r)).epsilon(1e-9));
      CHECK(CollisionProbability::lp(2, w)(r) == doctest::Approx(oracle::p_l2(w, r)).epsilon(1e-9));
    }
  }
  // 40-digit reference values at w/r = 1, 0.5, 2, 10
  CHECK(std::abs(CollisionProbability::lp(1, 1)(1) - 0.27936439984734841) < 1e-10);
  CHECK(std::abs(CollisionProbability::lp(2, 1)(1) - 0.36874638037250724) < 1e-10);
  CHECK(std::abs(CollisionProbability::lp(1, 1)(2) - 0.15310963845792063) < 1e-10);
  CHECK(std::abs(CollisionProbability::lp(2, 2)(1) - 0.60954842221539696) < 1e-10);
  CHECK(std::abs(CollisionProbability::lp(1, 10)(1) - 0.78964511649487101) < 1e-10);
  CHECK(std::abs(CollisionProbability::lp(2, 10)(1) - 0.92021154391971346) < 1e-10);
}

TEST_CASE("quadrature holds across a dense sweep of w/r") {
  // includes exact small integers and halves, where coarse Simpson estimates can agree by accident
  std::vector<double> ratios;
  for (int i = 0; i <= 3000; ++i) ratios.push_back(std::pow(10.0, -3.0 + 6.0 * i / 3000));
  for (int i = 1; i <= 64; ++i) ratios.push_back(0.5 * i);
  double worst1 = 0.0, worst2 = 0.0;
  for (double s : ratios) {
    worst1 = std::max(worst1, std::abs(CollisionProbability::lp(1, s)(1.0) - oracle::p_l1(s, 1.0)));
    worst2 = std::max(worst2, std::abs(CollisionProbability::lp(2, s)(1.0) - oracle::p_l2(s, 1.0)));
  }
  CHECK(worst1 < 1e-8);
  CHECK(worst2 < 1e-8);
}

TEST_CASE("collision probability decreases with distance") {
  for (double p : {0.7, 1.0, 1.5, 2.0}) {
    const auto cp = CollisionProbability::lp(p, 1.0);
    double prev = 1.0;
    for (double r = 0.05; r < 40.0; r *= 1.3) {
      const double v = cp(r);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(CollisionProbability::lp(1, 1)(0.0), ConfigError);
  CHECK_THROWS_AS(CollisionProbability::lp(1, 0.0), ConfigError);
}

TEST_CASE("Cauchy and Gaussian samplers") {
  StableSampler cauchy(1.0, 3);
  std::vector<double> abs_draws(100001);
  for (auto& v : abs_draws) v = std::abs(cauchy());
  std::nth_element(abs_draws.begin(), abs_draws.begin() + 50000, abs_draws.end());
  // median of |Cauchy| is tan(pi/4) = 1
  CHECK(abs_draws[50000] == doctest::Approx(1.0).epsilon(0.02));

  StableSampler normal(2.0, 4);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = normal();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / 1e5) < 0.02);
  CHECK(sq / 1e5 == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(StableSampler(0.0, 1), ConfigError);
  CHECK_THROWS_AS(StableSampler(2.1, 1), ConfigError);
}

TEST_CASE("stable CDF oracle agrees with scipy and with Fourier inversion") {
  // scipy.stats.levy_stable.cdf(x, 1.3, 0)
  const std::pair<double, double> ref[] = {
      {0.25, 0.572758265411}, {1.0, 0.754515242399}, {2.5, 0.910752007907}, {6.0, 0.973553483972}};
  for (auto [x, f] : ref) {
    CHECK(oracle::stable_cdf(1.3, x) == doctest::Approx(f).epsilon(1e-6));
    CHECK(oracle::stable_cdf_fourier(1.3, x) == doctest::Approx(f).epsilon(1e-5));
    CHECK(oracle::stable_cdf(1.3, -x) == doctest::Approx(1.0 - f).epsilon(1e-6));
  }
}

TEST_CASE("Chambers-Mallows-Stuck draws pass a KS test at p = 1.3") {
  StableSampler s(1.3, 99);
  const std::size_t n = 50000;
  std::vector<double> draws(n);
  for (auto& v : draws) v = s();
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; i += 25) {
    if (std::abs(draws[i]) > 40.0) continue;
    const double f = oracle::stable_cdf(1.3, draws[i]);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n),
                   std::abs(f - static_cast<double>(i + 1) / n)});
  }
  // 1% critical value is 1.63 / sqrt(n)
  CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("empirical collision frequency matches P(r)") {
  for (double p : {1.0, 1.5, 2.0}) {
    const auto cp = CollisionProbability::lp(p, 2.0);
    for (double r : {0.5, 2.0, 6.0}) {
      const double freq = collision_frequency(p, 2.0, 0, r, 20000, 17);
      CHECK(std::abs(freq - cp(r)) < 0.015);
    }
  }
  // the widened offset range keeps the level-1 probability
  const double wide = collision_frequency(1.0, 2.0, 4, 2.0, 20000, 18);
  CHECK(std::abs(wide - CollisionProbability::lp(1, 2.0)(2.0)) < 0.015);
}

TEST_CASE("hash function evaluation, offsets and persistence") {
  std::mt19937_64 rng(5);
  const WeightVector base{0, oracle::random_weights(rng, 6)};
  for (int t = 0; t < 200; ++t) {
    const auto f = sample_hash_function(1.0, 6, 1.5, 3, 3, base, mix_seed(1, t));
    CHECK(f.b_star >= 0.0);
    CHECK(f.b_star <= 27.0 * 1.5);
    std::vector<double> x(6);
    for (auto& v : x) v = std::uniform_real_distribution<double>(-50, 50)(rng);
    long double proj = 0.0L;
    for (std::size_t i = 0; i < 6; ++i) proj += static_cast<long double>(f.a[i]) * base.weights[i] * x[i];
    const auto want = static_cast<std::int64_t>(std::floor((proj + f.b_star) / 1.5L));
    CHECK(hash_bucket(f, std::span<const double>(x)) == want);
  }
  const auto f = sample_hash_function(2.0, 6, 1.5, 2, 3, base, 77);
  const auto g = sample_hash_function(2.0, 6, 1.5, 2, 3, base, 77);
  CHECK(f.a == g.a);
  CHECK(f.b_star == g.b_star);
  std::stringstream buf;
  write_hash_function(buf, f);
  const auto back = read_hash_function(buf, base.weights);
  CHECK(back.a == f.a);
  CHECK(back.b_star == f.b_star);
  CHECK(back.w == f.w);
  CHECK_THROWS_AS(sample_hash_function(1.0, 6, 0.0, 0, 3, base, 1), ConfigError);
  CHECK_THROWS_AS(sample_hash_function(1.0, 5, 1.0, 0, 3, base, 1), ConfigError);
}

TEST_CASE("level buckets are floors and nest across levels") {
  CHECK(level_bucket(7, 3) == 2);
  CHECK(level_bucket(-1, 3) == -1);
  CHECK(level_bucket(-3, 3) == -1);
  CHECK(level_bucket(-4, 3) == -2);
  for (std::int64_t h = -200; h <= 200; ++h) {
    for (std::int64_t l : {1, 3, 9, 27}) {
      CHECK(level_bucket(h, l) == static_cast<std::int64_t>(std::floor(static_cast<double>(h) / l)));
      CHECK(level_bucket(level_bucket(h, l), 3) == level_bucket(h, 3 * l));
    }
  }
}

TEST_CASE("Hamming and angular families collide at the stated rates") {
  std::mt19937_64 rng(21);
  const WeightVector base{0, oracle::random_weights(rng, 10)};
  double wsum = 0.0;
  for (double v : base.weights) wsum += v;
  const std::vector<double> x{1, 0, 1, 1, 0, 0, 1, 0, 1, 0};
  const std::vector<double> y{1, 1, 0, 1, 0, 1, 1, 0, 0, 0};
  const double dist = weighted_distance(Metric::hamming(), std::span<const double>(base.weights),
                                        std::span<const double>(x), std::span<const double>(y));
  int hits = 0;
  for (int t = 0; t < 20000; ++t) {
    const auto f = sample_hamming_hash(base, mix_seed(2, t));
    hits += hamming_hash(f, std::span<const double>(x)) == hamming_hash(f, std::span<const double>(y));
  }
  CHECK(std::abs(hits / 20000.0 - CollisionProbability::hamming(wsum)(dist)) < 0.015);

  const std::vector<double> a{1, 2, -1, 0.5, 3, 1, 0, 2, -2, 1};
  const std::vector<double> b{2, -1, 1, 0.5, 1, 0, 1, 2, 2, -1};
  const double theta = weighted_distance(Metric::angular(), std::span<const double>(base.weights),
                                         std::span<const double>(a), std::span<const double>(b));
  hits = 0;
  for (int t = 0; t < 20000; ++t) {
    const auto f = sample_angular_hash(base, mix_seed(3, t));
    hits += angular_hash(f, std::span<const double>(a)) == angular_hash(f, std::span<const double>(b));
  }
  CHECK(std::abs(hits / 20000.0 - CollisionProbability::angular()(theta)) < 0.015);
}

TEST_CASE("seed mixing separates streams") {
  CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
}
