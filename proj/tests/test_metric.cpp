#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "wlsh/metric.hpp"

using namespace wlsh;

TEST_CASE("weighted l_p distance agrees with a scalar loop") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coord(-50, 50);
  for (double p : {0.5, 1.0, 1.5, 2.0}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t d = 1 + trial % 17;
      const auto w = oracle::random_weights(rng, d, 0.1, 5.0);
      std::vector<std::int32_t> x(d), y(d);
      for (auto& v : x) v = coord(rng);
      for (auto& v : y) v = coord(rng);
      const double got = weighted_distance(Metric::lp(p), std::span<const double>(w),
                                           std::span<const std::int32_t>(x),
                                           std::span<const std::int32_t>(y));
      CHECK(got == doctest::Approx(oracle::lp_distance(w, x, y, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighting is applied before the distance") {
  const std::vector<double> w{2.0, 0.5};
  const std::vector<double> x{1.0, 4.0}, y{4.0, 0.0};
  // W o x - W o y = (-6, 2)
  CHECK(weighted_distance(Metric::lp(1), std::span<const double>(w), std::span<const double>(x),
                          std::span<const double>(y)) == doctest::Approx(8.0));
  CHECK(weighted_distance(Metric::lp(2), std::span<const double>(w), std::span<const double>(x),
                          std::span<const double>(y)) == doctest::Approx(std::sqrt(40.0)));
}

TEST_CASE("Hamming and angular distances") {
  const std::vector<double> w{1.0, 2.0, 3.0};
  const std::vector<double> a{1, 0, 1}, b{0, 0, 0}, c{1, 1, 0};
  CHECK(weighted_distance(Metric::hamming(), std::span<const double>(w),
                          std::span<const double>(a), std::span<const double>(c)) == 5.0);
  const std::vector<double> bad{2, 0, 0};
  CHECK_THROWS_AS(weighted_distance(Metric::hamming(), std::span<const double>(w),
                                    std::span<const double>(bad), std::span<const double>(a)),
                  ConfigError);
  const std::vector<double> e1{1, 0, 0}, e2{0, 1, 0};
  CHECK(weighted_distance(Metric::angular(), std::span<const double>(w),
                          std::span<const double>(e1), std::span<const double>(e2)) ==
        doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(weighted_distance(Metric::angular(), std::span<const double>(w),
                                    std::span<const double>(b), std::span<const double>(a)),
                  ConfigError);
}

TEST_CASE("metric and weight validation") {
  CHECK_THROWS_AS(Metric::lp(0.0), ConfigError);
  CHECK_THROWS_AS(Metric::lp(2.5), ConfigError);
  CHECK_NOTHROW(validate_weights({0, {1.0, 0.1}}));
  CHECK_THROWS_AS(validate_weights({0, {1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(validate_weights({0, {1.0, -2.0}}), ConfigError);
  CHECK_THROWS_AS(validate_weights({0, {std::nan("")}}), ConfigError);
  CHECK_THROWS_AS(validate_weights({0, {}}), ConfigError);
  const std::vector<double> w{1.0, 1.0};
  const std::vector<double> x{1.0}, y{1.0, 2.0};
  CHECK_THROWS_AS(weighted_distance(Metric::lp(1), std::span<const double>(w),
                                    std::span<const double>(x), std::span<const double>(y)),
                  ConfigError);
}

TEST_CASE("dataset binary and text round trips") {
  const Dataset ds(3, {0, 9}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 0, 0, 0});
  CHECK(ds.size() == 4);
  std::stringstream buf;
  write_dataset(buf, ds);
  const Dataset back = read_dataset(buf);
  CHECK(back.coords() == ds.coords());
  CHECK(back.digest() == ds.digest());
  CHECK(back.range().hi == 9);

  std::istringstream text("1 2 3\n4 5 6\n");
  const Dataset t = parse_text_dataset(text);
  CHECK(t.size() == 2);
  CHECK(t.dim() == 3);
  std::istringstream ragged("1 2 3\n4 5\n");
  CHECK_THROWS_AS(parse_text_dataset(ragged), IoError);

  const Dataset other(3, {0, 9}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 0, 0, 1});
  CHECK(other.digest() != ds.digest());
  CHECK_THROWS_AS(Dataset(3, {0, 9}, {1, 2}), ConfigError);
  CHECK_THROWS_AS(Dataset(1, {0, 9}, {10}), ConfigError);
}

TEST_CASE("brute-force k-NN matches a full sort") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coord(0, 20);
  std::vector<std::int32_t> coords(300 * 4);
  for (auto& v : coords) v = coord(rng);
  const Dataset ds(4, {0, 20}, coords);
  const WeightVector w{0, oracle::random_weights(rng, 4)};
  const std::vector<double> q{3, 7, 11, 19};
  for (double p : {1.0, 2.0}) {
    const auto got = brute_force_knn(ds, Metric::lp(p), w, q, 15);
    std::vector<Neighbor> all;
    for (std::uint32_t i = 0; i < ds.size(); ++i) {
      all.push_back({i, oracle::lp_distance(w.weights, ds.row(i), q, p)});
    }
    std::sort(all.begin(), all.end());
    REQUIRE(got.size() == 15);
    for (std::size_t i = 0; i < 15; ++i) {
      CHECK(got[i].distance == doctest::Approx(all[i].distance).epsilon(1e-12));
    }
    CHECK(std::is_sorted(got.begin(), got.end()));
  }
  CHECK_THROWS_AS(brute_force_knn(ds, Metric::lp(1), w, q, 0), ConfigError);
}
