#include <doctest.h>

#include "support.hpp"
#include "wlsh/params.hpp"

using namespace wlsh;

namespace {

struct BetaCase {
  double p1, p2;
  std::size_t n;
  int beta;
  double mu;
};

const BetaCase kCases[] = {
#include "oracle/beta_mu_cases.inc"
};

int self_beta_at(double p, int c, std::size_t n) {
  std::mt19937_64 rng(n + c);
  const auto ctx = SolverContext::make(p, c, n, {0, 10000});
  return self_beta(oracle::random_weights(rng, 16), ctx);
}

}  // namespace

TEST_CASE("beta and mu against high-precision reference values") {
  const BetaMu bm = beta_mu(0.5, 0.3, 100000);
  CHECK(bm.beta == 301);
  CHECK(bm.mu == doctest::Approx(124.15108092855356).epsilon(1e-12));
  CHECK(bm.z == doctest::Approx(1.2847237048610844).epsilon(1e-12));
  for (const auto& c : kCases) {
    CAPTURE(c.p1);
    CAPTURE(c.p2);
    CAPTURE(c.n);
    const BetaMu got = beta_mu(c.p1, c.p2, c.n);
    CHECK(got.beta == c.beta);
    CHECK(std::abs(got.mu - c.mu) <= 1e-9 * std::max(1.0, c.mu));
  }
}

TEST_CASE("self-based table counts match the reference naive counts") {
  CHECK(self_beta_at(1, 3, 400000) == 432);
  CHECK(self_beta_at(2, 3, 400000) == 236);
  CHECK(self_beta_at(1, 2, 400000) == 830);
  CHECK(self_beta_at(2, 2, 400000) == 441);
  const int sift[] = {300, 256, 236, 224, 216};
  for (int i = 0; i < 5; ++i) CHECK(self_beta_at(1, 5 + 2 * i, 994411) == sift[i]);
  CHECK(self_beta_at(1, 3, 10000) == 323);
  CHECK(self_beta_at(2, 3, 10000) == 177);
}

TEST_CASE("table count trends in c and n") {
  CHECK(self_beta_at(1, 6, 400000) < self_beta_at(1, 2, 400000));
  CHECK(self_beta_at(2, 6, 400000) < self_beta_at(2, 2, 400000));
  CHECK(self_beta_at(1, 3, 1600000) > self_beta_at(1, 3, 100000));
  CHECK(self_beta_at(2, 3, 1600000) > self_beta_at(2, 3, 100000));
}

TEST_CASE("beta_mu argument checks and gamma clamp") {
  CHECK_THROWS_AS(beta_mu(0.3, 0.5, 1000), ConfigError);
  CHECK_THROWS_AS(beta_mu(0.5, 0.0, 1000), ConfigError);
  CHECK_THROWS_AS(beta_mu(1.0, 0.5, 1000), ConfigError);
  CHECK_THROWS_AS(beta_mu(0.5, 0.3, 0.0, 0.1), ConfigError);
  CHECK(default_gamma(1000) == doctest::Approx(0.1));
  CHECK(default_gamma(10) == 1.0);
  CHECK(default_gamma(4000000000ULL) == 1e-7);
}

TEST_CASE("nearly equal collision probabilities saturate beta") {
  const auto bm = beta_mu(0.21336687755932859, 0.2133348343949017, 10000);
  CHECK(bm.beta == std::numeric_limits<int>::max());
  CHECK(bm.mu > 0.0);
}

TEST_CASE("ceil_log and radius profile") {
  CHECK(ceil_log(1.0, 3) == 0);
  CHECK(ceil_log(0.5, 3) == 0);
  CHECK(ceil_log(3.0, 3) == 1);
  CHECK(ceil_log(3.0001, 3) == 2);
  CHECK(ceil_log(81.0, 3) == 4);
  for (double ratio = 1.1; ratio < 1e6; ratio *= 1.7) {
    const int L = ceil_log(ratio, 2);
    CHECK(std::pow(2.0, L) >= ratio);
    CHECK(std::pow(2.0, L - 1) < ratio);
  }
  const std::vector<double> w{2.0, 0.5, 1.0};
  const auto prof = radius_profile({0, 10}, w, 1.0, 3);
  CHECK(prof.r_min == 0.5);
  CHECK(prof.r_max == doctest::Approx(35.0));
  CHECK(prof.levels == 4);  // 70 needs 3^4
  const auto prof2 = radius_profile({0, 10}, w, 2.0, 3);
  CHECK(prof2.r_max == doctest::Approx(std::sqrt(400.0 + 25.0 + 100.0)));
  CHECK_THROWS_AS(radius_profile({5, 5}, w, 1.0, 3), ConfigError);
}

TEST_CASE("per-vector parameters follow the derived bounds") {
  std::mt19937_64 rng(31);
  auto ctx = SolverContext::make(1.0, 3, 10000, {0, 10000});
  for (int t = 0; t < 50; ++t) {
    auto base = oracle::random_weights(rng, 8, 4.0, 6.0);
    auto target = base;
    for (auto& x : target) x *= std::uniform_real_distribution<double>(0.9, 1.1)(rng);
    const auto vp = vector_params(base, target, ctx);
    REQUIRE(vp);
    const double x = *std::min_element(target.begin(), target.end());
    const double wb = *std::min_element(base.begin(), base.end());
    double hi = 0.0, lo = 1e300;
    for (std::size_t i = 0; i < 8; ++i) {
      hi = std::max(hi, base[i] / target[i]);
      lo = std::min(lo, base[i] / target[i]);
    }
    CHECK(vp->r_min == x);
    CHECK(vp->x_up == doctest::Approx(x * hi));
    CHECK(vp->y_down == doctest::Approx(3 * x * lo));
    CHECK(vp->p1 == doctest::Approx(oracle::p_l1(wb, x * hi)).epsilon(1e-9));
    CHECK(vp->p2 == doctest::Approx(oracle::p_l1(wb, 3 * x * lo)).epsilon(1e-9));
    const BetaMu bm = beta_mu(vp->p1, vp->p2, 10000);
    CHECK(vp->beta == bm.beta);
    CHECK(vp->mu == doctest::Approx(bm.mu));
    const double reduced = oracle::p_l1(wb, 9 * x * hi) / vp->p1 * vp->mu;
    CHECK(vp->mu_reduced == doctest::Approx(reduced).epsilon(1e-8));
    CHECK(vp->mu_reduced < vp->mu);
    CHECK(vp->threshold(true) == vp->mu_reduced);
    CHECK(vp->threshold(false) == vp->mu);
    // the derived beta never beats the self-based one of the base
    CHECK(vp->beta >= self_beta(base, ctx));
  }
  // self-based desk-scale values
  const std::vector<double> w(32, 2.5);
  const auto self = vector_params(w, w, ctx);
  REQUIRE(self);
  CHECK(self->beta == 323);
  CHECK(self->mu == doctest::Approx(62.940098749712637).epsilon(1e-9));
  CHECK(self->mu_reduced == doctest::Approx(7.952).epsilon(1e-3));
}

TEST_CASE("unusable pairs and group assembly") {
  auto ctx = SolverContext::make(1.0, 2, 10000, {0, 100});
  const std::vector<double> a{1.0, 1.0}, b{1.0, 9.0};
  CHECK_FALSE(vector_params(a, b, ctx));
  const WeightVector wa{0, a}, wb{1, b};
  const WeightVector both[] = {wa, wb};
  CHECK_THROWS_AS(group_params(wa, both, ctx), InfeasibleError);
  const WeightVector self[] = {wa};
  const auto g = group_params(wa, self, ctx);
  CHECK(g.base == 0);
  CHECK(g.w_bucket == 1.0);
  CHECK(g.beta_group == self_beta(a, ctx));
  CHECK(g.find(0) != nullptr);
  CHECK(g.find(1) == nullptr);

  std::mt19937_64 rng(3);
  const auto set = oracle::as_set({oracle::random_weights(rng, 4), oracle::random_weights(rng, 4)});
  ctx.c = 3;
  int want = 0;
  for (const auto& w : set) want = std::max(want, self_beta(w.weights, ctx));
  CHECK(tau_min(set, ctx) == want);
  CHECK_THROWS_AS(make_group(0, a, {}), ConfigError);
}
