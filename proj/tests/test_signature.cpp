#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "cfnet/signature.hpp"
#include "support.hpp"

using namespace cfnet;

namespace {

// Independent oracle: S^{w.i}' = S^w u_i, S^() = 1, integrated by adaptive
// Dormand-Prince piece by piece.
std::vector<double> quadrature_signature(const ControlPath& u, int K) {
  namespace odeint = boost::numeric::odeint;
  const int m = u.channels();
  const auto words = words_up_to(m, K);
  std::vector<std::size_t> parent(words.size(), 0);
  std::vector<int> letter(words.size(), 0);
  for (std::size_t i = 1; i < words.size(); ++i) {
    parent[i] = length_lex_index(words[i].prefix(), m);
    letter[i] = words[i].back();
  }
  std::vector<double> state(words.size(), 0.0);
  state[0] = 1.0;
  auto stepper = odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<std::vector<double>>());
  for (std::size_t p = 0; p < u.pieces(); ++p) {
    auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds, double) {
      ds[0] = 0.0;
      for (std::size_t i = 1; i < s.size(); ++i) ds[i] = s[parent[i]] * u.value(p, letter[i]);
    };
    const double t0 = u.breakpoints()[p], t1 = u.breakpoints()[p + 1];
    odeint::integrate_adaptive(stepper, rhs, state, t0, t1, (t1 - t0) / 50.0);
  }
  return state;
}

}  // namespace

TEST_CASE("signature examples") {
  const auto u1 = ControlPath::constant({0.7}, 1.3, 1.0);
  CHECK(signature_entry(u1, Word{}) == 1.0);
  for (int k = 1; k <= 6; ++k) {
    Word w(std::vector<int>(static_cast<std::size_t>(k), 1));
    CHECK(signature_entry(u1, w) == doctest::Approx(std::pow(0.7 * 1.3, k) / std::tgamma(k + 1.0)).epsilon(1e-14));
  }

  ControlPath updown(1, {0.0, 1.0, 2.0}, {{1.0}, {-1.0}}, 1.0);
  CHECK(std::abs(signature_entry(updown, Word{1})) <= 1e-15);
  CHECK(std::abs(signature_entry(updown, Word{1, 1})) <= 1e-15);

  auto t0 = signature_up_to(updown, 0);
  CHECK(t0.entries() == std::vector<double>{1.0});

  const auto u2 = ControlPath::constant({1.0, 0.0}, 1.0, 1.0);
  auto t2 = signature_up_to(u2, 2);
  CHECK(t2.at(Word{1}) == doctest::Approx(1.0));
  CHECK(t2.at(Word{2}) == 0.0);
  CHECK(t2.at(Word{1, 1}) == doctest::Approx(0.5));
  CHECK(t2.at(Word{1, 2}) == 0.0);
  CHECK(t2.at(Word{2, 1}) == 0.0);
  CHECK(t2.at(Word{2, 2}) == 0.0);
}

TEST_CASE("time ordering: the earliest time pairs with the first letter") {
  // u1 = 1 on [0,1), u2 = 1 on [1,2): S^{(1,2)} = 1, S^{(2,1)} = 0.
  ControlPath u(2, {0.0, 1.0, 2.0}, {{1.0, 0.0}, {0.0, 1.0}}, 1.0);
  CHECK(signature_entry(u, Word{1, 2}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(signature_entry(u, Word{2, 1}) == 0.0);
}

TEST_CASE("signature_norm_bound arithmetic") {
  CHECK(signature_norm_bound(1.0, 1.0, 0) == 1.0);
  CHECK(signature_norm_bound(1.0, 1.0, 5) == doctest::Approx(1.0 / 120.0).epsilon(1e-15));
  CHECK(signature_norm_bound(2.0, 0.5, 3) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(signature_norm_bound(3.0, 1.0, 200) == doctest::Approx(std::exp(200 * std::log(3.0) - std::lgamma(201.0))).epsilon(1e-12));
}

TEST_CASE("control path validation") {
  CHECK_THROWS_AS(ControlPath(1, {0.1, 1.0}, {{0.5}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ControlPath(1, {0.0, 1.0, 1.0}, {{0.5}, {0.5}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ControlPath(1, {0.0, 1.0}, {{1.5}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ControlPath(2, {0.0, 1.0}, {{0.5}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(signature_up_to(ControlPath::constant({1.0, 1.0}, 1.0, 1.0), 30), ResourceLimitError);
}

TEST_CASE("property: random paths respect the volume bound") {
  RandomStream rng(31, 1);
  std::size_t violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const int m = rng.uniform_int(1, 3);
    const double M = rng.uniform(0.1, 2.0), T = rng.uniform(0.1, 2.0);
    const auto u = testing::random_path(rng, m, M, T, 6);
    const auto sig = signature_up_to(u, 5);
    const auto words = words_up_to(m, 5);
    for (std::size_t i = 0; i < words.size(); ++i) {
      violations += std::abs(sig[i]) > signature_norm_bound(M, T, static_cast<int>(words[i].size()));
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("property: one-channel shuffle identity") {
  RandomStream rng(32, 1);
  for (int t = 0; t < 200; ++t) {
    const auto u = testing::random_path(rng, 1, 1.0, rng.uniform(0.1, 3.0), 6);
    const auto sig = signature_up_to(u, 8);
    const double s1 = sig.at(Word{1});
    // Relative to the conditioning scale (int |u|)^k / k!: when S^(1) nearly
    // cancels, no floating-point evaluation is accurate relative to S^(1)^k.
    double total_variation = 0.0;
    for (std::size_t p = 0; p < u.pieces(); ++p) {
      total_variation += std::abs(u.value(p, 1)) * (u.breakpoints()[p + 1] - u.breakpoints()[p]);
    }
    for (int k = 2; k <= 8; ++k) {
      const double expect = std::pow(s1, k) / std::tgamma(k + 1.0);
      const double scale = std::max(std::abs(expect), std::pow(total_variation, k) / std::tgamma(k + 1.0));
      const double got = sig.at(Word(std::vector<int>(static_cast<std::size_t>(k), 1)));
      CHECK(std::abs(got - expect) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("zero control has a trivial signature") {
  ControlPath zero(2, {0.0, 0.4, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}, 1.0);
  const auto sig = signature_up_to(zero, 4);
  CHECK(sig[0] == 1.0);
  for (std::size_t i = 1; i < sig.entries().size(); ++i) CHECK(sig[i] == 0.0);
}

TEST_CASE("negation flips odd orders") {
  RandomStream rng(33, 1);
  const auto u = testing::random_path(rng, 2, 1.0, 0.8, 4);
  const auto a = signature_up_to(u, 4), b = signature_up_to(u.negated(), 4);
  const auto words = words_up_to(2, 4);
  for (std::size_t i = 0; i < words.size(); ++i) {
    CHECK(b[i] == doctest::Approx((words[i].size() % 2 ? -1.0 : 1.0) * a[i]).epsilon(1e-14));
  }
}

TEST_CASE("oracle: Monte Carlo simplex integration") {
  RandomStream path_rng(34, 1);
  const double T = 1.0;
  ControlPath u(2, {0.0, 0.3, 0.65, 1.0}, {{0.9, -0.4}, {-0.7, 0.8}, {0.2, 1.0}}, 1.0);
  const auto sig = signature_up_to(u, 4);
  const std::size_t samples = 1'000'000;
  for (int k = 1; k <= 4; ++k) {
    const auto words = words_of_length(2, k);
    std::vector<double> sum(words.size(), 0.0), sum2(words.size(), 0.0);
    RandomStream rng(35, static_cast<std::uint64_t>(k));
    std::vector<double> tau(static_cast<std::size_t>(k));
    double u_at[4][2];
    for (std::size_t s = 0; s < samples; ++s) {
      for (auto& t : tau) t = rng.uniform(0.0, T);
      std::sort(tau.begin(), tau.end());
      for (int j = 0; j < k; ++j) {
        u_at[j][0] = u.at(tau[j], 1);
        u_at[j][1] = u.at(tau[j], 2);
      }
      for (std::size_t w = 0; w < words.size(); ++w) {
        double prod = 1.0;
        for (int j = 0; j < k; ++j) prod *= u_at[j][words[w][j] - 1];
        sum[w] += prod;
        sum2[w] += prod * prod;
      }
    }
    const double vol = std::pow(T, k) / std::tgamma(k + 1.0);
    for (std::size_t w = 0; w < words.size(); ++w) {
      const double mean = sum[w] / samples;
      const double se = std::sqrt(std::max(0.0, sum2[w] / samples - mean * mean) / samples);
      INFO("word " << words[w].to_string());
      CHECK(std::abs(sig.at(words[w]) - vol * mean) <= 3.0 * vol * se);
    }
  }
}

TEST_CASE("oracle: adaptive quadrature of the signature recursion") {
  RandomStream rng(36, 1);
  for (int t = 0; t < 50; ++t) {
    const int m = rng.uniform_int(1, 3);
    const auto u = testing::random_path(rng, m, 1.0, rng.uniform(0.2, 1.5), 5);
    const auto sig = signature_up_to(u, 4);
    const auto ref = quadrature_signature(u, 4);
    REQUIRE(ref.size() == sig.entries().size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(sig[i] - ref[i]) <= 1e-10);
  }
}
