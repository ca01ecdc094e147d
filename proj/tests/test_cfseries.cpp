#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "cfnet/builtins.hpp"
#include "cfnet/parser.hpp"
#include "cfnet/series.hpp"
#include "support.hpp"

using namespace cfnet;

namespace {

SystemSpec make_system(int n, std::vector<std::vector<std::string>> fields, std::vector<double> c, double r,
                       double M, double T) {
  SystemSpec s;
  s.n = n;
  s.m = static_cast<int>(fields.size());
  for (const auto& f : fields) {
    std::vector<Expr> comps;
    for (const auto& text : f) comps.push_back(parse_expr(text, n));
    s.g.push_back(comps);
  }
  s.c = std::move(c);
  s.r = r;
  s.M = M;
  s.T = T;
  return s;
}

// A1 = [[0,1],[0,0]], A2 = [[0,0],[1,0]].
SystemSpec noncommuting(double T) { return make_system(2, {{"x2", "0"}, {"0", "x1"}}, {1.0, 0.0}, 1.0, 1.0, T); }

// Series value with S^w paired against entry(w) or entry(reverse(w)).
double paired_sum(LieTable& table, const SignatureTable& sig, const std::vector<Word>& words,
                  std::span<const double> x0, bool reverse) {
  CompensatedSum s;
  for (std::size_t i = 0; i < words.size(); ++i) {
    s.add(sig[i] * eval(reverse ? table.feature(words[i]) : table.get(words[i]), x0));
  }
  return s.value();
}

}  // namespace

TEST_CASE("scalar bilinear series reproduces the exponential") {
  const auto sys = make_system(1, {{"x1"}}, {1.0}, 1.0, 1.0, 0.5);
  const auto u = ControlPath::constant({1.0}, 0.5, 1.0);
  const std::vector<double> x0{1.0};
  auto ev = chen_fliess_eval(sys, x0, u, 15);
  CHECK(std::abs(ev.value - std::exp(0.5)) <= 1e-9);
  CHECK(std::abs(ev.value - 1.6487212707) <= 1e-9);
}

TEST_CASE("K = 0 gives the output at x0") {
  for (const auto& name : builtin_names()) {
    const auto sys = builtin_system(name);
    RandomStream rng(41, 1);
    const auto u = testing::random_path(rng, sys.m, sys.M, sys.T, 3);
    std::vector<double> x0(static_cast<std::size_t>(sys.n), 0.0);
    x0[0] = 0.5;
    CHECK(chen_fliess_eval(sys, x0, u, 0).value == dot(sys.c, x0));
  }
}

TEST_CASE("convention bootstrap: reversed pairing matches the ODE, forward pairing does not") {
  // Channel 1 then channel 2. Exactly: x stays (1, 0) under A1, then x2 grows
  // under A2 while x1 stays 1, so y(T) = 1. Pairing S^(1,2) = 0.0225 with
  // c^T A1 A2 x0 = 1 would add 0.0225.
  const auto sys = noncommuting(0.3);
  ControlPath u(2, {0.0, 0.15, 0.3}, {{1.0, 0.0}, {0.0, 1.0}}, 1.0);
  const std::vector<double> x0{1.0, 0.0};
  const int K = 3;
  LieTable table(sys);
  const auto words = words_up_to(2, K);
  const auto sig = signature_up_to(u, K);
  const auto ode = ode_reference(sys, x0, u, 1e-3);
  const double tail = *truncation_tail(BilinearFamily{1.0, 1.0}, 2, 1.0, 0.3, K);
  const double allowance = tail + 10.0 * ode.error_estimate;
  CHECK(std::abs(ode.y - 1.0) <= 1e-12);
  CHECK(std::abs(paired_sum(table, sig, words, x0, true) - ode.y) <= allowance);
  CHECK(std::abs(paired_sum(table, sig, words, x0, false) - ode.y) > allowance);

  // Same comparison on random noncommuting cases.
  RandomStream rng(42, 1);
  int forward_misses = 0;
  for (int t = 0; t < 20; ++t) {
    const auto path = testing::random_path_pieces(rng, 2, 1.0, 0.3, 3);
    const auto s = signature_up_to(path, K);
    auto x = testing::random_point(rng, 2, -0.7, 0.7);
    const auto ref = ode_reference(sys, x, path, 1e-3);
    const double allow = tail + 10.0 * ref.error_estimate;
    CHECK(std::abs(paired_sum(table, s, words, x, true) - ref.y) <= allow);
    forward_misses += std::abs(paired_sum(table, s, words, x, false) - ref.y) > allow;
  }
  CHECK(forward_misses > 0);
}

TEST_CASE("noncommuting bilinear series converges to RK4 within the tail bound") {
  const auto sys = noncommuting(0.3);
  RandomStream rng(43, 1);
  const auto u = testing::random_path_pieces(rng, 2, 1.0, 0.3, 3);
  const std::vector<double> x0{0.6, -0.5};
  SeriesOptions opts;
  opts.family = BilinearFamily{1.0, 1.0};
  opts.run_oracle = true;
  for (int K = 2; K <= 10; ++K) {
    auto ev = chen_fliess_eval(sys, x0, u, K, opts);
    CHECK(*ev.discrepancy <= *ev.tail_bound + 10.0 * *ev.oracle_error);
    if (K == 10) CHECK(*ev.discrepancy <= 1e-8);
  }
}

TEST_CASE("oracle convergence on the builtin systems") {
  for (const auto& name : builtin_names()) {
    const auto sys = builtin_system(name);
    const auto cf = auto_family(sys);
    REQUIRE(cf.has_value());
    // The Hopfield system has m = 4; K above 6 exceeds the word budget for a
    // unit test (4^10 words at the top order).
    const int Kmax = name == "hopfield2" ? 6 : 10;
    RandomStream rng(44, 1);
    for (int trial = 0; trial < 2; ++trial) {
      const auto u = testing::random_path(rng, sys.m, sys.M, sys.T, 3);
      auto x0 = testing::random_point(rng, sys.n, -0.6, 0.6);
      static std::map<std::string, SeriesEvaluator> cache;
      auto it = cache.try_emplace(name, sys, Kmax).first;
      const auto ode = ode_reference(sys, x0, u, 1e-4);
      // y_K is the sum of the order-k contributions up to K.
      const auto full = it->second.evaluate(x0, u);
      std::vector<double> disc;
      double yK = full.contributions[0] + full.contributions[1];
      for (int K = 2; K <= Kmax; ++K) {
        yK += full.contributions[K];
        const double d = std::abs(yK - ode.y);
        const double tail = *truncation_tail(cf->family, sys.m, sys.M, sys.T, K);
        INFO(name << " K = " << K);
        CHECK(d <= tail + 10.0 * ode.error_estimate);
        disc.push_back(d);
      }
      // Nonincreasing from some K0 on, up to the integrator's noise floor.
      const double floor = 10.0 * ode.error_estimate + 1e-14;
      std::size_t k0 = disc.size() - 1;
      while (k0 > 0 && disc[k0] <= disc[k0 - 1] + floor) --k0;
      INFO(name);
      CHECK(k0 <= 2);
    }
  }
}

TEST_CASE("order-k contributions obey the signature and Lambda_k bounds") {
  for (const auto& name : builtin_names()) {
    const auto sys = builtin_system(name);
    const int K = name == "hopfield2" ? 5 : 6;
    RandomStream rng(45, 1);
    const auto u = testing::random_path(rng, sys.m, sys.M, sys.T, 4);
    auto x0 = testing::random_point(rng, sys.n, -0.6, 0.6);
    SeriesEvaluator ev(sys, K);
    const auto res = ev.evaluate(x0, u);
    LieTable table(sys);
    DomainGrid grid;
    grid.samples = 16;
    grid.extra_points = {x0};
    for (int k = 0; k <= K; ++k) {
      const double lam = lambda_k(table, k, grid).value;
      const double bound = signature_norm_bound(sys.m * sys.M, sys.T, k) * lam;
      INFO(name << " k = " << k);
      CHECK(std::abs(res.contributions[k]) <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("series input validation") {
  const auto sys = builtin_system("bilinear2d");
  const auto u = ControlPath::constant({1.0, 0.0}, sys.T, sys.M);
  CHECK_THROWS_AS(chen_fliess_eval(sys, std::vector<double>{1.0, 1.0}, u, 2), std::invalid_argument);
  CHECK_THROWS_AS(chen_fliess_eval(sys, std::vector<double>{1.0}, u, 2), std::invalid_argument);
  CHECK_THROWS_AS(chen_fliess_eval(sys, std::vector<double>{0.5, 0.0}, ControlPath::constant({1.0, 0.0}, 0.7, 1.0), 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(chen_fliess_eval(sys, std::vector<double>{0.5, 0.0}, ControlPath::constant({1.0}, sys.T, 1.0), 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(chen_fliess_eval(sys, std::vector<double>{0.5, 0.0}, u, 40), ResourceLimitError);
}

TEST_CASE("divergent family is reported, not hidden") {
  const auto sys = builtin_system("analytic1d");
  const auto u = ControlPath::constant({1.0, 1.0}, sys.T, sys.M);
  SeriesOptions opts;
  opts.family = AnalyticFamily{1.0, 1, 100.0};
  auto ev = chen_fliess_eval(sys, std::vector<double>{0.2}, u, 3, opts);
  CHECK(ev.tail_divergent);
  CHECK_FALSE(ev.tail_bound.has_value());
  CHECK_FALSE(ev.warnings.empty());
}

TEST_CASE("ode_reference examples") {
  const auto scalar = make_system(1, {{"x1"}}, {1.0}, 1.0, 1.0, 1.0);
  auto e = ode_reference(scalar, std::vector<double>{1.0}, ControlPath::constant({1.0}, 1.0, 1.0), 1e-3);
  CHECK(std::abs(e.y - std::numbers::e) <= 1e-8);

  const auto rot = make_system(2, {{"x2", "-x1"}}, {1.0, 0.0}, 1.0, 1.0, std::numbers::pi / 2);
  auto r = ode_reference(rot, std::vector<double>{1.0, 0.0}, ControlPath::constant({1.0}, std::numbers::pi / 2, 1.0),
                         1e-3);
  CHECK(std::abs(r.final_state[0] - 0.0) <= 1e-6);
  CHECK(std::abs(r.final_state[1] + 1.0) <= 1e-6);

  const auto sys = builtin_system("analytic1d");
  auto z = ode_reference(sys, std::vector<double>{0.3}, ControlPath::constant({0.0, 0.0}, sys.T, 1.0), 1e-3);
  CHECK(z.final_state[0] == 0.3);

  auto traj = ode_reference(rot, std::vector<double>{1.0, 0.0}, ControlPath(1, {0.0, 0.5, 1.0}, {{1.0}, {-1.0}}, 1.0),
                            0.3, true);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == 1.0);
  CHECK(std::find(traj.times.begin(), traj.times.end(), 0.5) != traj.times.end());
}

TEST_CASE("blow-up raises IntegrationError") {
  const auto sys = make_system(1, {{"x1^2"}}, {1.0}, 1.0, 1.0, 2.0);
  CHECK_THROWS_AS(ode_reference(sys, std::vector<double>{1.0}, ControlPath::constant({1.0}, 2.0, 1.0), 1e-2),
                  IntegrationError);
}

TEST_CASE("drift absorption") {
  // x' = x + u x with M0 = 1.
  const auto base = make_system(1, {{"x1"}}, {1.0}, 1.0, 1.0, 0.7);
  const std::vector<Expr> drift{parse_expr("x1", 1)};
  const auto absorbed = absorb_drift(base, drift, 1.0);
  CHECK(absorbed.m == 2);
  const auto u = ControlPath(1, {0.0, 0.3, 0.7}, {{0.5}, {-1.0}}, 1.0);
  const std::vector<double> x0{0.4};
  const auto a = ode_reference_with_drift(base, drift, x0, u, 1e-3);
  const auto b = ode_reference(absorbed, x0, prepend_constant_channel(u, 1.0), 1e-3);
  CHECK(std::abs(a.y - b.y) <= 1e-10);

  // Linear drift with M0 = 2: channel 1 carries A x / 2.
  const auto base2 = make_system(2, {{"x1", "0"}}, {1.0, 0.0}, 1.0, 1.0, 0.5);
  const std::vector<Expr> drift2{parse_expr("x2", 2), parse_expr("-2*x1", 2)};
  const auto abs2 = absorb_drift(base2, drift2, 2.0);
  CHECK(abs2.M == 2.0);
  CHECK(eval(abs2.g[0][1], std::vector<double>{1.0, 0.0}) == -1.0);
  const auto u2 = ControlPath::constant({0.8}, 0.5, 1.0);
  const auto c2 = ode_reference_with_drift(base2, drift2, std::vector<double>{0.3, 0.2}, u2, 1e-3);
  const auto d2 = ode_reference(abs2, std::vector<double>{0.3, 0.2}, prepend_constant_channel(u2, 2.0), 1e-3);
  CHECK(std::abs(c2.final_state[0] - d2.final_state[0]) <= 1e-10);
  CHECK(std::abs(c2.final_state[1] - d2.final_state[1]) <= 1e-10);

  // Zero drift: identical system plus a zero channel.
  const std::vector<Expr> zero{Expr::constant(0.0), Expr::constant(0.0)};
  const auto abs3 = absorb_drift(base2, zero, 1.0);
  CHECK(abs3.g[0][0].is_constant(0.0));
  CHECK(abs3.g[1][0] == base2.g[0][0]);

  CHECK_THROWS_AS(absorb_drift(base, drift, 0.0), std::invalid_argument);
}

TEST_CASE("property: drift absorption preserves trajectories on random smooth systems") {
  RandomStream rng(46, 1);
  for (int t = 0; t < 20; ++t) {
    SystemSpec s;
    s.n = 2;
    s.m = 2;
    for (int i = 0; i < 2; ++i) {
      s.g.push_back({simplify(testing::random_expr(rng, 2, 2)), simplify(testing::random_expr(rng, 2, 2))});
    }
    s.c = {1.0, 0.0};
    s.T = 0.2;
    std::vector<Expr> drift{simplify(testing::random_expr(rng, 2, 2)), simplify(testing::random_expr(rng, 2, 2))};
    const double M0 = rng.uniform(0.5, 2.0);
    const auto u = testing::random_path(rng, 2, 1.0, 0.2, 3);
    const auto x0 = testing::random_point(rng, 2, -0.5, 0.5);
    try {
      const auto a = ode_reference_with_drift(s, drift, x0, u, 1e-3);
      const auto b = ode_reference(absorb_drift(s, drift, M0), x0, prepend_constant_channel(u, M0), 1e-3);
      for (int j = 0; j < 2; ++j) CHECK(std::abs(a.final_state[j] - b.final_state[j]) <= 1e-10 * std::max(1.0, std::abs(a.final_state[j])));
    } catch (const IntegrationError&) {
      // A random field may blow up; both routes must then fail.
      CHECK_THROWS_AS(ode_reference(absorb_drift(s, drift, M0), x0, prepend_constant_channel(u, M0), 1e-3),
                      IntegrationError);
    }
  }
}

TEST_CASE("truncation tail examples") {
  const BilinearFamily b{1.0, 1.0};
  const double z = 2 * 1.0 * 0.5;
  for (int K : {0, 3, 8}) {
    CompensatedSum head;
    for (int k = 0; k <= K; ++k) head.add(std::pow(z, k) / std::tgamma(k + 1.0));
    CHECK(*truncation_tail(b, 2, 1.0, 0.5, K) == doctest::Approx(std::exp(z) - head.value()).epsilon(1e-10));
  }
  CHECK_FALSE(truncation_tail(AnalyticFamily{1.0, 1, 9.0}, 2, 1.0, 0.03, 2).has_value());
  CHECK(truncation_tail(AnalyticFamily{1.0, 1, 9.0}, 2, 1.0, 0.0, 2) == 0.0);
  CHECK(truncation_tail(HopfieldFamily{1.0, 1.0, 1.0}, 4, 0.0, 1.0, 0) == 0.0);
  CHECK(truncation_tail(b, 2, 1.0, 0.0, 5) == 0.0);
}
