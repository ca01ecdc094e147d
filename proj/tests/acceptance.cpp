// Acceptance runner: one PASS/FAIL line per criterion. Argument 1 is the
// path of the cfnet CLI, used by the determinism criterion.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "cfnet/bounds.hpp"
#include "cfnet/builtins.hpp"
#include "cfnet/dataset.hpp"
#include "cfnet/erm.hpp"
#include "cfnet/parser.hpp"
#include "cfnet/rademacher.hpp"
#include "cfnet/series.hpp"
#include "cfnet/signature.hpp"
#include "support.hpp"

using namespace cfnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // wall-clock limit; <= 0 means none
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

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

// S^{w.i}' = S^w u_i, S^() = 1, by adaptive Dormand-Prince piece by piece.
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

Outcome scalar_exponential() {
  const auto sys = make_system(1, {{"x1"}}, {1.0}, 1.0, 1.0, 0.5);
  const std::vector<double> x0{1.0};
  const auto ev = chen_fliess_eval(sys, x0, ControlPath::constant({1.0}, 0.5, 1.0), 15);
  const double err = std::abs(ev.value - std::exp(0.5));
  return {err <= 1e-9, "|y_15 - e^0.5| = " + fmt(err) + " (tol 1e-9)"};
}

Outcome noncommuting_rk4() {
  const auto sys = make_system(2, {{"x2", "0"}, {"0", "x1"}}, {1.0, 0.0}, 1.0, 1.0, 0.3);
  RandomStream rng(2024, 2);
  const auto u = testing::random_path_pieces(rng, 2, 1.0, 0.3, 3);
  const std::vector<double> x0{0.6, -0.5};
  SeriesOptions opts;
  opts.family = BilinearFamily{1.0, 1.0};
  opts.run_oracle = true;
  bool ok = u.pieces() == 3;
  double worst_slack = 1e300, d10 = 0.0;
  for (int K = 2; K <= 10; ++K) {
    const auto ev = chen_fliess_eval(sys, x0, u, K, opts);
    const double budget = *ev.tail_bound + 10.0 * *ev.oracle_error;
    ok = ok && *ev.discrepancy <= budget;
    worst_slack = std::min(worst_slack, budget - *ev.discrepancy);
    if (K == 10) d10 = *ev.discrepancy;
  }
  ok = ok && d10 <= 1e-8;
  return {ok, "min(budget - discrepancy) over K = 2..10 = " + fmt(worst_slack) + ", discrepancy at K = 10 = " +
                  fmt(d10) + " (tol 1e-8)"};
}

Outcome signature_invariants() {
  RandomStream rng(2024, 3);
  std::size_t violations = 0, shuffle_fail = 0, quad_fail = 0;
  double worst_shuffle = 0.0, worst_quad = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int m = rng.uniform_int(1, 3);
    const double M = rng.uniform(0.1, 2.0), T = rng.uniform(0.1, 2.0);
    const auto u = testing::random_path(rng, m, M, T, 6);
    const auto sig = signature_up_to(u, 5);
    const auto words = words_up_to(m, 5);
    for (std::size_t i = 0; i < words.size(); ++i) {
      violations += std::abs(sig[i]) > signature_norm_bound(M, T, static_cast<int>(words[i].size()));
    }
    if (m == 1) {
      // Measured against the conditioning scale (int |u|)^k / k!.
      double tv = 0.0;
      for (std::size_t p = 0; p < u.pieces(); ++p) tv += std::abs(u.value(p, 1)) * (u.breakpoints()[p + 1] - u.breakpoints()[p]);
      const double s1 = sig.at(Word{1});
      for (int k = 2; k <= 5; ++k) {
        const double expect = std::pow(s1, k) / std::tgamma(k + 1.0);
        const double scale = std::max(std::abs(expect), std::pow(tv, k) / std::tgamma(k + 1.0));
        const double e = std::abs(sig.at(Word(std::vector<int>(static_cast<std::size_t>(k), 1))) - expect) / scale;
        worst_shuffle = std::max(worst_shuffle, e);
        shuffle_fail += e > 1e-12;
      }
    }
  }
  for (int t = 0; t < 50; ++t) {
    const int m = rng.uniform_int(1, 3);
    const auto u = testing::random_path(rng, m, 1.0, rng.uniform(0.2, 1.5), 5);
    const auto sig = signature_up_to(u, 5);
    const auto ref = quadrature_signature(u, 5);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double e = std::abs(sig[i] - ref[i]);
      worst_quad = std::max(worst_quad, e);
      quad_fail += e > 1e-10;
    }
  }
  return {violations == 0 && shuffle_fail == 0 && quad_fail == 0,
          "bound violations " + std::to_string(violations) + ", worst shuffle error " + fmt(worst_shuffle) +
              " (tol 1e-12), worst quadrature error " + fmt(worst_quad) + " (tol 1e-10)"};
}

Outcome closed_form_agreement() {
  LambdaInput in;
  in.truncate = true;

  in.family = BilinearFamily{1.0, 1.0};
  const double e_bil = rel(theorem1_bound(in, 2, 1.0, 0.5, 50, 60).total, bilinear_bound(1.0, 2, 1.0, 0.5, 1.0, 50).total);

  const int n = 2, m = 3;
  const double r = 1.5, a_r = 2.0, M = 1.0;
  const double Ta = r / 2.0 / (std::pow(2.0, n) * n * m * M * a_r);
  in.family = AnalyticFamily{r, n, a_r};
  const double e_ana = rel(theorem1_bound(in, m, M, Ta, 200, 60).total, analytic_bound(r, n, m, M, Ta, a_r, 200).total);

  const double a = 1.0, b = 1.0;
  const double Th = 0.5 / (4.0 * n * n * M * b * a);
  in.family = HopfieldFamily{1.0, a, b};
  const double e_hop = rel(theorem1_bound(in, n * n, M, Th, 100, 60).total, hopfield_bound(1.0, n, M, Th, a, b, 100).total);

  return {e_bil <= 1e-12 && e_ana <= 1e-10 && e_hop <= 1e-10,
          "relative gaps bilinear " + fmt(e_bil) + " (tol 1e-12), analytic " + fmt(e_ana) + ", hopfield " + fmt(e_hop) +
              " (tol 1e-10)"};
}

Outcome hopfield_combinatorics() {
  const bool ints = gamma_k_exact(1) == 1 && gamma_k_exact(2) == 6 && gamma_k_exact(3) == 60;
  const double err = std::abs(central_binomial_partial(0.1, 30) - 1.0 / std::sqrt(0.6));
  return {ints && err <= 1e-6, "gamma(1..3) = " + to_string_u128(gamma_k_exact(1)) + ", " + to_string_u128(gamma_k_exact(2)) +
                                   ", " + to_string_u128(gamma_k_exact(3)) + "; series error " + fmt(err) + " (tol 1e-6)"};
}

Outcome lemma1_harness() {
  const auto exact = jensen_lemma_check(std::vector<double>(4, 1.0), 0, 1);
  bool ok = exact.exact && exact.estimate == 1.5 && exact.rhs == 2.0 && exact.pass;
  RandomStream rng(2024, 6);
  int passed = 0;
  double worst = 1e300;
  for (int t = 0; t < 20; ++t) {
    const Expr psi = simplify(testing::random_expr(rng, 2, 3));
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(sample_ball(2, 1.0, rng));
    const auto chk = jensen_lemma_check(psi, pts, 10000, 600 + t, 1);
    passed += chk.pass;
    worst = std::min(worst, chk.margin);
  }
  ok = ok && passed == 20;
  return {ok, "exact N = 4: " + fmt(exact.estimate) + " <= " + fmt(exact.rhs) + "; MC passes " + std::to_string(passed) +
                  "/20, smallest margin " + fmt(worst)};
}

Outcome empirical_vs_certified() {
  const auto sys = builtin_system("bilinear2d");
  Dataset d;
  d.n = sys.n;
  d.r = sys.r;
  d.M1 = 1.0;
  for (std::size_t i = 0; i < 50; ++i) {
    RandomStream rng(2024, streams::sub(streams::kData, i));
    d.X.push_back(sample_ball(sys.n, sys.r, rng));
    d.Y.push_back(0.0);
  }
  RademacherOptions ro;
  ro.n_controls = 256;
  ro.n_eps = 512;
  ro.seed = 2024;
  const auto est = empirical_rademacher(d, sys, 6, ro);
  const double a = bilinear_norm(sys);
  const auto bound = bilinear_bound(sys.r, sys.m, sys.M, sys.T, a, 50);
  return {est.estimate + 3.0 * est.stderr_ <= bound.total,
          "estimate " + fmt(est.estimate) + " + 3 * " + fmt(est.stderr_) + " <= bound " + fmt(bound.total)};
}

Outcome planted_erm() {
  const auto sys = builtin_system("bilinear2d");
  SeriesEvaluator ev(sys, 4);
  RandomStream prng(2024, streams::kPlanted);
  const auto planted = random_control(sys.m, sys.M, sys.T, 3, prng);
  const double M1 = std::exp(1.0);
  const auto train = generate_planted(ev, planted, 500, 0.0, M1, 2024, streams::kData);
  const auto test = generate_planted(ev, planted, 500, 0.0, M1, 2024, streams::kTestData);
  ErmOptions opts;
  opts.seed = 2024;
  const auto model = erm_fit(train, ev, opts);
  const double test_risk = empirical_risk(model, ev, test);
  bool inside = true;
  for (std::size_t i = 0; i < model.theta.size(); ++i) inside = inside && std::abs(model.theta[i]) <= model.box[i];
  return {model.train_loss <= 1e-6 && test_risk <= 1e-4 && model.box_violations == 0 && inside,
          "train " + fmt(model.train_loss) + " (tol 1e-6), test " + fmt(test_risk) + " (tol 1e-4), box violations " +
              std::to_string(model.box_violations)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const auto dir = std::filesystem::temp_directory_path() / "cfnet_acceptance";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "experiment.json";
  {
    std::ofstream out(cfg);
    out << R"({"schema_version": 1, "system": {"builtin": "bilinear2d"},
  "data": {"generator": "planted", "N_train": 200, "N_test": 200, "noise": 0.05},
  "K": 5, "loss": "squared", "delta": 0.05,
  "rademacher": {"n_controls": 64, "n_eps": 128}, "seed": 2024})";
  }
  std::vector<std::string> outputs;
  const std::vector<int> threads{1, 1, 4};
  for (std::size_t i = 0; i < threads.size(); ++i) {
    const auto out = dir / ("report" + std::to_string(i) + ".json");
    std::filesystem::remove(out);
    const std::string cmd = "\"" + cli + "\" --threads " + std::to_string(threads[i]) + " --out \"" + out.string() +
                            "\" experiment --config \"" + cfg.string() + "\"";
    if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
    outputs.push_back(slurp(out));
  }
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
  return {same, "3 runs (threads 1, 1, 4), " + std::to_string(outputs[0].size()) + " bytes, " +
                    (same ? "byte-identical" : "outputs differ")};
}

Outcome scaling_law() {
  RandomStream rng(2024, 10);
  int failures = 0, checks = 0;
  auto expect_half = [&](double big, double small) {
    ++checks;
    failures += !(big == small / 2.0);
  };
  for (int t = 0; t < 10; ++t) {
    const double r = rng.uniform(0.5, 2.0), M = rng.uniform(0.5, 1.5), a = rng.uniform(0.1, 2.0), b = rng.uniform(0.5, 2.0);
    const int m = rng.uniform_int(1, 4), n = rng.uniform_int(1, 3);
    const double N = rng.uniform_int(1, 5000);
    const double T = rng.uniform(0.01, 0.9) * r / (std::pow(2.0, n) * n * m * M * a);
    const double Th = rng.uniform(0.01, 0.9) / (4.0 * n * n * M * a * b);
    expect_half(bilinear_bound(r, m, M, T, a, 4 * N).total, bilinear_bound(r, m, M, T, a, N).total);
    expect_half(analytic_bound(r, n, m, M, T, a, 4 * N).total, analytic_bound(r, n, m, M, T, a, N).total);
    expect_half(hopfield_bound(r, n, M, Th, a, b, 4 * N).total, hopfield_bound(r, n, M, Th, a, b, N).total);
    LambdaInput fam;
    fam.family = BilinearFamily{r, a};
    const int K = rng.uniform_int(0, 10);
    expect_half(theorem1_bound(fam, m, M, T, 4 * N, K).total, theorem1_bound(fam, m, M, T, N, K).total);
    LambdaInput vals;
    for (int k = 0; k <= K; ++k) vals.values.push_back(rng.uniform(0.0, 3.0));
    expect_half(theorem1_bound(vals, m, M, T, 4 * N, K).total, theorem1_bound(vals, m, M, T, N, K).total);
  }
  return {failures == 0, std::to_string(checks - failures) + "/" + std::to_string(checks) + " exact halvings"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria{
      {1, "series vs exact exponential", 1.0, scalar_exponential},
      {2, "series vs RK4, noncommuting bilinear", 5.0, noncommuting_rk4},
      {3, "signature invariants", 30.0, signature_invariants},
      {4, "closed-form agreement at K = 60", 1.0, closed_form_agreement},
      {5, "hopfield combinatorics", 1.0, hopfield_combinatorics},
      {6, "Jensen lemma harness", 10.0, lemma1_harness},
      {7, "empirical vs certified Rademacher", 120.0, empirical_vs_certified},
      {8, "planted-model ERM", 120.0, planted_erm},
      {9, "experiment determinism", 0.0, [&] { return determinism(cli); }},
      {10, "bound(4N) = bound(N) / 2", 1.0, scaling_law},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s <= 0.0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << c.id << "] " << c.name << ": " << o.detail << "; "
              << std::fixed << std::setprecision(2) << secs << " s";
    std::cout.unsetf(std::ios::fixed);
    std::cout << std::setprecision(6);
    if (c.limit_s > 0.0) std::cout << " (limit " << c.limit_s << " s)";
    if (!in_time) std::cout << " TOO SLOW";
    std::cout << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
