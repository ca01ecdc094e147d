#include "cfnet/rademacher.hpp"

#include <cmath>
#include <stdexcept>

namespace cfnet {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_stderr(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  CompensatedSum s;
  for (double x : v) s.add(x);
  out.mean = s.value() / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  CompensatedSum q;
  for (double x : v) q.add((x - out.mean) * (x - out.mean));
  const double var = q.value() / static_cast<double>(v.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

}  // namespace

RademacherEstimate rademacher_from_predictions(const Matrix& pred, std::size_t n_eps, std::uint64_t seed,
                                               unsigned threads) {
  if (n_eps < 1) throw std::invalid_argument("rademacher: n_eps must be >= 1");
  if (pred.rows < 1 || pred.cols < 1) throw std::invalid_argument("rademacher: need at least one function and sample");
  for (double v : pred.data) {
    if (!std::isfinite(v)) throw std::runtime_error("rademacher: non-finite model output");
  }
  const std::size_t N = pred.cols;
  std::vector<double> sups(n_eps);
  parallel_for(n_eps, threads, [&](std::size_t e) {
    RandomStream rng(seed, streams::sub(streams::kSigns, e));
    std::vector<double> eps(N);
    for (auto& s : eps) s = rng.sign();
    double best = 0.0;
    for (std::size_t c = 0; c < pred.rows; ++c) {
      best = std::max(best, std::abs(dot(eps, pred.row(c))));
    }
    sups[e] = best / static_cast<double>(N);
  });
  const auto ms = mean_and_stderr(sups);
  RademacherEstimate out;
  out.estimate = ms.mean;
  out.stderr_ = ms.se;
  out.n_eps = n_eps;
  out.N = N;
  out.n_controls = pred.rows;
  return out;
}

RademacherEstimate empirical_rademacher(const Dataset& data, const SystemSpec& sys, int K,
                                        const RademacherOptions& opts) {
  if (opts.n_controls < 1 || opts.n_eps < 1) {
    throw std::invalid_argument("empirical_rademacher: n_controls and n_eps must be >= 1");
  }
  data.validate();
  if (data.n != sys.n) throw std::invalid_argument("empirical_rademacher: data dimension differs from system n");
  if (data.size() == 0) throw std::invalid_argument("empirical_rademacher: empty dataset");
  SeriesEvaluator ev(sys, K, opts.word_cap);
  const std::size_t N = data.size();
  const std::size_t W = ev.feature_count();

  Matrix features(N, W);
  parallel_for(N, opts.threads, [&](std::size_t i) {
    auto f = ev.features(data.X[i]);
    std::copy(f.begin(), f.end(), features.data.begin() + static_cast<std::ptrdiff_t>(i * W));
  });

  const std::size_t C = opts.n_controls;
  Matrix pred(2 * C, N);
  parallel_for(C, opts.threads, [&](std::size_t c) {
    RandomStream rng(opts.seed, streams::sub(streams::kControls, c));
    const ControlPath u = random_control(sys.m, sys.M, sys.T, opts.max_pieces, rng);
    const auto sig = signature_up_to(u, K, opts.word_cap);
    const auto flipped = signature_up_to(u.negated(), K, opts.word_cap);
    for (std::size_t i = 0; i < N; ++i) {
      const auto row = features.row(i);
      pred(2 * c, i) = dot(sig.entries(), row);
      pred(2 * c + 1, i) = dot(flipped.entries(), row);
    }
  });

  auto out = rademacher_from_predictions(pred, opts.n_eps, opts.seed, opts.threads);
  out.n_controls = C;
  out.K = K;
  out.caveat =
      "lower estimate: the sup over controls is taken over " + std::to_string(C) +
      " random piecewise-constant controls and their negations, so the true empirical complexity can be larger";
  return out;
}

double jensen_exact(std::span<const double> values) {
  const std::size_t N = values.size();
  if (N > 24) throw std::invalid_argument("jensen_exact: N > 24 is too many sign patterns");
  if (N == 0) return 0.0;
  const std::uint64_t patterns = std::uint64_t{1} << N;
  CompensatedSum total;
  for (std::uint64_t p = 0; p < patterns; ++p) {
    CompensatedSum s;
    for (std::size_t i = 0; i < N; ++i) s.add(((p >> i) & 1U) ? values[i] : -values[i]);
    total.add(std::abs(s.value()));
  }
  return total.value() / static_cast<double>(patterns);
}

JensenCheck jensen_lemma_check(std::span<const double> values, std::size_t n_eps, std::uint64_t seed,
                               unsigned threads) {
  JensenCheck out;
  const std::size_t N = values.size();
  double vmax = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("jensen_lemma_check: non-finite psi value");
    vmax = std::max(vmax, std::abs(v));
  }
  out.rhs = std::sqrt(static_cast<double>(N)) * vmax;
  if (n_eps == 0) {
    out.estimate = jensen_exact(values);
    out.exact = true;
  } else {
    std::vector<double> draws(n_eps);
    parallel_for(n_eps, threads, [&](std::size_t e) {
      RandomStream rng(seed, streams::sub(streams::kSigns, e));
      CompensatedSum s;
      for (double v : values) s.add(rng.sign() * v);
      draws[e] = std::abs(s.value());
    });
    const auto ms = mean_and_stderr(draws);
    out.estimate = ms.mean;
    out.stderr_ = ms.se;
  }
  out.margin = out.rhs + 3.0 * out.stderr_ - out.estimate;
  out.pass = out.margin >= 0.0;
  return out;
}

JensenCheck jensen_lemma_check(const Expr& psi, const std::vector<std::vector<double>>& points, std::size_t n_eps,
                               std::uint64_t seed, unsigned threads) {
  std::vector<double> values;
  values.reserve(points.size());
  for (const auto& x : points) values.push_back(eval(psi, x));
  return jensen_lemma_check(values, n_eps, seed, threads);
}

}  // namespace cfnet
