#include "cfnet/series.hpp"

#include <cmath>

#include "cfnet/numerics.hpp"

namespace cfnet {

namespace {

struct Rk4Run {
  std::vector<double> state;
  std::size_t steps = 0;
};

Rk4Run integrate(const SystemSpec& sys, std::span<const Expr> drift, std::span<const double> x0, const ControlPath& u,
                 double step, std::vector<double>* times, std::vector<std::vector<double>>* traj) {
  const int n = sys.n;
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto field = [&](std::span<const double> uval, std::span<const double> at, std::span<double> out) {
    eval_field(sys, uval, at, out);
    for (std::size_t j = 0; j < drift.size(); ++j) out[j] += eval(drift[j], at);
  };
  Rk4Run run;
  if (times) {
    times->push_back(0.0);
    traj->push_back(x);
  }
  const auto& bp = u.breakpoints();
  for (std::size_t p = 0; p < u.pieces(); ++p) {
    const auto& uval = u.values()[p];
    const double len = bp[p + 1] - bp[p];
    const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(len / step - 1e-9)));
    const double h = len / static_cast<double>(sub);
    for (std::size_t s = 0; s < sub; ++s) {
      field(uval, x, k1);
      for (int j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k1[j];
      field(uval, tmp, k2);
      for (int j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k2[j];
      field(uval, tmp, k3);
      for (int j = 0; j < n; ++j) tmp[j] = x[j] + h * k3[j];
      field(uval, tmp, k4);
      for (int j = 0; j < n; ++j) x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      ++run.steps;
      const double t = bp[p] + h * static_cast<double>(s + 1);
      for (double v : x) {
        if (!std::isfinite(v)) throw IntegrationError(t, "non-finite state (blow-up)");
      }
      if (times) {
        times->push_back(s + 1 == sub ? bp[p + 1] : t);
        traj->push_back(x);
      }
    }
  }
  run.state = std::move(x);
  return run;
}

OdeResult reference(const SystemSpec& sys, std::span<const Expr> drift, std::span<const double> x0,
                    const ControlPath& u, double step, bool keep) {
  sys.validate();
  if (!(step > 0.0)) throw std::invalid_argument("ode_reference: step must be > 0");
  if (x0.size() != static_cast<std::size_t>(sys.n)) throw std::invalid_argument("ode_reference: x0 must have n entries");
  if (u.channels() != sys.m) throw std::invalid_argument("ode_reference: control channel count differs from m");
  if (!drift.empty() && drift.size() != static_cast<std::size_t>(sys.n)) {
    throw std::invalid_argument("ode_reference: drift must have n components");
  }
  OdeResult res;
  auto coarse = integrate(sys, drift, x0, u, step, keep ? &res.times : nullptr, keep ? &res.trajectory : nullptr);
  auto fine = integrate(sys, drift, x0, u, step / 2.0, nullptr, nullptr);
  res.final_state = coarse.state;
  res.steps = coarse.steps;
  res.y = dot(sys.c, coarse.state);
  res.y_refined = dot(sys.c, fine.state);
  res.error_estimate = 16.0 / 15.0 * std::abs(res.y - res.y_refined);
  return res;
}

}  // namespace

OdeResult ode_reference(const SystemSpec& sys, std::span<const double> x0, const ControlPath& u, double step,
                        bool keep_trajectory) {
  return reference(sys, {}, x0, u, step, keep_trajectory);
}

OdeResult ode_reference_with_drift(const SystemSpec& sys, std::span<const Expr> drift, std::span<const double> x0,
                                   const ControlPath& u, double step, bool keep_trajectory) {
  return reference(sys, drift, x0, u, step, keep_trajectory);
}

SystemSpec absorb_drift(const SystemSpec& sys, std::span<const Expr> drift, double M0) {
  sys.validate();
  if (M0 == 0.0 || !std::isfinite(M0)) throw std::invalid_argument("absorb_drift: M0 must be finite and non-zero");
  if (drift.size() != static_cast<std::size_t>(sys.n)) throw std::invalid_argument("absorb_drift: drift must have n components");
  SystemSpec out = sys;
  std::vector<Expr> g0;
  for (const auto& f : drift) {
    if (f.max_var_index() > sys.n) throw std::invalid_argument("absorb_drift: drift references a variable beyond n");
    g0.push_back(simplify(Expr::product({Expr::constant(1.0 / M0), f})));
  }
  out.g.insert(out.g.begin(), std::move(g0));
  out.m = sys.m + 1;
  out.M = std::max(sys.M, std::abs(M0));
  return out;
}

ControlPath prepend_constant_channel(const ControlPath& u, double M0) {
  auto values = u.values();
  for (auto& row : values) row.insert(row.begin(), M0);
  return ControlPath(u.channels() + 1, u.breakpoints(), std::move(values), std::max(u.bound(), std::abs(M0)));
}

void check_control_conforms(const SystemSpec& sys, const ControlPath& u) {
  if (u.channels() != sys.m) {
    throw std::invalid_argument("control has " + std::to_string(u.channels()) + " channels, system has m = " +
                                std::to_string(sys.m));
  }
  if (u.bound() > sys.M * (1.0 + 1e-12)) {
    throw std::invalid_argument("control bound " + std::to_string(u.bound()) + " exceeds system M = " +
                                std::to_string(sys.M));
  }
  if (std::abs(u.horizon() - sys.T) > 1e-12 * std::max(1.0, sys.T)) {
    throw std::invalid_argument("control horizon " + std::to_string(u.horizon()) + " differs from system T = " +
                                std::to_string(sys.T));
  }
}

SeriesEvaluator::SeriesEvaluator(SystemSpec sys, int K, std::size_t word_cap)
    : sys_(std::move(sys)), K_(K), table_(sys_) {
  if (K < 0) throw std::invalid_argument("series order K must be >= 0");
  check_word_budget(words_up_to_count(sys_.m, K), word_cap, "series of order " + std::to_string(K));
  words_ = words_up_to(sys_.m, K);
  features_.reserve(words_.size());
  for (const auto& w : words_) features_.push_back(table_.feature(w));
}

std::vector<double> SeriesEvaluator::features(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(sys_.n)) throw std::invalid_argument("features: point must have n entries");
  std::vector<double> out(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) out[i] = eval(features_[i], x);
  return out;
}

double SeriesEvaluator::value(std::span<const double> x, const SignatureTable& sig) const {
  if (sig.order() < K_ || sig.channels() != sys_.m) throw std::invalid_argument("signature table does not cover the series");
  CompensatedSum acc;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (sig[i] == 0.0) continue;
    acc.add(sig[i] * eval(features_[i], x));
  }
  return acc.value();
}

SeriesEvaluation SeriesEvaluator::evaluate(std::span<const double> x0, const ControlPath& u, const SignatureTable& sig,
                                           const SeriesOptions& opts) const {
  if (x0.size() != static_cast<std::size_t>(sys_.n)) throw std::invalid_argument("x0 must have n entries");
  if (norm2(x0) > sys_.r * (1.0 + 1e-12)) {
    throw std::invalid_argument("|x0| = " + std::to_string(norm2(x0)) + " exceeds domain radius r = " +
                                std::to_string(sys_.r));
  }
  check_control_conforms(sys_, u);
  if (sig.order() < K_ || sig.channels() != sys_.m) throw std::invalid_argument("signature table does not cover the series");

  SeriesEvaluation ev;
  ev.x0.assign(x0.begin(), x0.end());
  ev.K = K_;
  ev.contributions.assign(static_cast<std::size_t>(K_) + 1, 0.0);
  std::size_t idx = 0;
  for (int k = 0; k <= K_; ++k) {
    CompensatedSum part;
    const std::size_t count = word_count(sys_.m, k);
    for (std::size_t c = 0; c < count; ++c, ++idx) {
      if (sig[idx] == 0.0) continue;
      part.add(sig[idx] * eval(features_[idx], x0));
    }
    ev.contributions[k] = part.value();
  }
  double total = 0.0;
  for (double c : ev.contributions) total += c;
  ev.value = total;
  for (double c : ev.contributions) {
    if (!std::isfinite(c)) throw std::runtime_error("series evaluation produced a non-finite contribution");
  }

  if (opts.family) {
    ev.tail_bound = truncation_tail(*opts.family, sys_.m, sys_.M, sys_.T, K_);
    if (!ev.tail_bound) {
      ev.tail_divergent = true;
      ev.warnings.push_back("ratio test fails for the " + family_name(*opts.family) +
                            " family: tail decay not certified");
    }
  }
  if (opts.run_oracle) {
    auto ode = ode_reference(sys_, x0, u, opts.oracle_step);
    ev.oracle_value = ode.y;
    ev.oracle_error = ode.error_estimate;
    ev.discrepancy = std::abs(ev.value - ode.y);
  }
  for (auto& w : sys_.warnings()) ev.warnings.push_back(std::move(w));
  return ev;
}

SeriesEvaluation SeriesEvaluator::evaluate(std::span<const double> x0, const ControlPath& u,
                                           const SeriesOptions& opts) const {
  return evaluate(x0, u, signature_up_to(u, K_, opts.word_cap), opts);
}

SeriesEvaluation chen_fliess_eval(const SystemSpec& sys, std::span<const double> x0, const ControlPath& u, int K,
                                  const SeriesOptions& opts) {
  SeriesEvaluator evaluator(sys, K, opts.word_cap);
  return evaluator.evaluate(x0, u, opts);
}

}  // namespace cfnet
