#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfnet/lie.hpp"
#include "cfnet/signature.hpp"
#include "cfnet/system.hpp"
#include "cfnet/tail.hpp"

namespace cfnet {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double time, const std::string& what)
      : std::runtime_error(what + " at t = " + std::to_string(time)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct OdeResult {
  std::vector<double> final_state;
  double y = 0.0;          ///< c^T x(T) at the requested step
  double y_refined = 0.0;  ///< same with step / 2
  /// Richardson estimate of |y - y_exact|: 16/15 |y - y_refined|.
  double error_estimate = 0.0;
  std::size_t steps = 0;
  std::vector<double> times;                   ///< filled when a trajectory is kept
  std::vector<std::vector<double>> trajectory;
};

/// Classical RK4 on x' = sum_i u_i(t) g_i(x). Each control piece is split
/// into ceil(length / step) equal substeps, so every breakpoint is a step
/// boundary. Throws IntegrationError on a non-finite state.
OdeResult ode_reference(const SystemSpec& sys, std::span<const double> x0, const ControlPath& u, double step,
                        bool keep_trajectory = false);

/// Same with an additional drift field: x' = f(x) + sum_i u_i g_i(x).
OdeResult ode_reference_with_drift(const SystemSpec& sys, std::span<const Expr> drift, std::span<const double> x0,
                                   const ControlPath& u, double step, bool keep_trajectory = false);

/// Rewrites x' = f(x) + sum u_i g_i(x) as a driftless system with channel 1
/// carrying g = f / M0 (existing channels shift up by one). Pair with
/// prepend_constant_channel(u, M0). Declared M becomes max(M, |M0|).
SystemSpec absorb_drift(const SystemSpec& sys, std::span<const Expr> drift, double M0);

/// Adds channel 1 with u_1 == M0 ahead of u's channels.
ControlPath prepend_constant_channel(const ControlPath& u, double M0);

struct SeriesOptions {
  /// Lambda_k family for the truncation tail; without one the tail is
  /// reported as unavailable.
  std::optional<LambdaFamily> family;
  bool run_oracle = false;
  double oracle_step = 1e-3;
  std::size_t word_cap = kDefaultWordCap;
};

struct SeriesEvaluation {
  std::vector<double> x0;
  int K = 0;
  double value = 0.0;                  ///< y_K
  std::vector<double> contributions;   ///< order-k parts, k = 0..K
  std::optional<double> tail_bound;    ///< nullopt: unavailable or divergent
  bool tail_divergent = false;
  std::optional<double> oracle_value;  ///< RK4 y(T)
  std::optional<double> oracle_error;  ///< its Richardson estimate
  std::optional<double> discrepancy;   ///< |y_K - y_ode|
  std::vector<std::string> warnings;
};

/// Holds the Lie table and feature expressions for one system and order so
/// repeated evaluations (many x0, many controls) reuse them.
class SeriesEvaluator {
 public:
  SeriesEvaluator(SystemSpec sys, int K, std::size_t word_cap = kDefaultWordCap);

  const SystemSpec& system() const { return sys_; }
  int order() const { return K_; }
  std::size_t feature_count() const { return features_.size(); }
  /// Phi^w for all |w| <= K in length-lex order.
  const std::vector<Expr>& feature_exprs() const { return features_; }
  const std::vector<Word>& words() const { return words_; }
  const LieTable& table() const { return table_; }

  /// Phi^w(x) for all |w| <= K in length-lex order.
  std::vector<double> features(std::span<const double> x) const;

  /// Pairs a precomputed signature with Phi(x) (no oracle, no tail).
  double value(std::span<const double> x, const SignatureTable& sig) const;

  SeriesEvaluation evaluate(std::span<const double> x0, const ControlPath& u, const SignatureTable& sig,
                            const SeriesOptions& opts = {}) const;
  SeriesEvaluation evaluate(std::span<const double> x0, const ControlPath& u, const SeriesOptions& opts = {}) const;

 private:
  SystemSpec sys_;
  int K_;
  LieTable table_;
  std::vector<Word> words_;
  std::vector<Expr> features_;
};

/// y_K = sum_{|w| <= K} S^w(u) Phi^w(x0) with per-order contributions.
SeriesEvaluation chen_fliess_eval(const SystemSpec& sys, std::span<const double> x0, const ControlPath& u, int K,
                                  const SeriesOptions& opts = {});

/// Throws std::invalid_argument unless u has sys.m channels, bound <= M and
/// horizon == T (up to 1e-12 relative).
void check_control_conforms(const SystemSpec& sys, const ControlPath& u);

}  // namespace cfnet
