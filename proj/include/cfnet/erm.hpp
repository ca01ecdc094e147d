#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfnet/bounds.hpp"
#include "cfnet/dataset.hpp"
#include "cfnet/numerics.hpp"
#include "cfnet/series.hpp"

namespace cfnet {

struct ErmOptions {
  LossKind loss = LossKind::Squared;
  int max_iter = 20000;
  /// Squared loss stops when the projected-gradient step is shorter than
  /// tol * step (the gradient mapping norm falls below tol).
  double tol = 1e-10;
  std::uint64_t seed = 0;  ///< power-iteration start vector
  unsigned threads = 1;
  std::size_t word_cap = kDefaultWordCap;
};

/// Coefficients theta_w for |w| <= K in length-lex order, each inside
/// |theta_w| <= (MT)^|w| / |w|!.
struct FittedModel {
  SystemSpec sys;
  int K = 0;
  LossKind loss = LossKind::Squared;
  std::vector<Word> words;
  std::vector<double> theta;
  std::vector<double> box;
  double train_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;  ///< final gradient mapping norm (squared) or subgradient norm
  double lipschitz = 0.0;  ///< (2/N) sigma_max(Phi)^2 for squared loss
  double step = 0.0;       ///< 1 / lipschitz, or the initial subgradient step
  std::size_t box_violations = 0;  ///< iterates found outside the box (must stay 0)
  std::vector<std::string> warnings;
};

/// Phi^w(X_i): N rows, one column per word (length-lex).
Matrix feature_matrix(const SeriesEvaluator& ev, const Dataset& data, unsigned threads = 1);

/// Box radii (MT)^k / k! per word.
std::vector<double> coefficient_box(const SystemSpec& sys, const std::vector<Word>& words);

/// (1/N) sum loss(Y_i, <theta, Phi(X_i)>).
double empirical_risk(LossKind loss, const Matrix& features, std::span<const double> y,
                      std::span<const double> theta);
double empirical_risk(const FittedModel& model, const SeriesEvaluator& ev, const Dataset& data,
                      unsigned threads = 1);

/// Projected gradient descent on the coefficient box. Squared loss uses the
/// exact gradient with step 1/L, L = (2/N) sigma_max(Phi)^2 from power
/// iteration. Absolute loss uses subgradient steps step0 / sqrt(t + 1) and
/// keeps the best iterate. K = 0 with squared loss is solved in closed form.
/// Hitting max_iter is reported in the model, not thrown.
FittedModel erm_fit(const Dataset& data, const SystemSpec& sys, int K, const ErmOptions& opts = {});
FittedModel erm_fit(const Dataset& data, const SeriesEvaluator& ev, const ErmOptions& opts = {});

}  // namespace cfnet
