#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfnet/dataset.hpp"
#include "cfnet/expr.hpp"
#include "cfnet/series.hpp"

namespace cfnet {

struct RademacherOptions {
  std::size_t n_controls = 256;
  std::size_t n_eps = 512;
  int max_pieces = 4;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t word_cap = kDefaultWordCap;
};

struct RademacherEstimate {
  double estimate = 0.0;  ///< mean over sign draws of the sampled sup
  double stderr_ = 0.0;   ///< standard error of that mean
  std::size_t n_controls = 0;
  std::size_t n_eps = 0;
  std::size_t N = 0;
  int K = 0;
  std::string caveat;
};

/// Monte Carlo estimate of E_eps sup_phi (1/N)|sum eps_i phi(X_i)| where
/// the sup runs over n_controls random controls (stream
/// streams::sub(kControls, c)) and their negations, with phi the order-K
/// series. Sign draw e uses streams::sub(kSigns, e). A lower estimate of
/// the true complexity, since the sup is over a sample of controls.
RademacherEstimate empirical_rademacher(const Dataset& data, const SystemSpec& sys, int K,
                                        const RademacherOptions& opts);

/// Same given the predictions: rows are functions, columns samples.
RademacherEstimate rademacher_from_predictions(const Matrix& predictions, std::size_t n_eps, std::uint64_t seed,
                                               unsigned threads = 1);

struct JensenCheck {
  double estimate = 0.0;  ///< E|sum eps_i psi(X_i)| (MC, or exact if enumerated)
  double stderr_ = 0.0;
  double rhs = 0.0;       ///< sqrt(N) max_i |psi(X_i)|
  bool exact = false;
  bool pass = false;
  double margin = 0.0;    ///< rhs + 3 stderr - estimate
};

/// E|sum eps_i v_i| by enumerating all 2^N sign patterns (N <= 24).
double jensen_exact(std::span<const double> values);

/// Checks E|sum eps_i psi(X_i)| <= sqrt(N) max_i |psi(X_i)|, by MC over
/// n_eps sign draws (or exactly when n_eps == 0 and N <= 24).
JensenCheck jensen_lemma_check(const Expr& psi, const std::vector<std::vector<double>>& points, std::size_t n_eps,
                               std::uint64_t seed, unsigned threads = 1);
JensenCheck jensen_lemma_check(std::span<const double> values, std::size_t n_eps, std::uint64_t seed,
                               unsigned threads = 1);

}  // namespace cfnet
