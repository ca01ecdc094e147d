#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfnet/numerics.hpp"
#include "cfnet/system.hpp"
#include "cfnet/tail.hpp"

namespace cfnet {

/// A closed-form bound was requested outside its convergence condition.
class NotCertifiedError : public std::domain_error {
 public:
  NotCertifiedError(const std::string& what, double margin)
      : std::domain_error(what + " (margin " + std::to_string(margin) + ")"), margin_(margin) {}
  /// lhs - rhs of the violated strict inequality lhs < rhs (>= 0).
  double margin() const { return margin_; }

 private:
  double margin_;
};

enum class BoundKind { Theorem1, Bilinear, Analytic, Hopfield };
std::string to_string(BoundKind k);

/// Certificate for the empirical Rademacher complexity R_N(F).
struct BoundReport {
  BoundKind kind = BoundKind::Theorem1;
  double N = 1;
  int m = 1;
  double M = 0.0;
  double T = 0.0;
  double r = 0.0;
  int n = 0;                 ///< analytic / hopfield
  double a = 0.0;            ///< bilinear spectral norm or hopfield growth rate
  double a_r = 0.0;          ///< analytic polydisc modulus
  double b = 0.0;            ///< hopfield growth scale
  int K = -1;                ///< theorem1 partial-sum order
  std::optional<std::string> tail_family;
  double partial_sum = 0.0;  ///< theorem1: (1/sqrt N) sum_{k<=K}
  std::optional<double> tail;  ///< theorem1: (1/sqrt N) sum_{k>K}; nullopt if unavailable
  double total = 0.0;
  bool precondition_ok = true;
  std::string precondition;  ///< human-readable condition that was checked
  std::optional<double> margin;  ///< headroom of the condition (> 0 when it holds)
};

/// Lambda_k supplied either as explicit values for k <= K or by a family.
struct LambdaInput {
  std::vector<double> values;          ///< Lambda_0..Lambda_K when non-empty
  std::optional<LambdaFamily> family;  ///< used for k <= K if values is empty, and for the tail
  bool truncate = false;               ///< report tail as unavailable instead of using the family
};

/// (1/sqrt N) sum_k (mMT)^k / k! Lambda_k split at K. Terms are summed in
/// descending magnitude with compensation. A divergent tail marks the
/// precondition failed and leaves tail unset; the partial sum is kept.
BoundReport theorem1_bound(const LambdaInput& lambda, int m, double M, double T, double N, int K);

/// r exp(mMTa) / sqrt N.
BoundReport bilinear_bound(double r, int m, double M, double T, double a, double N);
/// ((1 + 2 sqrt n) r / sqrt N) * r / (r - 2^n n m M T a_r). Throws
/// NotCertifiedError unless 2^n n m M T a_r < r.
BoundReport analytic_bound(double r, int n, int m, double M, double T, double a_r, double N);
/// (r - 1/(2a) + 1/(2a sqrt(1 - 4 n^2 M T b a))) / sqrt N, m = n^2 implied.
/// Throws NotCertifiedError unless 4 n^2 M T b a < 1.
BoundReport hopfield_bound(double r, int n, double M, double T, double a, double b, double N);

/// gamma(k) = k!/2 * C(2k, k), k >= 1. Exact integer value for k <= 20.
unsigned __int128 gamma_k_exact(int k);
/// gamma(k) in floating point (log-gamma above 20). Rejects k = 0.
double gamma_k(int k);
std::string to_string_u128(unsigned __int128 v);

/// 1 / sqrt(1 - 4x), |x| < 1/4.
double central_binomial_gf(double x);
/// sum_{k<=K} C(2k, k) x^k.
double central_binomial_partial(double x, int K);

enum class LossKind { Squared, Absolute };
std::string to_string(LossKind k);
LossKind parse_loss(const std::string& s);

/// Rademacher complexity of the loss class from R_N(F):
/// squared 4 (M1 + M2)(M1/sqrt N + R_F), absolute 2 M1/sqrt N + 2 R_F.
double loss_contraction(LossKind kind, double M1, double M2, double N, double R_F);

/// 4 R_loss + B sqrt(2 ln(1/delta) / N), 0 < delta < 1.
double excess_risk_bound(double R_loss, double B, double N, double delta);

/// Max spectral norm over the channels of a bilinear system (power
/// iteration, fixed seed). Throws if some field is not linear.
double bilinear_norm(const SystemSpec& sys, std::uint64_t seed = 0);

/// a(r) for polynomial fields: every |z_j| <= 3r on the polydiscs
/// P(x, 2r), x in the r-ball, so the coefficient bound at radius 3r
/// dominates the maximum modulus. Throws if a field is not polynomial.
double polydisc_modulus(const SystemSpec& sys);

/// sup |phi| over the class: sum_k (mMT)^k / k! * Lambda_k^bound (the
/// theorem1 sum without the 1/sqrt N factor). nullopt when it diverges.
std::optional<double> output_magnitude_bound(const LambdaFamily& family, int m, double M, double T);

}  // namespace cfnet
