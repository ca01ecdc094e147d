#pragma once

#include <optional>
#include <string>
#include <variant>

namespace cfnet {

/// Lambda_k <= r a^k (bilinear fields, a = max spectral norm).
struct BilinearFamily {
  double r = 1.0;
  double a = 0.0;
};

/// Lambda_k <= (1 + 2 sqrt(n)) r k! (2^n n a_r / r)^k (analytic fields with
/// polydisc maximum modulus a_r).
struct AnalyticFamily {
  double r = 1.0;
  int n = 1;
  double a_r = 0.0;
};

/// Lambda_0 <= r, Lambda_k <= gamma(k) b^k a^(k-1) for k >= 1 (Hopfield
/// fields sigma(x_j) e_i with sup|sigma^(k)| <= b a^k k!).
struct HopfieldFamily {
  double r = 1.0;
  double a = 1.0;
  double b = 1.0;
};

/// User template Lambda_k <= C rho^k (k!)^s with s in {0, 1}.
struct GeometricFamily {
  double C = 1.0;
  double rho = 0.0;
  int s = 0;
};

using LambdaFamily = std::variant<BilinearFamily, AnalyticFamily, HopfieldFamily, GeometricFamily>;

std::string family_name(const LambdaFamily& f);

/// The family's bound on Lambda_k. May overflow to +inf for large k.
double lambda_bound(const LambdaFamily& f, int k);

/// (z^k / k!) * lambda_bound(k), evaluated without forming the factorials
/// separately. z = m M T.
double series_term(const LambdaFamily& f, double z, int k);

/// True when sum_k series_term(k) converges (ratio test).
bool series_converges(const LambdaFamily& f, double z);

/// sum_{k > K} (mMT)^k / k! * Lambda_k^bound, or nullopt when the ratio test
/// says the series diverges. Geometric cases use the closed form; the others
/// sum terms until a ratio-bounded remainder is below 1e-13 of the total and
/// add that remainder, so the result is an upper bound.
std::optional<double> truncation_tail(const LambdaFamily& f, int m, double M, double T, int K);

}  // namespace cfnet
