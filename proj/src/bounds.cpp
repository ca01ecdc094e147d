#include "cfnet/bounds.hpp"

#include <cmath>

#include "cfnet/poly.hpp"
#include "cfnet/signature.hpp"

namespace cfnet {

namespace {

void check_common(int m, double M, double T, double N) {
  if (m < 1) throw std::invalid_argument("bound: m must be >= 1");
  if (!(M >= 0.0) || !(T >= 0.0)) throw std::invalid_argument("bound: M and T must be >= 0");
  if (!(N >= 1.0) || !std::isfinite(N)) throw std::invalid_argument("bound: N must be >= 1");
}

}  // namespace

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Theorem1:
      return "theorem1";
    case BoundKind::Bilinear:
      return "bilinear";
    case BoundKind::Analytic:
      return "analytic";
    case BoundKind::Hopfield:
      return "hopfield";
  }
  return "?";
}

BoundReport theorem1_bound(const LambdaInput& lambda, int m, double M, double T, double N, int K) {
  check_common(m, M, T, N);
  if (K < 0) throw std::invalid_argument("theorem1_bound: K must be >= 0");
  if (lambda.values.empty() && !lambda.family) {
    throw std::invalid_argument("theorem1_bound: need Lambda_k values or a family");
  }
  if (!lambda.values.empty() && lambda.values.size() < static_cast<std::size_t>(K) + 1) {
    throw std::invalid_argument("theorem1_bound: need Lambda_k for every k <= K");
  }
  const double z = m * M * T;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    if (!lambda.values.empty()) {
      const double lk = lambda.values[k];
      if (!(lk >= 0.0)) throw std::invalid_argument("theorem1_bound: Lambda_k must be >= 0");
      const double w = signature_norm_bound(m * M, T, k);
      terms.push_back(w == 0.0 ? 0.0 : w * lk);
    } else {
      terms.push_back(series_term(*lambda.family, z, k));
    }
  }

  BoundReport rep;
  rep.kind = BoundKind::Theorem1;
  rep.N = N;
  rep.m = m;
  rep.M = M;
  rep.T = T;
  rep.K = K;
  const double sqrt_n = std::sqrt(N);
  rep.partial_sum = sum_descending(terms) / sqrt_n;
  rep.precondition = "ratio test on the Lambda_k family";
  if (lambda.family) {
    rep.tail_family = family_name(*lambda.family);
    std::visit([&](const auto& f) {
      if constexpr (requires { f.r; }) rep.r = f.r;
    }, *lambda.family);
  }
  if (lambda.family && !lambda.truncate) {
    auto tail = truncation_tail(*lambda.family, m, M, T, K);
    if (tail) {
      rep.tail = *tail / sqrt_n;
    } else {
      rep.precondition_ok = false;
    }
  }
  rep.total = rep.partial_sum + rep.tail.value_or(0.0);
  return rep;
}

BoundReport bilinear_bound(double r, int m, double M, double T, double a, double N) {
  check_common(m, M, T, N);
  if (!(r > 0.0) || !(a >= 0.0)) throw std::invalid_argument("bilinear_bound: need r > 0, a >= 0");
  BoundReport rep;
  rep.kind = BoundKind::Bilinear;
  rep.N = N;
  rep.m = m;
  rep.M = M;
  rep.T = T;
  rep.r = r;
  rep.a = a;
  rep.precondition = "none (defined for all M, T)";
  rep.total = r * std::exp(m * M * T * a) / std::sqrt(N);
  return rep;
}

BoundReport analytic_bound(double r, int n, int m, double M, double T, double a_r, double N) {
  check_common(m, M, T, N);
  if (!(r > 0.0) || n < 1 || !(a_r >= 0.0)) throw std::invalid_argument("analytic_bound: need r > 0, n >= 1, a_r >= 0");
  const double q = std::pow(2.0, n) * n * m * M * T * a_r;
  if (!(q < r)) {
    throw NotCertifiedError("series not certified convergent: 2^n n m M T a(r) = " + std::to_string(q) +
                                " is not below r = " + std::to_string(r),
                            q - r);
  }
  BoundReport rep;
  rep.kind = BoundKind::Analytic;
  rep.N = N;
  rep.m = m;
  rep.M = M;
  rep.T = T;
  rep.r = r;
  rep.n = n;
  rep.a_r = a_r;
  rep.precondition = "2^n n m M T a(r) < r";
  rep.margin = r - q;
  rep.total = (1.0 + 2.0 * std::sqrt(static_cast<double>(n))) * r * r / (r - q) / std::sqrt(N);
  return rep;
}

BoundReport hopfield_bound(double r, int n, double M, double T, double a, double b, double N) {
  check_common(1, M, T, N);
  if (!(r > 0.0) || n < 1 || !(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("hopfield_bound: need r, a, b > 0 and n >= 1");
  }
  const double x4 = 4.0 * n * n * M * T * b * a;
  if (!(x4 < 1.0)) {
    throw NotCertifiedError("series not certified convergent: 4 n^2 M T b a = " + std::to_string(x4) +
                                " is not below 1",
                            x4 - 1.0);
  }
  BoundReport rep;
  rep.kind = BoundKind::Hopfield;
  rep.N = N;
  rep.m = n * n;
  rep.M = M;
  rep.T = T;
  rep.r = r;
  rep.n = n;
  rep.a = a;
  rep.b = b;
  rep.precondition = "4 n^2 M T b a < 1";
  rep.margin = 1.0 - x4;
  const double inv2a = 1.0 / (2.0 * a);
  rep.total = (r - inv2a + inv2a / std::sqrt(1.0 - x4)) / std::sqrt(N);
  return rep;
}

unsigned __int128 gamma_k_exact(int k) {
  if (k < 1) throw std::invalid_argument("gamma_k: k must be >= 1 (Lambda_0 is bounded by r separately)");
  if (k > 20) throw std::out_of_range("gamma_k_exact: only k <= 20");
  unsigned __int128 fact = 1;
  for (int j = 2; j <= k; ++j) fact *= static_cast<unsigned>(j);
  unsigned __int128 binom = 1;  // C(2k, k), built as C(k+j, j)
  for (int j = 1; j <= k; ++j) binom = binom * static_cast<unsigned>(k + j) / static_cast<unsigned>(j);
  return fact * binom / 2;
}

double gamma_k(int k) {
  if (k < 1) throw std::invalid_argument("gamma_k: k must be >= 1 (Lambda_0 is bounded by r separately)");
  if (k <= 20) return static_cast<double>(gamma_k_exact(k));
  return std::exp(std::lgamma(k + 1.0) - std::log(2.0) + std::lgamma(2.0 * k + 1.0) - 2.0 * std::lgamma(k + 1.0));
}

std::string to_string_u128(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

double central_binomial_gf(double x) {
  if (!(std::abs(x) < 0.25)) throw std::domain_error("central_binomial_gf: need |x| < 1/4");
  return 1.0 / std::sqrt(1.0 - 4.0 * x);
}

double central_binomial_partial(double x, int K) {
  CompensatedSum s;
  double t = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) t *= x * 2.0 * (2.0 * k - 1.0) / k;
    s.add(t);
  }
  return s.value();
}

std::string to_string(LossKind k) { return k == LossKind::Squared ? "squared" : "absolute"; }

LossKind parse_loss(const std::string& s) {
  if (s == "squared") return LossKind::Squared;
  if (s == "absolute") return LossKind::Absolute;
  throw std::invalid_argument("unknown loss '" + s + "' (expected squared or absolute)");
}

double loss_contraction(LossKind kind, double M1, double M2, double N, double R_F) {
  if (!(M1 >= 0.0) || !(R_F >= 0.0)) throw std::invalid_argument("loss_contraction: M1, R_F must be >= 0");
  if (!(N >= 1.0)) throw std::invalid_argument("loss_contraction: N must be >= 1");
  const double sqrt_n = std::sqrt(N);
  if (kind == LossKind::Squared) {
    if (!(M2 >= 0.0)) throw std::invalid_argument("loss_contraction: squared loss needs M2 >= 0");
    return 4.0 * (M1 + M2) * (M1 / sqrt_n + R_F);
  }
  return 2.0 * M1 / sqrt_n + 2.0 * R_F;
}

double excess_risk_bound(double R_loss, double B, double N, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("excess_risk_bound: need 0 < delta < 1");
  if (!(B >= 0.0) || !(R_loss >= 0.0)) throw std::invalid_argument("excess_risk_bound: need B, R_loss >= 0");
  if (!(N >= 1.0)) throw std::invalid_argument("excess_risk_bound: N must be >= 1");
  return 4.0 * R_loss + B * std::sqrt(2.0 * std::log(1.0 / delta) / N);
}

double bilinear_norm(const SystemSpec& sys, std::uint64_t seed) {
  sys.validate();
  double a = 0.0;
  for (int i = 1; i <= sys.m; ++i) {
    auto A = linear_field_matrix(sys.field(i), sys.n);
    if (!A) throw std::invalid_argument("bilinear_norm: field g" + std::to_string(i) + " is not linear in x");
    a = std::max(a, spectral_norm(*A, seed));
  }
  return a;
}

double polydisc_modulus(const SystemSpec& sys) {
  sys.validate();
  double a = 0.0;
  for (int i = 1; i <= sys.m; ++i) {
    for (const auto& comp : sys.field(i)) {
      auto p = to_polynomial(comp, sys.n);
      if (!p) throw std::invalid_argument("polydisc_modulus: field g" + std::to_string(i) + " is not polynomial");
      a = std::max(a, p->max_modulus_bound(3.0 * sys.r));
    }
  }
  return a;
}

std::optional<double> output_magnitude_bound(const LambdaFamily& family, int m, double M, double T) {
  auto tail = truncation_tail(family, m, M, T, 0);
  if (!tail) return std::nullopt;
  return series_term(family, m * M * T, 0) + *tail;
}

}  // namespace cfnet
