#include "cfnet/tail.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cfnet/numerics.hpp"
#include "cfnet/signature.hpp"

namespace cfnet {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// C(2k, k) x^k for x >= 0.
double central_binomial_term(int k, double x) {
  if (k == 0) return 1.0;
  if (x == 0.0) return 0.0;
  if (k <= 500) {
    double t = 1.0;
    for (int j = 1; j <= k; ++j) t *= x * (2.0 * j - 1.0) * 2.0 / j;  // C(2j,j)/C(2j-2,j-1) = 2(2j-1)/j
    return t;
  }
  return std::exp(std::lgamma(2.0 * k + 1.0) - 2.0 * std::lgamma(k + 1.0) + k * std::log(x));
}

double analytic_ratio(const AnalyticFamily& f) { return std::pow(2.0, f.n) * f.n * f.a_r / f.r; }

double analytic_constant(const AnalyticFamily& f) { return (1.0 + 2.0 * std::sqrt(static_cast<double>(f.n))) * f.r; }

void check_family(const LambdaFamily& f) {
  std::visit(Overloaded{
                 [](const BilinearFamily& b) {
                   if (!(b.r > 0.0) || !(b.a >= 0.0)) throw std::invalid_argument("bilinear family: need r > 0, a >= 0");
                 },
                 [](const AnalyticFamily& a) {
                   if (!(a.r > 0.0) || a.n < 1 || !(a.a_r >= 0.0)) {
                     throw std::invalid_argument("analytic family: need r > 0, n >= 1, a_r >= 0");
                   }
                 },
                 [](const HopfieldFamily& h) {
                   if (!(h.r > 0.0) || !(h.a > 0.0) || !(h.b > 0.0)) {
                     throw std::invalid_argument("hopfield family: need r, a, b > 0");
                   }
                 },
                 [](const GeometricFamily& g) {
                   if (!(g.C >= 0.0) || !(g.rho >= 0.0) || (g.s != 0 && g.s != 1)) {
                     throw std::invalid_argument("geometric family: need C, rho >= 0 and s in {0, 1}");
                   }
                 },
             },
             f);
}

}  // namespace

std::string family_name(const LambdaFamily& f) {
  return std::visit(Overloaded{
                        [](const BilinearFamily&) { return std::string("bilinear"); },
                        [](const AnalyticFamily&) { return std::string("analytic"); },
                        [](const HopfieldFamily&) { return std::string("hopfield"); },
                        [](const GeometricFamily&) { return std::string("geometric"); },
                    },
                    f);
}

double lambda_bound(const LambdaFamily& f, int k) {
  if (k < 0) throw std::invalid_argument("lambda_bound: k must be >= 0");
  check_family(f);
  return std::visit(Overloaded{
                        [k](const BilinearFamily& b) { return b.r * std::pow(b.a, k); },
                        [k](const AnalyticFamily& a) {
                          return analytic_constant(a) * std::exp(std::lgamma(k + 1.0)) * std::pow(analytic_ratio(a), k);
                        },
                        [k](const HopfieldFamily& h) {
                          if (k == 0) return h.r;
                          // gamma(k) = k!/2 * C(2k, k)
                          const double log_gamma = std::lgamma(k + 1.0) - std::log(2.0) + std::lgamma(2.0 * k + 1.0) -
                                                   2.0 * std::lgamma(k + 1.0);
                          return std::exp(log_gamma) * std::pow(h.b, k) * std::pow(h.a, k - 1);
                        },
                        [k](const GeometricFamily& g) {
                          double v = g.C * std::pow(g.rho, k);
                          if (g.s == 1) v *= std::exp(std::lgamma(k + 1.0));
                          return v;
                        },
                    },
                    f);
}

double series_term(const LambdaFamily& f, double z, int k) {
  if (k < 0) throw std::invalid_argument("series_term: k must be >= 0");
  if (z < 0.0) throw std::invalid_argument("series_term: z must be >= 0");
  check_family(f);
  return std::visit(Overloaded{
                        [&](const BilinearFamily& b) { return b.r * signature_norm_bound(z, b.a, k); },
                        [&](const AnalyticFamily& a) {
                          return k == 0 ? analytic_constant(a) : analytic_constant(a) * std::pow(z * analytic_ratio(a), k);
                        },
                        [&](const HopfieldFamily& h) {
                          if (k == 0) return h.r;
                          return central_binomial_term(k, z * h.b * h.a) / (2.0 * h.a);
                        },
                        [&](const GeometricFamily& g) {
                          if (g.s == 0) return g.C * signature_norm_bound(z, g.rho, k);
                          return k == 0 ? g.C : g.C * std::pow(z * g.rho, k);
                        },
                    },
                    f);
}

bool series_converges(const LambdaFamily& f, double z) {
  check_family(f);
  return std::visit(Overloaded{
                        [](const BilinearFamily&) { return true; },
                        [&](const AnalyticFamily& a) { return z * analytic_ratio(a) < 1.0; },
                        [&](const HopfieldFamily& h) { return 4.0 * z * h.b * h.a < 1.0; },
                        [&](const GeometricFamily& g) { return g.s == 0 || z * g.rho < 1.0; },
                    },
                    f);
}

std::optional<double> truncation_tail(const LambdaFamily& f, int m, double M, double T, int K) {
  if (K < 0) throw std::invalid_argument("truncation_tail: K must be >= 0");
  if (m < 1 || M < 0.0 || T < 0.0) throw std::invalid_argument("truncation_tail: need m >= 1, M >= 0, T >= 0");
  check_family(f);
  const double z = m * M * T;
  if (z == 0.0) return 0.0;
  if (!series_converges(f, z)) return std::nullopt;

  // Geometric tails in closed form: C q^(K+1) / (1 - q).
  auto geometric = [K](double c, double q) { return c * std::pow(q, K + 1) / (1.0 - q); };
  if (const auto* a = std::get_if<AnalyticFamily>(&f)) return geometric(analytic_constant(*a), z * analytic_ratio(*a));
  if (const auto* g = std::get_if<GeometricFamily>(&f); g && g->s == 1) return geometric(g->C, z * g->rho);

  // Remaining families have term ratios bounded by ratio_bound(j) for every
  // step after term j.
  auto ratio_bound = [&](int j) -> double {
    if (const auto* b = std::get_if<BilinearFamily>(&f)) return z * b->a / (j + 1.0);
    if (const auto* h = std::get_if<HopfieldFamily>(&f)) return 4.0 * z * h->b * h->a;
    const auto& g = std::get<GeometricFamily>(f);
    return z * g.rho / (j + 1.0);
  };

  CompensatedSum sum;
  for (int k = K + 1;; ++k) {
    const double t = series_term(f, z, k);
    if (!std::isfinite(t)) return std::nullopt;
    sum.add(t);
    const double q = ratio_bound(k);
    if (q < 1.0) {
      const double rest = t * q / (1.0 - q);
      if (rest <= 1e-13 * sum.value() || t == 0.0) return sum.value() + rest;
    }
    if (k > K + 100000) return std::nullopt;
  }
}

}  // namespace cfnet
