#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cfnet {

/// Constants (a, b) with sup_x |f^{(k)}(x)| <= b * a^k * k! for all k >= 0.
struct GrowthConstants {
  double a = 1.0;
  double b = 1.0;
};

/// A registered analytic scalar function usable inside expressions.
struct PrimitiveSpec {
  std::string name;
  /// f^{(order)}(x).
  std::function<double(int order, double x)> eval;
  /// Upper bound on sup_{|x| <= radius} |f^{(order)}(x)|.
  std::function<double(int order, double radius)> magnitude_bound;
  GrowthConstants growth;
};

/// Name -> primitive table consulted by the parser.
class PrimitiveRegistry {
 public:
  PrimitiveRegistry() = default;

  /// Registry with "sigma" and "logistic" (logistic sigmoid) and "tanh".
  static const PrimitiveRegistry& defaults();

  void add(PrimitiveSpec spec);
  std::shared_ptr<const PrimitiveSpec> find(const std::string& name) const;
  std::vector<std::string> names() const;

  /// Copy of this registry where `name` carries different growth constants.
  PrimitiveRegistry with_growth(const std::string& name, GrowthConstants g) const;

 private:
  std::map<std::string, std::shared_ptr<const PrimitiveSpec>> table_;
};

/// Logistic sigmoid 1/(1+e^{-x}). Default growth constants a = 1, b = 1:
/// on the strip |Im z| <= 1 the real part of 1 + e^{-z} stays >= 1, so
/// |sigma| <= 1 there and Cauchy estimates give sup|sigma^{(k)}| <= k!.
PrimitiveSpec logistic_primitive(std::string name = "logistic");

/// tanh. Default growth constants a = 2, b = 1.14: on |Im z| <= 1/2,
/// |tanh z|^2 <= 2 / (1 + cos 1) < 1.2985, so |tanh| < 1.1396.
PrimitiveSpec tanh_primitive(std::string name = "tanh");

/// Coefficients (ascending powers of s) of the polynomial P_d with
/// sigma^{(d)}(x) = P_d(sigma(x)), P_{d+1} = s(1-s) P_d'.
const std::vector<double>& logistic_derivative_poly(int order);
/// Same for tanh: tanh^{(d)}(x) = Q_d(tanh(x)), Q_{d+1} = (1-t^2) Q_d'.
const std::vector<double>& tanh_derivative_poly(int order);

/// Upper bound on max_{s in [lo, hi]} |p(s)| from the Bernstein coefficients
/// of p on the interval, with a small rounding allowance.
double polynomial_abs_bound(const std::vector<double>& coeffs, double lo, double hi);

}  // namespace cfnet
