#include "cfnet/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace cfnet {

namespace {

// P_{d+1} = factor * P_d' with `factor` a fixed polynomial. Grows on demand.
class DerivativePolys {
 public:
  DerivativePolys(std::vector<double> p0, std::vector<double> factor)
      : factor_(std::move(factor)) {
    polys_.push_back(std::move(p0));
  }

  const std::vector<double>& get(int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    std::lock_guard lock(mu_);
    while (static_cast<int>(polys_.size()) <= order) {
      const auto& p = polys_.back();
      std::vector<double> dp;
      for (std::size_t i = 1; i < p.size(); ++i) dp.push_back(static_cast<double>(i) * p[i]);
      std::vector<double> next(dp.size() + factor_.size() - 1 + (dp.empty() ? 1 : 0), 0.0);
      for (std::size_t i = 0; i < dp.size(); ++i) {
        for (std::size_t j = 0; j < factor_.size(); ++j) next[i + j] += dp[i] * factor_[j];
      }
      if (next.empty()) next.push_back(0.0);
      polys_.push_back(std::move(next));
    }
    return polys_[order];
  }

 private:
  std::mutex mu_;
  std::vector<double> factor_;
  // Capacity covers every supported order, so returned references stay valid.
  std::vector<std::vector<double>> polys_ = [] {
    std::vector<std::vector<double>> v;
    v.reserve(512);
    return v;
  }();
};

DerivativePolys& logistic_polys() {
  static DerivativePolys polys({0.0, 1.0}, {0.0, 1.0, -1.0});
  return polys;
}

DerivativePolys& tanh_polys() {
  static DerivativePolys polys({0.0, 1.0}, {1.0, 0.0, -1.0});
  return polys;
}

double horner(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_order(int order) {
  if (order < 0) throw std::domain_error("primitive derivative order must be >= 0");
  if (order > 500) throw std::domain_error("primitive derivative order above 500 is not supported");
}

}  // namespace

const std::vector<double>& logistic_derivative_poly(int order) {
  check_order(order);
  return logistic_polys().get(order);
}

const std::vector<double>& tanh_derivative_poly(int order) {
  check_order(order);
  return tanh_polys().get(order);
}

double polynomial_abs_bound(const std::vector<double>& coeffs, double lo, double hi) {
  if (coeffs.empty()) return 0.0;
  const std::size_t n = coeffs.size() - 1;
  const double width = hi - lo;
  // Taylor shift to t in [0, 1]: q(t) = p(lo + width * t).
  std::vector<double> q(n + 1, 0.0), q_abs(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    // C(i, j) lo^(i-j) width^j
    double c = 1.0;
    for (std::size_t j = 0; j <= i; ++j) {
      const double term = coeffs[i] * c * std::pow(lo, static_cast<double>(i - j)) *
                          std::pow(width, static_cast<double>(j));
      q[j] += term;
      q_abs[j] += std::abs(term);
      c = c * static_cast<double>(i - j) / static_cast<double>(j + 1);
    }
  }
  double best = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    double b = 0.0, b_abs = 0.0;
    double ckj = 1.0;  // C(k, j)
    double cnj = 1.0;  // C(n, j)
    for (std::size_t j = 0; j <= k; ++j) {
      b += ckj / cnj * q[j];
      b_abs += ckj / cnj * q_abs[j];
      ckj = ckj * static_cast<double>(k - j) / static_cast<double>(j + 1);
      cnj = cnj * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    const double slack = 1e-12 * b_abs + std::numeric_limits<double>::denorm_min();
    best = std::max(best, std::abs(b) + slack);
  }
  return best;
}

PrimitiveSpec logistic_primitive(std::string name) {
  PrimitiveSpec spec;
  spec.name = std::move(name);
  spec.eval = [](int order, double x) {
    check_order(order);
    const double s = logistic(x);
    if (order == 0) return s;
    return horner(logistic_polys().get(order), s);
  };
  spec.magnitude_bound = [](int order, double radius) {
    check_order(order);
    const double r = std::abs(radius);
    return polynomial_abs_bound(logistic_polys().get(order), logistic(-r), logistic(r));
  };
  spec.growth = {1.0, 1.0};
  return spec;
}

PrimitiveSpec tanh_primitive(std::string name) {
  PrimitiveSpec spec;
  spec.name = std::move(name);
  spec.eval = [](int order, double x) {
    check_order(order);
    const double t = std::tanh(x);
    if (order == 0) return t;
    return horner(tanh_polys().get(order), t);
  };
  spec.magnitude_bound = [](int order, double radius) {
    check_order(order);
    const double r = std::abs(radius);
    return polynomial_abs_bound(tanh_polys().get(order), std::tanh(-r), std::tanh(r));
  };
  spec.growth = {2.0, 1.14};
  return spec;
}

const PrimitiveRegistry& PrimitiveRegistry::defaults() {
  static const PrimitiveRegistry reg = [] {
    PrimitiveRegistry r;
    r.add(logistic_primitive("sigma"));
    r.add(logistic_primitive("logistic"));
    r.add(tanh_primitive("tanh"));
    return r;
  }();
  return reg;
}

void PrimitiveRegistry::add(PrimitiveSpec spec) {
  if (spec.name.empty()) throw std::invalid_argument("primitive name must be non-empty");
  if (!spec.eval || !spec.magnitude_bound) {
    throw std::invalid_argument("primitive '" + spec.name + "' needs eval and magnitude_bound");
  }
  if (spec.name.size() > 1 && spec.name[0] == 'x' &&
      std::all_of(spec.name.begin() + 1, spec.name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument("primitive name '" + spec.name + "' collides with a variable");
  }
  auto name = spec.name;
  table_[name] = std::make_shared<const PrimitiveSpec>(std::move(spec));
}

std::shared_ptr<const PrimitiveSpec> PrimitiveRegistry::find(const std::string& name) const {
  auto it = table_.find(name);
  return it == table_.end() ? nullptr : it->second;
}

std::vector<std::string> PrimitiveRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : table_) out.push_back(k);
  return out;
}

PrimitiveRegistry PrimitiveRegistry::with_growth(const std::string& name, GrowthConstants g) const {
  auto base = find(name);
  if (!base) throw std::invalid_argument("unknown primitive '" + name + "'");
  if (!(g.a > 0.0) || !(g.b > 0.0)) throw std::invalid_argument("growth constants must be positive");
  PrimitiveRegistry copy = *this;
  PrimitiveSpec spec = *base;
  spec.growth = g;
  copy.add(std::move(spec));
  return copy;
}

}  // namespace cfnet
