#include "cfnet/poly.hpp"

#include <cmath>

namespace cfnet {

namespace {

Polynomial constant_poly(int n, double c) {
  Polynomial p{n, {}};
  if (c != 0.0) p.terms[std::vector<int>(n, 0)] = c;
  return p;
}

Polynomial add(Polynomial a, const Polynomial& b) {
  for (const auto& [mono, c] : b.terms) {
    double& slot = a.terms[mono];
    slot += c;
    if (slot == 0.0) a.terms.erase(mono);
  }
  return a;
}

Polynomial mul(const Polynomial& a, const Polynomial& b) {
  Polynomial out{a.n, {}};
  for (const auto& [ma, ca] : a.terms) {
    for (const auto& [mb, cb] : b.terms) {
      std::vector<int> m(a.n);
      for (int j = 0; j < a.n; ++j) m[j] = ma[j] + mb[j];
      out.terms[m] += ca * cb;
    }
  }
  std::erase_if(out.terms, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

}  // namespace

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [mono, c] : terms) {
    int s = 0;
    for (int e : mono) s += e;
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::max_modulus_bound(double radius) const {
  double total = 0.0;
  for (const auto& [mono, c] : terms) {
    double t = std::abs(c);
    for (int e : mono) t *= std::pow(radius, e);
    total += t;
  }
  return total;
}

std::optional<Polynomial> to_polynomial(const Expr& e, int n) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return constant_poly(n, e.value());
    case NodeKind::Var: {
      if (e.index() > n) return std::nullopt;
      Polynomial p{n, {}};
      std::vector<int> m(n, 0);
      m[e.index() - 1] = 1;
      p.terms[m] = 1.0;
      return p;
    }
    case NodeKind::Sum: {
      Polynomial acc = constant_poly(n, 0.0);
      for (const auto& t : e.children()) {
        auto p = to_polynomial(t, n);
        if (!p) return std::nullopt;
        acc = add(std::move(acc), *p);
      }
      return acc;
    }
    case NodeKind::Product: {
      Polynomial acc = constant_poly(n, 1.0);
      for (const auto& f : e.children()) {
        auto p = to_polynomial(f, n);
        if (!p) return std::nullopt;
        acc = mul(acc, *p);
      }
      return acc;
    }
    case NodeKind::Power: {
      auto base = to_polynomial(e.children()[0], n);
      if (!base) return std::nullopt;
      Polynomial acc = constant_poly(n, 1.0);
      for (int i = 0; i < e.exponent(); ++i) acc = mul(acc, *base);
      return acc;
    }
    case NodeKind::Primitive:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Matrix> linear_field_matrix(std::span<const Expr> field, int n) {
  Matrix a(field.size(), static_cast<std::size_t>(n));
  for (std::size_t row = 0; row < field.size(); ++row) {
    auto p = to_polynomial(field[row], n);
    if (!p) return std::nullopt;
    for (const auto& [mono, c] : p->terms) {
      int deg = 0, which = -1;
      for (int j = 0; j < n; ++j) {
        deg += mono[j];
        if (mono[j] == 1) which = j;
      }
      if (deg != 1) return std::nullopt;
      a(row, static_cast<std::size_t>(which)) = c;
    }
  }
  return a;
}

}  // namespace cfnet
