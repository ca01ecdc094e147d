#pragma once

// Random generators shared by the property tests.

#include <cmath>
#include <vector>

#include "cfnet/expr.hpp"
#include "cfnet/numerics.hpp"
#include "cfnet/primitives.hpp"
#include "cfnet/signature.hpp"

namespace testing {

using cfnet::Expr;
using cfnet::RandomStream;

/// Random smooth expression over x1..xn. Exponents stay small and
/// primitives are logistic or tanh so values remain moderate on [-1, 1]^n.
inline Expr random_expr(RandomStream& rng, int n, int depth) {
  const auto& reg = cfnet::PrimitiveRegistry::defaults();
  if (depth == 0 || rng.uniform() < 0.25) {
    if (rng.uniform() < 0.4) return Expr::constant(std::round(rng.uniform(-3.0, 3.0) * 4.0) / 4.0);
    return Expr::var(rng.uniform_int(1, n));
  }
  switch (rng.uniform_int(0, 4)) {
    case 0:
    case 1: {
      std::vector<Expr> kids;
      const int count = rng.uniform_int(2, 3);
      for (int i = 0; i < count; ++i) kids.push_back(random_expr(rng, n, depth - 1));
      return Expr::sum(std::move(kids));
    }
    case 2: {
      std::vector<Expr> kids;
      const int count = rng.uniform_int(2, 3);
      for (int i = 0; i < count; ++i) kids.push_back(random_expr(rng, n, depth - 1));
      return Expr::product(std::move(kids));
    }
    case 3:
      return Expr::power(random_expr(rng, n, depth - 1), rng.uniform_int(0, 3));
    default: {
      auto spec = reg.find(rng.uniform() < 0.5 ? "sigma" : "tanh");
      return Expr::primitive(spec, rng.uniform_int(0, 2), random_expr(rng, n, depth - 1));
    }
  }
}

inline std::vector<double> random_point(RandomStream& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = rng.uniform(lo, hi);
  return x;
}

/// Piecewise-constant path with 1..max_pieces pieces, values in [-M, M].
/// Piecewise-constant path with exactly `pieces` jittered pieces.
inline cfnet::ControlPath random_path_pieces(RandomStream& rng, int m, double M, double T, int pieces) {
  std::vector<double> bp{0.0};
  for (int p = 1; p < pieces; ++p) bp.push_back(T * p / pieces + rng.uniform(-0.3, 0.3) * T / pieces);
  bp.push_back(T);
  std::vector<std::vector<double>> values;
  for (int p = 0; p < pieces; ++p) values.push_back(random_point(rng, m, -M, M));
  return cfnet::ControlPath(m, bp, values, M);
}

inline cfnet::ControlPath random_path(RandomStream& rng, int m, double M, double T, int max_pieces) {
  const int pieces = rng.uniform_int(1, max_pieces);
  return random_path_pieces(rng, m, M, T, pieces);
}

}  // namespace testing
