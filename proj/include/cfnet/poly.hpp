#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cfnet/expr.hpp"
#include "cfnet/numerics.hpp"

namespace cfnet {

/// Multivariate polynomial in x1..xn: exponent vector -> coefficient.
struct Polynomial {
  int n = 0;
  std::map<std::vector<int>, double> terms;

  int degree() const;
  /// Upper bound on sup |p(z)| over complex z with |z_j| <= radius.
  double max_modulus_bound(double radius) const;
};

/// Expands e into monomials. Returns nullopt when e contains a primitive.
std::optional<Polynomial> to_polynomial(const Expr& e, int n);

/// If every component of the field is homogeneous linear in x, returns the
/// matrix A with field(x) = A x.
std::optional<Matrix> linear_field_matrix(std::span<const Expr> field, int n);

}  // namespace cfnet
