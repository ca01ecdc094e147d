#pragma once

#include <span>
#include <string>
#include <vector>

#include "cfnet/expr.hpp"

namespace cfnet {

/// Driftless control-affine system  x' = sum_i u_i(t) g_i(x),  y = c^T x.
struct SystemSpec {
  int n = 1;
  int m = 1;
  /// g[i][j] is component j of channel i (both 0-based here; the DSL and
  /// words use 1-based channels).
  std::vector<std::vector<Expr>> g;
  std::vector<double> c;
  double r = 1.0;  ///< sup of |x| over the input domain (Euclidean)
  double M = 1.0;  ///< control magnitude bound
  double T = 1.0;  ///< horizon

  /// Throws std::invalid_argument on any shape or range violation.
  void validate() const;
  /// Non-fatal remarks, e.g. |c| != 1, which the closed-form calculators assume.
  std::vector<std::string> warnings() const;

  std::span<const Expr> field(int channel) const { return g.at(static_cast<std::size_t>(channel - 1)); }
};

/// c^T x as a simplified Expr.
Expr output_expr(const SystemSpec& sys);

/// Sum_i u_i g_i(x), written into out (size n).
void eval_field(const SystemSpec& sys, std::span<const double> u, std::span<const double> x,
                std::span<double> out);

}  // namespace cfnet
