#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfnet/bounds.hpp"
#include "cfnet/system.hpp"
#include "cfnet/tail.hpp"

namespace cfnet {

/// bilinear2d: g_i = A_i x with A1 = [[0,1],[-1,0]], A2 = [[1,0],[0,-1]],
///   c = (1,0), r = 1, M = 1, T = 0.5.
/// analytic1d: g1 = x1^2, g2 = 1 + x1, c = 1, r = 1, M = 1, T = 0.0125.
/// hopfield2: n = 2, channel 1+(i-1)n+(j-1) carries sigma(x_j) e_i,
///   c = (1,0), r = 1, M = 1, T = 0.03.
SystemSpec builtin_system(const std::string& name);
std::vector<std::string> builtin_names();

/// A Lambda_k family that provably bounds the system's features, with the
/// closed form it feeds.
struct CertifiedFamily {
  LambdaFamily family;
  BoundKind closed_form = BoundKind::Theorem1;
  /// Extra facts behind the choice (detected structure, constants used).
  std::string basis;
};

/// Detects bilinear, polynomial and Hopfield structure in that order.
/// Returns nullopt with `why` filled when none applies or |c| > 1.
std::optional<CertifiedFamily> auto_family(const SystemSpec& sys, std::string* why = nullptr);

/// Evaluates the closed form matching the family at the system's m, M, T.
/// Geometric families go through theorem1_bound with the tail at K = 0.
/// Throws NotCertifiedError outside the convergence condition.
BoundReport certified_bound(const CertifiedFamily& cf, const SystemSpec& sys, double N);

}  // namespace cfnet
