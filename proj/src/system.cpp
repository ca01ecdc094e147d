#include "cfnet/system.hpp"

#include <cmath>
#include <stdexcept>

namespace cfnet {

void SystemSpec::validate() const {
  if (n < 1) throw std::invalid_argument("system: n must be >= 1");
  if (m < 1) throw std::invalid_argument("system: m must be >= 1");
  if (g.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("system: expected " + std::to_string(m) + " vector fields, got " +
                                std::to_string(g.size()));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("system: field g" + std::to_string(i + 1) + " has " +
                                  std::to_string(g[i].size()) + " components, expected " + std::to_string(n));
    }
    for (const auto& e : g[i]) {
      if (e.max_var_index() > n) {
        throw std::invalid_argument("system: field g" + std::to_string(i + 1) + " references x" +
                                    std::to_string(e.max_var_index()) + " beyond n = " + std::to_string(n));
      }
    }
  }
  if (c.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("system: c must have n entries");
  for (double v : c) {
    if (!std::isfinite(v)) throw std::invalid_argument("system: c must be finite");
  }
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("system: r must be > 0");
  if (!(M >= 0.0) || !std::isfinite(M)) throw std::invalid_argument("system: M must be >= 0");
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("system: T must be >= 0");
}

std::vector<std::string> SystemSpec::warnings() const {
  std::vector<std::string> out;
  double norm = 0.0;
  for (double v : c) norm += v * v;
  norm = std::sqrt(norm);
  if (std::abs(norm - 1.0) > 1e-12) {
    out.push_back("|c| = " + std::to_string(norm) + "; closed-form bounds assume |c| = 1");
  }
  return out;
}

Expr output_expr(const SystemSpec& sys) {
  std::vector<Expr> terms;
  for (int j = 0; j < sys.n; ++j) {
    terms.push_back(Expr::product({Expr::constant(sys.c[j]), Expr::var(j + 1)}));
  }
  return simplify(Expr::sum(std::move(terms)));
}

void eval_field(const SystemSpec& sys, std::span<const double> u, std::span<const double> x,
                std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < sys.m; ++i) {
    if (u[i] == 0.0) continue;
    const auto& gi = sys.g[i];
    for (int j = 0; j < sys.n; ++j) {
      if (gi[j].is_constant(0.0)) continue;
      out[j] += u[i] * eval(gi[j], x);
    }
  }
}

}  // namespace cfnet
