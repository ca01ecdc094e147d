#include "cfnet/builtins.hpp"

#include <cmath>
#include <stdexcept>

#include "cfnet/parser.hpp"
#include "cfnet/poly.hpp"
#include "cfnet/primitives.hpp"

namespace cfnet {

namespace {

std::vector<Expr> parse_field(const std::vector<std::string>& comps, int n) {
  std::vector<Expr> out;
  for (const auto& s : comps) out.push_back(parse_expr(s, n));
  return out;
}

// The primitive when e is exactly prim(x_j) with order 0, else null.
const PrimitiveSpec* plain_primitive_of(const Expr& e, int j) {
  if (e.kind() != NodeKind::Primitive || e.order() != 0) return nullptr;
  const auto& arg = e.children()[0];
  if (arg.kind() != NodeKind::Var || arg.index() != j) return nullptr;
  return &e.spec();
}

std::optional<GrowthConstants> hopfield_growth(const SystemSpec& sys) {
  const int n = sys.n;
  if (sys.m != n * n) return std::nullopt;
  std::optional<GrowthConstants> growth;
  std::string name;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const auto field = sys.field(1 + (i - 1) * n + (j - 1));
      for (int l = 1; l <= n; ++l) {
        const Expr& comp = field[static_cast<std::size_t>(l - 1)];
        if (l != i) {
          if (!comp.is_constant(0.0)) return std::nullopt;
          continue;
        }
        const PrimitiveSpec* p = plain_primitive_of(comp, j);
        if (!p) return std::nullopt;
        if (growth && p->name != name) return std::nullopt;
        name = p->name;
        growth = p->growth;
      }
    }
  }
  return growth;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"bilinear2d", "analytic1d", "hopfield2"}; }

SystemSpec builtin_system(const std::string& name) {
  SystemSpec s;
  if (name == "bilinear2d") {
    s.n = 2;
    s.m = 2;
    s.g = {parse_field({"x2", "-x1"}, 2), parse_field({"x1", "-x2"}, 2)};
    s.c = {1.0, 0.0};
    s.r = 1.0;
    s.M = 1.0;
    s.T = 0.5;
  } else if (name == "analytic1d") {
    s.n = 1;
    s.m = 2;
    s.g = {parse_field({"x1^2"}, 1), parse_field({"1 + x1"}, 1)};
    s.c = {1.0};
    s.r = 1.0;
    s.M = 1.0;
    s.T = 0.0125;
  } else if (name == "hopfield2") {
    s.n = 2;
    s.m = 4;
    for (int i = 1; i <= 2; ++i) {
      for (int j = 1; j <= 2; ++j) {
        std::vector<std::string> comps(2, "0");
        comps[static_cast<std::size_t>(i - 1)] = "sigma(x" + std::to_string(j) + ")";
        s.g.push_back(parse_field(comps, 2));
      }
    }
    s.c = {1.0, 0.0};
    s.r = 1.0;
    s.M = 1.0;
    s.T = 0.03;
  } else {
    throw std::invalid_argument("unknown builtin system '" + name + "' (expected bilinear2d, analytic1d or hopfield2)");
  }
  s.validate();
  return s;
}

std::optional<CertifiedFamily> auto_family(const SystemSpec& sys, std::string* why) {
  sys.validate();
  auto fail = [&](const std::string& msg) -> std::optional<CertifiedFamily> {
    if (why) *why = msg;
    return std::nullopt;
  };
  if (norm2(sys.c) > 1.0 + 1e-12) return fail("closed-form bounds need |c| <= 1");

  bool linear = true, polynomial = true;
  for (int i = 1; i <= sys.m; ++i) {
    if (!linear_field_matrix(sys.field(i), sys.n)) linear = false;
    for (const auto& comp : sys.field(i)) {
      if (comp.has_primitive()) polynomial = false;
    }
  }
  if (linear) {
    const double a = bilinear_norm(sys);
    return CertifiedFamily{BilinearFamily{sys.r, a}, BoundKind::Bilinear,
                           "linear fields; a = max spectral norm = " + std::to_string(a)};
  }
  if (polynomial) {
    const double a_r = polydisc_modulus(sys);
    return CertifiedFamily{AnalyticFamily{sys.r, sys.n, a_r}, BoundKind::Analytic,
                           "polynomial fields; a(r) from coefficients at radius 3r = " + std::to_string(a_r)};
  }
  if (auto g = hopfield_growth(sys)) {
    return CertifiedFamily{HopfieldFamily{sys.r, g->a, g->b}, BoundKind::Hopfield,
                           "Hopfield fields sigma(x_j) e_i; growth a = " + std::to_string(g->a) +
                               ", b = " + std::to_string(g->b)};
  }
  return fail("no closed-form family matches these fields; supply a geometric family");
}

BoundReport certified_bound(const CertifiedFamily& cf, const SystemSpec& sys, double N) {
  return std::visit(
      [&](const auto& f) -> BoundReport {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, BilinearFamily>) {
          return bilinear_bound(f.r, sys.m, sys.M, sys.T, f.a, N);
        } else if constexpr (std::is_same_v<F, AnalyticFamily>) {
          return analytic_bound(f.r, f.n, sys.m, sys.M, sys.T, f.a_r, N);
        } else if constexpr (std::is_same_v<F, HopfieldFamily>) {
          if (sys.m != sys.n * sys.n) throw std::invalid_argument("hopfield bound needs m = n^2");
          return hopfield_bound(f.r, sys.n, sys.M, sys.T, f.a, f.b, N);
        } else {
          LambdaInput in;
          in.family = cf.family;
          auto rep = theorem1_bound(in, sys.m, sys.M, sys.T, N, 0);
          if (!rep.precondition_ok) {
            throw NotCertifiedError("geometric family series diverges at m M T = " +
                                        std::to_string(sys.m * sys.M * sys.T),
                                    0.0);
          }
          return rep;
        }
      },
      cf.family);
}

}  // namespace cfnet
