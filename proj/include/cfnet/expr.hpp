#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cfnet {

struct PrimitiveSpec;

enum class NodeKind { Constant, Var, Sum, Product, Power, Primitive };

/// Immutable symbolic scalar expression over state variables x1..xn.
///
/// Nodes are shared; copying an Expr is a pointer copy. Differentiation and
/// simplification always return new trees, so Exprs can be read from many
/// threads at once.
class Expr {
 public:
  /// Defaults to Constant(0).
  Expr();

  static Expr constant(double value);
  /// 1-based variable index.
  static Expr var(int index);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, int exponent);
  static Expr primitive(std::shared_ptr<const PrimitiveSpec> spec, int order, Expr arg);

  NodeKind kind() const;
  double value() const;       // Constant
  int index() const;          // Var
  int exponent() const;       // Power
  int order() const;          // Primitive derivative order
  const PrimitiveSpec& spec() const;
  const std::shared_ptr<const PrimitiveSpec>& spec_ptr() const;
  /// Sum terms, Product factors, or the single base/argument of Power and
  /// Primitive.
  std::span<const Expr> children() const;

  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  std::size_t node_count() const;
  /// Largest Var index referenced, 0 if none.
  int max_var_index() const;
  bool has_primitive() const;

  /// Structural identity (same tree shape, same constants bitwise-equal
  /// up to signed zero, same primitive by name).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator-(const Expr& a, const Expr& b);

/// Constant folding, zero/one elimination and flattening of nested sums and
/// products. Purely syntactic: no expansion, factoring or like-term merging.
/// Idempotent.
Expr simplify(const Expr& e);

/// Exact partial derivative d e / d x_j (j 1-based), simplified.
Expr differentiate(const Expr& e, int j);

/// Evaluates at x, where x[0] is x1. Throws std::out_of_range if e
/// references a variable beyond x.size().
double eval(const Expr& e, std::span<const double> x);

/// Renders in the vector-field DSL; parse_expr(to_string(e)) evaluates the
/// same as e.
std::string to_string(const Expr& e);

/// Debug form that shows the node structure, e.g. Sum(Product(2, x1), x2^2).
std::string to_tree_string(const Expr& e);

}  // namespace cfnet
