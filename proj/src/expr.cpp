#include "cfnet/expr.hpp"

#include <charconv>
#include <stdexcept>

#include "cfnet/primitives.hpp"

namespace cfnet {

struct Expr::Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;
  int ival = 0;  // var index, exponent, or derivative order
  std::vector<Expr> children;
  std::shared_ptr<const PrimitiveSpec> spec;
  std::size_t count = 1;
  int max_var = 0;
  bool has_prim = false;
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::var(int index) {
  if (index < 1) throw std::invalid_argument("Expr::var: index must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Var;
  n->ival = index;
  n->max_var = index;
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Sum;
  for (const auto& t : terms) {
    n->count += t.node_count();
    n->max_var = std::max(n->max_var, t.max_var_index());
    n->has_prim = n->has_prim || t.has_primitive();
  }
  n->children = std::move(terms);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Product;
  for (const auto& t : factors) {
    n->count += t.node_count();
    n->max_var = std::max(n->max_var, t.max_var_index());
    n->has_prim = n->has_prim || t.has_primitive();
  }
  n->children = std::move(factors);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("Expr::power: exponent must be >= 0");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Power;
  n->ival = exponent;
  n->count += base.node_count();
  n->max_var = base.max_var_index();
  n->has_prim = base.has_primitive();
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

Expr Expr::primitive(std::shared_ptr<const PrimitiveSpec> spec, int order, Expr arg) {
  if (!spec) throw std::invalid_argument("Expr::primitive: null spec");
  if (order < 0) throw std::invalid_argument("Expr::primitive: order must be >= 0");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Primitive;
  n->ival = order;
  n->spec = std::move(spec);
  n->count += arg.node_count();
  n->max_var = arg.max_var_index();
  n->has_prim = true;
  n->children.push_back(std::move(arg));
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::index() const { return node_->ival; }
int Expr::exponent() const { return node_->ival; }
int Expr::order() const { return node_->ival; }
const PrimitiveSpec& Expr::spec() const { return *node_->spec; }
const std::shared_ptr<const PrimitiveSpec>& Expr::spec_ptr() const { return node_->spec; }
std::span<const Expr> Expr::children() const { return node_->children; }
std::size_t Expr::node_count() const { return node_->count; }
int Expr::max_var_index() const { return node_->max_var; }
bool Expr::has_primitive() const { return node_->has_prim; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind || x.count != y.count) return false;
  switch (x.kind) {
    case NodeKind::Constant:
      return x.value == y.value;
    case NodeKind::Var:
      return x.ival == y.ival;
    case NodeKind::Primitive:
      if (x.spec->name != y.spec->name) return false;
      [[fallthrough]];
    case NodeKind::Power:
      if (x.ival != y.ival) return false;
      [[fallthrough]];
    case NodeKind::Sum:
    case NodeKind::Product:
      if (x.children.size() != y.children.size()) return false;
      for (std::size_t i = 0; i < x.children.size(); ++i) {
        if (!(x.children[i] == y.children[i])) return false;
      }
      return true;
  }
  return false;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator-(const Expr& a) { return Expr::product({Expr::constant(-1.0), a}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }

namespace {

double ipow(double base, int e) {
  double result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

Expr simplify_sum(std::span<const Expr> raw) {
  std::vector<Expr> terms;
  double constant = 0.0;
  bool saw_constant = false;
  auto take = [&](const Expr& t) {
    if (t.is_constant()) {
      constant += t.value();
      saw_constant = true;
    } else {
      terms.push_back(t);
    }
  };
  for (const auto& c : raw) {
    Expr s = simplify(c);
    if (s.kind() == NodeKind::Sum) {
      for (const auto& inner : s.children()) take(inner);
    } else {
      take(s);
    }
  }
  if (saw_constant && constant != 0.0) terms.insert(terms.begin(), Expr::constant(constant));
  if (terms.empty()) return Expr::constant(0.0);
  if (terms.size() == 1) return terms.front();
  return Expr::sum(std::move(terms));
}

Expr simplify_product(std::span<const Expr> raw) {
  std::vector<Expr> factors;
  double constant = 1.0;
  auto take = [&](const Expr& f) {
    if (f.is_constant()) {
      constant *= f.value();
    } else {
      factors.push_back(f);
    }
  };
  for (const auto& c : raw) {
    Expr s = simplify(c);
    if (s.kind() == NodeKind::Product) {
      for (const auto& inner : s.children()) take(inner);
    } else {
      take(s);
    }
  }
  if (constant == 0.0) return Expr::constant(0.0);
  if (constant != 1.0) factors.insert(factors.begin(), Expr::constant(constant));
  if (factors.empty()) return Expr::constant(1.0);
  if (factors.size() == 1) return factors.front();
  return Expr::product(std::move(factors));
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Var:
      return e;
    case NodeKind::Sum:
      return simplify_sum(e.children());
    case NodeKind::Product:
      return simplify_product(e.children());
    case NodeKind::Power: {
      const int p = e.exponent();
      if (p == 0) return Expr::constant(1.0);
      Expr base = simplify(e.children()[0]);
      if (p == 1) return base;
      if (base.is_constant()) return Expr::constant(ipow(base.value(), p));
      if (base.kind() == NodeKind::Power) {
        return Expr::power(base.children()[0], base.exponent() * p);
      }
      return Expr::power(std::move(base), p);
    }
    case NodeKind::Primitive: {
      Expr arg = simplify(e.children()[0]);
      if (arg.is_constant()) return Expr::constant(e.spec().eval(e.order(), arg.value()));
      return Expr::primitive(e.spec_ptr(), e.order(), std::move(arg));
    }
  }
  return e;
}

namespace {

// Derivative without the final simplification pass. Zero pieces are pruned
// eagerly so product-rule expansions stay small.
Expr derive(const Expr& e, int j) {
  if (e.max_var_index() < j) return Expr::constant(0.0);
  switch (e.kind()) {
    case NodeKind::Constant:
      return Expr::constant(0.0);
    case NodeKind::Var:
      return Expr::constant(e.index() == j ? 1.0 : 0.0);
    case NodeKind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.children()) {
        Expr d = derive(t, j);
        if (!d.is_constant(0.0)) terms.push_back(std::move(d));
      }
      return Expr::sum(std::move(terms));
    }
    case NodeKind::Product: {
      const auto factors = e.children();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        Expr d = derive(factors[i], j);
        if (d.is_constant(0.0)) continue;
        std::vector<Expr> f(factors.begin(), factors.end());
        f[i] = std::move(d);
        terms.push_back(Expr::product(std::move(f)));
      }
      return Expr::sum(std::move(terms));
    }
    case NodeKind::Power: {
      const Expr& base = e.children()[0];
      Expr d = derive(base, j);
      if (d.is_constant(0.0) || e.exponent() == 0) return Expr::constant(0.0);
      return Expr::product({Expr::constant(static_cast<double>(e.exponent())),
                            Expr::power(base, e.exponent() - 1), std::move(d)});
    }
    case NodeKind::Primitive: {
      const Expr& arg = e.children()[0];
      Expr d = derive(arg, j);
      if (d.is_constant(0.0)) return Expr::constant(0.0);
      return Expr::product({Expr::primitive(e.spec_ptr(), e.order() + 1, arg), std::move(d)});
    }
  }
  return Expr::constant(0.0);
}

}  // namespace

Expr differentiate(const Expr& e, int j) {
  if (j < 1) throw std::invalid_argument("differentiate: variable index must be >= 1");
  return simplify(derive(e, j));
}

double eval(const Expr& e, std::span<const double> x) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e.value();
    case NodeKind::Var:
      if (static_cast<std::size_t>(e.index()) > x.size()) {
        throw std::out_of_range("eval: x" + std::to_string(e.index()) + " not in point of dimension " +
                                std::to_string(x.size()));
      }
      return x[e.index() - 1];
    case NodeKind::Sum: {
      double s = 0.0;
      for (const auto& t : e.children()) s += eval(t, x);
      return s;
    }
    case NodeKind::Product: {
      double p = 1.0;
      for (const auto& f : e.children()) p *= eval(f, x);
      return p;
    }
    case NodeKind::Power:
      return ipow(eval(e.children()[0], x), e.exponent());
    case NodeKind::Primitive:
      return e.spec().eval(e.order(), eval(e.children()[0], x));
  }
  return 0.0;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Context levels: 0 = term of a sum, 1 = factor of a product, 2 = base of a
// power. Anything binding looser than its context is parenthesized.
void print(const Expr& e, int ctx, std::string& out);

bool leading_negative(const Expr& t) {
  if (t.is_constant()) return t.value() < 0.0;
  return t.kind() == NodeKind::Product && !t.children().empty() && t.children()[0].is_constant() &&
         t.children()[0].value() < 0.0;
}

void print_negated(const Expr& t, std::string& out) {
  if (t.is_constant()) {
    out += format_number(-t.value());
    return;
  }
  const auto f = t.children();
  const double c = -f[0].value();
  bool first = true;
  if (c != 1.0 || f.size() == 1) {
    out += format_number(c);
    first = false;
  }
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (!first) out += '*';
    print(f[i], 1, out);
    first = false;
  }
}

void print(const Expr& e, int ctx, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Constant: {
      const bool wrap = e.value() < 0.0 && ctx >= 1;
      if (wrap) out += '(';
      out += format_number(e.value());
      if (wrap) out += ')';
      return;
    }
    case NodeKind::Var:
      out += 'x';
      out += std::to_string(e.index());
      return;
    case NodeKind::Sum: {
      const auto terms = e.children();
      if (terms.empty()) {
        out += '0';
        return;
      }
      const bool wrap = ctx >= 1;
      if (wrap) out += '(';
      for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i == 0) {
          print(terms[i], 0, out);
        } else if (leading_negative(terms[i])) {
          out += " - ";
          print_negated(terms[i], out);
        } else {
          out += " + ";
          print(terms[i], 0, out);
        }
      }
      if (wrap) out += ')';
      return;
    }
    case NodeKind::Product: {
      const auto factors = e.children();
      if (factors.empty()) {
        out += '1';
        return;
      }
      const bool wrap = ctx >= 2;
      if (wrap) out += '(';
      std::size_t start = 0;
      if (factors.size() >= 2 && factors[0].is_constant(-1.0)) {
        out += '-';
        start = 1;
      }
      for (std::size_t i = start; i < factors.size(); ++i) {
        if (i > start) out += '*';
        print(factors[i], 1, out);
      }
      if (wrap) out += ')';
      return;
    }
    case NodeKind::Power: {
      const Expr& base = e.children()[0];
      print(base, 2, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    }
    case NodeKind::Primitive:
      out += e.spec().name;
      if (e.order() > 0) {
        out += '[';
        out += std::to_string(e.order());
        out += ']';
      }
      out += '(';
      print(e.children()[0], 0, out);
      out += ')';
      return;
  }
}

void print_tree(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Constant:
      out += format_number(e.value());
      return;
    case NodeKind::Var:
      out += 'x' + std::to_string(e.index());
      return;
    case NodeKind::Sum:
    case NodeKind::Product: {
      out += e.kind() == NodeKind::Sum ? "Sum(" : "Product(";
      bool first = true;
      for (const auto& c : e.children()) {
        if (!first) out += ", ";
        print_tree(c, out);
        first = false;
      }
      out += ')';
      return;
    }
    case NodeKind::Power:
      out += "Power(";
      print_tree(e.children()[0], out);
      out += ", " + std::to_string(e.exponent()) + ')';
      return;
    case NodeKind::Primitive:
      out += e.spec().name + '[' + std::to_string(e.order()) + "](";
      print_tree(e.children()[0], out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

std::string to_tree_string(const Expr& e) {
  std::string out;
  print_tree(e, out);
  return out;
}

}  // namespace cfnet
