#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cfnet/expr.hpp"
#include "cfnet/system.hpp"
#include "cfnet/word.hpp"

namespace cfnet {

/// L_g h = sum_j g_j * dh/dx_j, simplified.
Expr lie_derivative(const Expr& h, std::span<const Expr> g);

/// Memoized iterated Lie derivatives of c^T x over the word prefix tree.
///
/// Composition convention: entry(()) = c^T x and
/// entry(w.(i)) = L_{g_i} entry(w), so channels act in word order, i1 first.
/// For a bilinear system g_i(x) = A_i x this gives
/// entry(i1..ik) = c^T A_{i1} ... A_{ik} x.
///
/// The Chen-Fliess series pairs the signature entry S^w (earliest time with
/// i1) with entry(reverse(w)); see feature(). That pairing is what the
/// series-vs-RK4 oracle test pins down.
///
/// Building is single-writer. Once the needed words are present, const
/// access from several threads is safe.
class LieTable {
 public:
  explicit LieTable(SystemSpec sys);

  const SystemSpec& system() const { return sys_; }

  /// entry(w); builds missing prefixes.
  const Expr& get(const Word& w);
  /// The series feature Phi^w = entry(reverse(w)).
  const Expr& feature(const Word& w) { return get(w.reversed()); }
  /// Every word with |w| <= K, length-lex order. Checks the cap first.
  void build_up_to(int K, std::size_t word_cap = kDefaultWordCap);

  /// Lookup without building.
  const Expr* find(const Word& w) const;
  std::size_t size() const { return memo_.size(); }

 private:
  SystemSpec sys_;
  std::map<Word, Expr> memo_;
};

/// iterated_lie(table, w) == table.get(w).
inline const Expr& iterated_lie(LieTable& table, const Word& w) { return table.get(w); }

/// Sample plan for the sup over the input domain.
struct DomainGrid {
  enum class Shape { Ball, Box };
  Shape shape = Shape::Ball;
  /// Halton points accepted inside the domain (plus the fixed points below).
  std::size_t samples = 512;
  /// Box corners when shape == Box.
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  /// Extra user points appended verbatim.
  std::vector<std::vector<double>> extra_points;
};

/// Points for a grid: the origin, +-r e_j for each axis, +-r c/|c|, then
/// Halton points (prime bases) in the bounding cube, kept when inside the
/// ball. A box grid uses the face centres instead of the axis points.
std::vector<std::vector<double>> grid_points(const SystemSpec& sys, const DomainGrid& grid);

struct LambdaReport {
  int k = 0;
  /// max |entry(w)(x)| over words of length k and grid points. A LOWER
  /// estimate of the true supremum.
  double value = 0.0;
  Word argmax_word;
  std::vector<double> argmax_point;
  std::size_t words = 0;
  std::size_t points = 0;
};

LambdaReport lambda_k(LieTable& table, int k, const DomainGrid& grid,
                      std::size_t word_cap = kDefaultWordCap, unsigned threads = 1);

}  // namespace cfnet
