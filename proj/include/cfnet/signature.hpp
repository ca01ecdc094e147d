#pragma once

#include <cstddef>
#include <vector>

#include "cfnet/word.hpp"

namespace cfnet {

/// Piecewise-constant control on [0, T]: value row p holds on
/// [breakpoints[p], breakpoints[p+1]). A path with no pieces has T = 0.
class ControlPath {
 public:
  /// Validates: breakpoints start at 0 and strictly increase, one value row
  /// of width m per piece, every |value| <= M.
  ControlPath(int m, std::vector<double> breakpoints, std::vector<std::vector<double>> values, double M);

  /// Single piece u(t) = value on [0, T].
  static ControlPath constant(std::vector<double> value, double T, double M);

  int channels() const { return m_; }
  std::size_t pieces() const { return values_.size(); }
  double horizon() const { return breakpoints_.back(); }
  double bound() const { return M_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<double>>& values() const { return values_; }
  /// Value of channel i (1-based) on piece p.
  double value(std::size_t p, int i) const { return values_[p][static_cast<std::size_t>(i - 1)]; }
  /// u(t) for channel i (1-based); right-continuous, last piece at t = T.
  double at(double t, int i) const;

  /// u -> -u, same breakpoints.
  ControlPath negated() const;

 private:
  int m_;
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> values_;
  double M_;
};

/// (M T)^k / k!, the volume bound on |S^w| for |w| = k.
double signature_norm_bound(double M, double T, int k);

/// S^w(u): integral over 0 <= t1 <= ... <= tk <= T of u_{i1}(t1)...u_{ik}(tk),
/// propagated exactly as piecewise polynomials.
double signature_entry(const ControlPath& u, const Word& w);

/// Signature entries for all |w| <= K, stored in length-lex order.
class SignatureTable {
 public:
  int order() const { return K_; }
  int channels() const { return m_; }
  const std::vector<double>& entries() const { return entries_; }
  double at(const Word& w) const;
  double operator[](std::size_t length_lex_index) const { return entries_[length_lex_index]; }

 private:
  friend SignatureTable signature_up_to(const ControlPath&, int, std::size_t);
  int K_ = 0;
  int m_ = 1;
  std::vector<double> entries_;
};

/// Throws std::logic_error if an entry breaks |S^w| <= (MT)^|w|/|w|! beyond
/// a rounding allowance of 1e-12 relative.
SignatureTable signature_up_to(const ControlPath& u, int K, std::size_t word_cap = kDefaultWordCap);

/// True when |s| <= bound up to the rounding allowance used by the table.
bool within_signature_bound(double s, double bound);

}  // namespace cfnet
