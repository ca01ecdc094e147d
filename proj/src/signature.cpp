#include "cfnet/signature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfnet {

ControlPath::ControlPath(int m, std::vector<double> breakpoints, std::vector<std::vector<double>> values, double M)
    : m_(m), breakpoints_(std::move(breakpoints)), values_(std::move(values)), M_(M) {
  if (m_ < 1) throw std::invalid_argument("control: m must be >= 1");
  if (!(M_ >= 0.0) || !std::isfinite(M_)) throw std::invalid_argument("control: M must be finite and >= 0");
  if (breakpoints_.empty() || breakpoints_.front() != 0.0) {
    throw std::invalid_argument("control: breakpoints must start at 0");
  }
  for (std::size_t p = 1; p < breakpoints_.size(); ++p) {
    if (!(breakpoints_[p] > breakpoints_[p - 1]) || !std::isfinite(breakpoints_[p])) {
      throw std::invalid_argument("control: breakpoints must be strictly increasing (index " + std::to_string(p) + ")");
    }
  }
  if (values_.size() + 1 != breakpoints_.size()) {
    throw std::invalid_argument("control: need one value row per piece (" + std::to_string(breakpoints_.size() - 1) +
                                " pieces, " + std::to_string(values_.size()) + " rows)");
  }
  for (std::size_t p = 0; p < values_.size(); ++p) {
    if (values_[p].size() != static_cast<std::size_t>(m_)) {
      throw std::invalid_argument("control: row " + std::to_string(p) + " must have m entries");
    }
    for (double v : values_[p]) {
      if (!std::isfinite(v) || std::abs(v) > M_) {
        throw std::invalid_argument("control: value " + std::to_string(v) + " on piece " + std::to_string(p) +
                                    " exceeds bound M = " + std::to_string(M_));
      }
    }
  }
}

ControlPath ControlPath::constant(std::vector<double> value, double T, double M) {
  const int m = static_cast<int>(value.size());
  if (T == 0.0) return ControlPath(m, {0.0}, {}, M);
  return ControlPath(m, {0.0, T}, {std::move(value)}, M);
}

double ControlPath::at(double t, int i) const {
  if (values_.empty()) return 0.0;
  std::size_t p = 0;
  while (p + 1 < values_.size() && t >= breakpoints_[p + 1]) ++p;
  return value(p, i);
}

ControlPath ControlPath::negated() const {
  auto v = values_;
  for (auto& row : v) {
    for (auto& x : row) x = -x;
  }
  return ControlPath(m_, breakpoints_, std::move(v), M_);
}

double signature_norm_bound(double M, double T, int k) {
  if (k < 0) throw std::invalid_argument("signature_norm_bound: k must be >= 0");
  if (M < 0.0 || T < 0.0) throw std::invalid_argument("signature_norm_bound: M, T must be >= 0");
  const double z = M * T;
  if (k == 0) return 1.0;
  if (z == 0.0) return 0.0;
  if (k <= 100) {
    double t = 1.0;
    for (int j = 1; j <= k; ++j) t *= z / j;
    return t;
  }
  return std::exp(k * std::log(z) - std::lgamma(k + 1.0));
}

namespace {

// Per-piece local polynomial of F_j in s = t - t_{p-1}, degree <= j.
using PiecePolys = std::vector<std::vector<double>>;

double horner(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

// F_next(t) = int_0^t u_channel(s) F_prev(s) ds, piece by piece.
PiecePolys integrate_once(const ControlPath& u, const PiecePolys& prev, int channel, double& final_value) {
  PiecePolys next(prev.size());
  double start = 0.0;
  const auto& bp = u.breakpoints();
  for (std::size_t p = 0; p < prev.size(); ++p) {
    const double v = u.value(p, channel);
    const auto& b = prev[p];
    auto& a = next[p];
    a.assign(b.size() + 1, 0.0);
    a[0] = start;
    for (std::size_t l = 0; l < b.size(); ++l) a[l + 1] = v * b[l] / static_cast<double>(l + 1);
    start = horner(a, bp[p + 1] - bp[p]);
  }
  final_value = start;
  return next;
}

PiecePolys unit_polys(const ControlPath& u) { return PiecePolys(u.pieces(), std::vector<double>{1.0}); }

}  // namespace

double signature_entry(const ControlPath& u, const Word& w) {
  w.check_channels(u.channels());
  if (w.empty()) return 1.0;
  if (u.pieces() == 0) return 0.0;
  PiecePolys f = unit_polys(u);
  double value = 1.0;
  for (int c : w.letters()) f = integrate_once(u, f, c, value);
  return value;
}

bool within_signature_bound(double s, double bound) {
  return std::abs(s) <= bound * (1.0 + 1e-12) + std::numeric_limits<double>::denorm_min();
}

double SignatureTable::at(const Word& w) const {
  if (static_cast<int>(w.size()) > K_) throw std::out_of_range("signature table: word longer than order");
  w.check_channels(m_);
  return entries_[length_lex_index(w, m_)];
}

SignatureTable signature_up_to(const ControlPath& u, int K, std::size_t word_cap) {
  if (K < 0) throw std::invalid_argument("signature_up_to: K must be >= 0");
  const int m = u.channels();
  check_word_budget(words_up_to_count(m, K), word_cap, "signature up to order " + std::to_string(K));
  SignatureTable table;
  table.K_ = K;
  table.m_ = m;
  table.entries_.assign(words_up_to_count(m, K), 0.0);
  table.entries_[0] = 1.0;
  if (u.pieces() > 0 && K > 0) {
    // Depth-first over the prefix tree; each node's piece polynomials are
    // shared by all its extensions.
    struct Frame {
      Word word;
      PiecePolys polys;
    };
    std::vector<Frame> stack;
    stack.push_back({Word{}, unit_polys(u)});
    while (!stack.empty()) {
      Frame top = std::move(stack.back());
      stack.pop_back();
      if (static_cast<int>(top.word.size()) == K) continue;
      for (int c = m; c >= 1; --c) {
        Word w = top.word.append(c);
        double value = 0.0;
        PiecePolys next = integrate_once(u, top.polys, c, value);
        table.entries_[length_lex_index(w, m)] = value;
        stack.push_back({std::move(w), std::move(next)});
      }
    }
  }
  const double T = u.horizon();
  for (const auto& w : words_up_to(m, K)) {
    const double s = table.entries_[length_lex_index(w, m)];
    const double bound = signature_norm_bound(u.bound(), T, static_cast<int>(w.size()));
    if (!within_signature_bound(s, bound)) {
      throw std::logic_error("signature entry " + w.to_string() + " = " + std::to_string(s) +
                             " breaks the simplex bound " + std::to_string(bound));
    }
  }
  return table;
}

}  // namespace cfnet
