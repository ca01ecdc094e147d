#include "cfnet/lie.hpp"

#include <cmath>
#include <stdexcept>

#include "cfnet/numerics.hpp"

namespace cfnet {

Expr lie_derivative(const Expr& h, std::span<const Expr> g) {
  std::vector<Expr> terms;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g[j].is_constant(0.0)) continue;
    Expr dh = differentiate(h, static_cast<int>(j + 1));
    if (dh.is_constant(0.0)) continue;
    terms.push_back(Expr::product({g[j], std::move(dh)}));
  }
  return simplify(Expr::sum(std::move(terms)));
}

LieTable::LieTable(SystemSpec sys) : sys_(std::move(sys)) {
  sys_.validate();
  memo_.emplace(Word{}, output_expr(sys_));
}

const Expr& LieTable::get(const Word& w) {
  if (auto it = memo_.find(w); it != memo_.end()) return it->second;
  w.check_channels(sys_.m);
  const Expr& parent = get(w.prefix());
  Expr next = lie_derivative(parent, sys_.field(w.back()));
  return memo_.emplace(w, std::move(next)).first->second;
}

void LieTable::build_up_to(int K, std::size_t word_cap) {
  if (K < 0) throw std::invalid_argument("build_up_to: K must be >= 0");
  check_word_budget(words_up_to_count(sys_.m, K), word_cap, "Lie table up to order " + std::to_string(K));
  for (const auto& w : words_up_to(sys_.m, K)) get(w);
}

const Expr* LieTable::find(const Word& w) const {
  auto it = memo_.find(w);
  return it == memo_.end() ? nullptr : &it->second;
}

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                           59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
  }
  return r;
}

}  // namespace

std::vector<std::vector<double>> grid_points(const SystemSpec& sys, const DomainGrid& grid) {
  const int n = sys.n;
  if (n > static_cast<int>(std::size(kPrimes))) {
    throw std::invalid_argument("grid_points: dimension above " + std::to_string(std::size(kPrimes)));
  }
  std::vector<std::vector<double>> pts;
  std::vector<double> lo(n), hi(n);
  if (grid.shape == DomainGrid::Shape::Box) {
    if (grid.box_lo.size() != static_cast<std::size_t>(n) || grid.box_hi.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("grid_points: box corners must have n entries");
    }
    lo = grid.box_lo;
    hi = grid.box_hi;
    std::vector<double> centre(n);
    for (int j = 0; j < n; ++j) centre[j] = 0.5 * (lo[j] + hi[j]);
    pts.push_back(centre);
    for (int j = 0; j < n; ++j) {
      auto a = centre, b = centre;
      a[j] = lo[j];
      b[j] = hi[j];
      pts.push_back(a);
      pts.push_back(b);
    }
  } else {
    std::fill(lo.begin(), lo.end(), -sys.r);
    std::fill(hi.begin(), hi.end(), sys.r);
    pts.emplace_back(n, 0.0);
    for (int j = 0; j < n; ++j) {
      std::vector<double> p(n, 0.0);
      p[j] = sys.r;
      pts.push_back(p);
      p[j] = -sys.r;
      pts.push_back(p);
    }
    const double cn = norm2(sys.c);
    if (cn > 0.0) {
      std::vector<double> p(n), q(n);
      for (int j = 0; j < n; ++j) {
        p[j] = sys.r * sys.c[j] / cn;
        q[j] = -p[j];
      }
      if (norm2(p) > sys.r) {
        const double s = sys.r / norm2(p);
        for (int j = 0; j < n; ++j) {
          p[j] *= s;
          q[j] *= s;
        }
      }
      pts.push_back(p);
      pts.push_back(q);
    }
  }

  const std::uint64_t max_attempts = 10'000'000;
  std::size_t accepted = 0;
  for (std::uint64_t i = 1; accepted < grid.samples && i <= max_attempts; ++i) {
    std::vector<double> p(n);
    for (int j = 0; j < n; ++j) p[j] = lo[j] + (hi[j] - lo[j]) * radical_inverse(i, kPrimes[j]);
    if (grid.shape == DomainGrid::Shape::Ball && norm2(p) > sys.r) continue;
    pts.push_back(std::move(p));
    ++accepted;
  }
  for (const auto& p : grid.extra_points) {
    if (p.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("grid_points: extra point has wrong size");
    pts.push_back(p);
  }
  return pts;
}

LambdaReport lambda_k(LieTable& table, int k, const DomainGrid& grid, std::size_t word_cap, unsigned threads) {
  if (k < 0) throw std::invalid_argument("lambda_k: k must be >= 0");
  const auto& sys = table.system();
  check_word_budget(word_count(sys.m, k), word_cap, "lambda_k at k = " + std::to_string(k));
  const auto words = words_of_length(sys.m, k);
  for (const auto& w : words) table.get(w);
  const auto pts = grid_points(sys, grid);

  struct Best {
    double value = -1.0;
    std::size_t point = 0;
  };
  std::vector<Best> best(words.size());
  const LieTable& ro = table;
  parallel_for(words.size(), threads, [&](std::size_t wi) {
    const Expr& e = *ro.find(words[wi]);
    Best b;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const double v = std::abs(eval(e, pts[p]));
      if (!std::isfinite(v)) throw std::runtime_error("lambda_k: non-finite Lie derivative value");
      if (v > b.value) b = {v, p};
    }
    best[wi] = b;
  });

  LambdaReport rep;
  rep.k = k;
  rep.words = words.size();
  rep.points = pts.size();
  std::size_t arg = 0;
  for (std::size_t wi = 0; wi < best.size(); ++wi) {
    if (best[wi].value > best[arg].value) arg = wi;
  }
  rep.value = std::max(0.0, best[arg].value);
  rep.argmax_word = words[arg];
  rep.argmax_point = pts[best[arg].point];
  return rep;
}

}  // namespace cfnet
