#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace cfnet {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sums terms in descending magnitude with compensation. Result does not
/// depend on the input order.
double sum_descending(std::vector<double> terms);

/// Runs fn(i) for i in [0, count) over `threads` workers. Work is split into
/// contiguous blocks; callers write results into per-index slots so any
/// reduction stays schedule-independent.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

/// Deterministic RNG stream for (seed, stream index). Uses only the
/// standardized mt19937_64 engine plus hand-rolled variate mappings, so
/// outputs are identical across standard library implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (no cached second variate).
  double normal();
  /// +1 or -1 with equal probability.
  int sign() { return (engine_() >> 63) ? 1 : -1; }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stream ids reserved by the library so independent consumers of the same
/// user seed never share a stream.
namespace streams {
inline constexpr std::uint64_t kControls = 0x1000;
inline constexpr std::uint64_t kSigns = 0x2000'0000;
inline constexpr std::uint64_t kData = 0x3000;
inline constexpr std::uint64_t kPlanted = 0x4000;
inline constexpr std::uint64_t kPowerIteration = 0x5000;
inline constexpr std::uint64_t kNoise = 0x6000;
inline constexpr std::uint64_t kTestData = 0x7000;
/// Stream id for replicate i under one of the bases above.
inline constexpr std::uint64_t sub(std::uint64_t base, std::uint64_t i) { return (base << 32) | (i & 0xffff'ffffULL); }
}  // namespace streams

/// Dense row-major matrix, just enough for small linear algebra.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Largest singular value by power iteration on A^T A. The start vector comes
/// from RandomStream(seed, streams::kPowerIteration).
double spectral_norm(const Matrix& a, std::uint64_t seed = 0, double tol = 1e-10,
                     int max_iter = 100000);

}  // namespace cfnet
