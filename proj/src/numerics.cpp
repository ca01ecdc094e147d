#include "cfnet/numerics.hpp"

#include <numbers>
#include <stdexcept>
#include <thread>

namespace cfnet {

double sum_descending(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end(), [](double a, double b) {
    const double fa = std::abs(a), fb = std::abs(b);
    if (fa != fb) return fa > fb;
    return a > b;
  });
  CompensatedSum acc;
  for (double t : terms) acc.add(t);
  return acc.value();
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  const std::size_t block = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(count, lo + block);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int RandomStream::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % span;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return lo + static_cast<int>(x % span);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double spectral_norm(const Matrix& a, std::uint64_t seed, double tol, int max_iter) {
  if (a.rows == 0 || a.cols == 0) return 0.0;
  RandomStream rng(seed, streams::kPowerIteration);
  std::vector<double> v(a.cols), av(a.rows), atav(a.cols);
  for (auto& x : v) x = rng.normal();
  double nv = norm2(v);
  for (auto& x : v) x /= nv;

  auto apply = [&] {
    for (std::size_t i = 0; i < a.rows; ++i) av[i] = dot(a.row(i), v);
    std::fill(atav.begin(), atav.end(), 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
      for (std::size_t j = 0; j < a.cols; ++j) atav[j] += a(i, j) * av[i];
    }
  };

  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    apply();
    const double next = norm2(av);
    const double n = norm2(atav);
    if (n == 0.0) return next;  // v landed in the null space of A
    for (std::size_t j = 0; j < a.cols; ++j) v[j] = atav[j] / n;
    if (it > 0 && std::abs(next - sigma) <= tol * std::max(next, 1e-300)) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  apply();
  return std::max(sigma, norm2(av));
}

}  // namespace cfnet
