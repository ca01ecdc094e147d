#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfnet/numerics.hpp"
#include "cfnet/series.hpp"
#include "cfnet/signature.hpp"

namespace cfnet {

/// Samples (X_i, Y_i) with a declared domain radius r and label bound M1.
struct Dataset {
  int n = 1;
  std::vector<std::vector<double>> X;
  std::vector<double> Y;
  double r = 1.0;
  double M1 = 1.0;

  std::size_t size() const { return Y.size(); }
  /// Throws std::invalid_argument naming the first sample (1-based) with
  /// |X_i| > r or |Y_i| > M1, or with the wrong width.
  void validate() const;
};

/// Reads a CSV with header x1,...,xn,y. Rows violating the declared bounds
/// are rejected with their line number.
Dataset read_csv(std::istream& in, double r, double M1);
Dataset read_csv_file(const std::string& path, double r, double M1);
void write_csv(std::ostream& out, const Dataset& data);

/// A point uniform on the Euclidean ball of radius r.
std::vector<double> sample_ball(int n, double r, RandomStream& rng);

/// Random piecewise-constant control on [0, T] with 1..max_pieces pieces and
/// uniformly drawn interior breakpoints. Each piece is bang-bang (+-M per
/// channel) with probability 1/2, else uniform in [-M, M]. T = 0 gives the
/// empty path.
ControlPath random_control(int m, double M, double T, int max_pieces, RandomStream& rng);

/// N points uniform on the r-ball labelled by the series of `planted` at the
/// evaluator's order, plus noise uniform in [-noise, noise]. Point i draws
/// from streams::sub(stream, i), its noise from streams::sub(kNoise + stream, i).
/// M1 is set to the given label bound; labels beyond it are an error.
Dataset generate_planted(const SeriesEvaluator& ev, const ControlPath& planted, std::size_t N, double noise,
                         double M1, std::uint64_t seed, std::uint64_t stream, unsigned threads = 1);

}  // namespace cfnet
