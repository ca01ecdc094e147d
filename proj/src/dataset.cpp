#include "cfnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cfnet {

namespace {

constexpr double kSlack = 1e-12;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw std::invalid_argument("csv line " + std::to_string(line) + ": '" + s + "' is not a finite number");
  }
  return v;
}

std::string check_sample(std::span<const double> x, double y, double r, double M1) {
  const double nx = norm2(x);
  if (nx > r * (1.0 + kSlack)) {
    return "|X| = " + std::to_string(nx) + " exceeds r = " + std::to_string(r);
  }
  if (std::abs(y) > M1 * (1.0 + kSlack)) {
    return "|Y| = " + std::to_string(std::abs(y)) + " exceeds M1 = " + std::to_string(M1);
  }
  return {};
}

}  // namespace

void Dataset::validate() const {
  if (n < 1) throw std::invalid_argument("dataset: n must be >= 1");
  if (X.size() != Y.size()) throw std::invalid_argument("dataset: X and Y differ in length");
  if (!(r > 0.0) || !(M1 >= 0.0)) throw std::invalid_argument("dataset: need r > 0 and M1 >= 0");
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("dataset: sample " + std::to_string(i + 1) + " has the wrong width");
    }
    if (auto msg = check_sample(X[i], Y[i], r, M1); !msg.empty()) {
      throw std::invalid_argument("dataset: sample " + std::to_string(i + 1) + ": " + msg);
    }
  }
}

Dataset read_csv(std::istream& in, double r, double M1) {
  std::string line;
  std::size_t lineno = 0;
  Dataset d;
  d.r = r;
  d.M1 = M1;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  ++lineno;
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  auto header = split_csv(line);
  if (header.size() < 2 || header.back() != "y") {
    throw std::invalid_argument("csv: header must be x1,...,xn,y");
  }
  d.n = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < d.n; ++j) {
    if (header[j] != "x" + std::to_string(j + 1)) {
      throw std::invalid_argument("csv: header column " + std::to_string(j + 1) + " must be x" +
                                  std::to_string(j + 1) + ", got '" + header[j] + "'");
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    }
    std::vector<double> x(static_cast<std::size_t>(d.n));
    for (int j = 0; j < d.n; ++j) x[j] = parse_double(cells[j], lineno);
    const double y = parse_double(cells.back(), lineno);
    if (auto msg = check_sample(x, y, r, M1); !msg.empty()) {
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": " + msg);
    }
    d.X.push_back(std::move(x));
    d.Y.push_back(y);
  }
  d.validate();
  return d;
}

Dataset read_csv_file(const std::string& path, double r, double M1) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return read_csv(in, r, M1);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (int j = 1; j <= data.n; ++j) out << 'x' << j << ',';
  out << "y\n";
  char buf[64];
  auto put = [&](double v) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, p - buf);
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.X[i]) {
      put(v);
      out << ',';
    }
    put(data.Y[i]);
    out << '\n';
  }
}

std::vector<double> sample_ball(int n, double r, RandomStream& rng) {
  std::vector<double> x(static_cast<std::size_t>(n));
  double nn = 0.0;
  do {
    for (auto& v : x) v = rng.normal();
    nn = norm2(x);
  } while (nn == 0.0);
  const double rad = r * std::pow(rng.uniform(), 1.0 / n);
  for (auto& v : x) v *= rad / nn;
  // Rounding can push the norm a hair past r.
  const double after = norm2(x);
  if (after > r) {
    for (auto& v : x) v *= r / after;
  }
  return x;
}

ControlPath random_control(int m, double M, double T, int max_pieces, RandomStream& rng) {
  if (m < 1 || max_pieces < 1) throw std::invalid_argument("random_control: need m >= 1 and max_pieces >= 1");
  if (T == 0.0) return ControlPath(m, {0.0}, {}, M);
  const int pieces = rng.uniform_int(1, max_pieces);
  std::vector<double> cuts;
  for (int p = 1; p < pieces; ++p) cuts.push_back(rng.uniform(0.0, T));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> bp{0.0};
  for (double c : cuts) {
    if (c > bp.back() && c < T) bp.push_back(c);
  }
  bp.push_back(T);
  std::vector<std::vector<double>> values;
  for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
    std::vector<double> row(static_cast<std::size_t>(m));
    const bool bang = rng.uniform() < 0.5;
    for (auto& v : row) v = bang ? M * rng.sign() : rng.uniform(-M, M);
    values.push_back(std::move(row));
  }
  return ControlPath(m, std::move(bp), std::move(values), M);
}

Dataset generate_planted(const SeriesEvaluator& ev, const ControlPath& planted, std::size_t N, double noise,
                         double M1, std::uint64_t seed, std::uint64_t stream, unsigned threads) {
  const auto& sys = ev.system();
  check_control_conforms(sys, planted);
  if (!(noise >= 0.0)) throw std::invalid_argument("generate_planted: noise must be >= 0");
  const SignatureTable sig = signature_up_to(planted, ev.order());
  Dataset d;
  d.n = sys.n;
  d.r = sys.r;
  d.M1 = M1;
  d.X.resize(N);
  d.Y.resize(N);
  parallel_for(N, threads, [&](std::size_t i) {
    RandomStream rng(seed, streams::sub(stream, i));
    d.X[i] = sample_ball(sys.n, sys.r, rng);
    double y = ev.value(d.X[i], sig);
    if (noise > 0.0) {
      RandomStream nrng(seed, streams::sub(streams::kNoise + stream, i));
      y += nrng.uniform(-noise, noise);
    }
    d.Y[i] = y;
  });
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(d.Y[i])) throw std::runtime_error("generate_planted: non-finite label");
  }
  d.validate();
  return d;
}

}  // namespace cfnet
