#include "cfnet/erm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cfnet/signature.hpp"

namespace cfnet {

namespace {

void multiply(const Matrix& A, std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < A.rows; ++i) out[i] = dot(A.row(i), x);
}

void multiply_transpose(const Matrix& A, std::span<const double> y, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    const auto row = A.row(i);
    for (std::size_t j = 0; j < A.cols; ++j) out[j] += row[j] * y[i];
  }
}

double project(std::vector<double>& theta, const std::vector<double>& box) {
  double moved = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double c = std::clamp(theta[j], -box[j], box[j]);
    moved = std::max(moved, std::abs(c - theta[j]));
    theta[j] = c;
  }
  return moved;
}

std::size_t count_outside(const std::vector<double>& theta, const std::vector<double>& box) {
  std::size_t bad = 0;
  for (std::size_t j = 0; j < theta.size(); ++j) bad += std::abs(theta[j]) > box[j];
  return bad;
}

}  // namespace

Matrix feature_matrix(const SeriesEvaluator& ev, const Dataset& data, unsigned threads) {
  if (data.n != ev.system().n) throw std::invalid_argument("feature_matrix: data dimension differs from system n");
  const std::size_t W = ev.feature_count();
  Matrix F(data.size(), W);
  parallel_for(data.size(), threads, [&](std::size_t i) {
    auto f = ev.features(data.X[i]);
    for (std::size_t j = 0; j < W; ++j) {
      if (!std::isfinite(f[j])) throw std::runtime_error("feature_matrix: non-finite feature");
      F(i, j) = f[j];
    }
  });
  return F;
}

std::vector<double> coefficient_box(const SystemSpec& sys, const std::vector<Word>& words) {
  std::vector<double> box;
  box.reserve(words.size());
  for (const auto& w : words) box.push_back(signature_norm_bound(sys.M, sys.T, static_cast<int>(w.size())));
  return box;
}

double empirical_risk(LossKind loss, const Matrix& features, std::span<const double> y,
                      std::span<const double> theta) {
  if (features.rows == 0) return 0.0;
  CompensatedSum s;
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double d = dot(features.row(i), theta) - y[i];
    s.add(loss == LossKind::Squared ? d * d : std::abs(d));
  }
  return s.value() / static_cast<double>(features.rows);
}

double empirical_risk(const FittedModel& model, const SeriesEvaluator& ev, const Dataset& data, unsigned threads) {
  if (ev.order() != model.K) throw std::invalid_argument("empirical_risk: evaluator order differs from model K");
  const Matrix F = feature_matrix(ev, data, threads);
  return empirical_risk(model.loss, F, data.Y, model.theta);
}

FittedModel erm_fit(const Dataset& data, const SystemSpec& sys, int K, const ErmOptions& opts) {
  SeriesEvaluator ev(sys, K, opts.word_cap);
  return erm_fit(data, ev, opts);
}

FittedModel erm_fit(const Dataset& data, const SeriesEvaluator& ev, const ErmOptions& opts) {
  data.validate();
  if (data.size() == 0) throw std::invalid_argument("erm_fit: empty dataset");
  if (opts.max_iter < 1) throw std::invalid_argument("erm_fit: max_iter must be >= 1");
  FittedModel model;
  model.sys = ev.system();
  model.K = ev.order();
  model.loss = opts.loss;
  model.words = ev.words();
  model.box = coefficient_box(model.sys, model.words);

  const Matrix F = feature_matrix(ev, data, opts.threads);
  const std::size_t N = F.rows, W = F.cols;
  const double invN = 1.0 / static_cast<double>(N);
  std::vector<double> theta(W, 0.0), resid(N), grad(W);

  if (model.K == 0 && opts.loss == LossKind::Squared) {
    // One feature f = c^T x: theta = <y, f> / <f, f>, clipped to the unit box.
    std::vector<double> f(N);
    for (std::size_t i = 0; i < N; ++i) f[i] = F(i, 0);
    const double ff = dot(f, f);
    theta[0] = ff > 0.0 ? std::clamp(dot(data.Y, f) / ff, -model.box[0], model.box[0]) : 0.0;
    model.theta = theta;
    model.train_loss = empirical_risk(opts.loss, F, data.Y, theta);
    model.converged = true;
    return model;
  }

  if (opts.loss == LossKind::Squared) {
    const double smax = spectral_norm(F, opts.seed);
    model.lipschitz = 2.0 * invN * smax * smax;
    if (model.lipschitz == 0.0) {
      // All features vanish on the sample; any theta is optimal.
      model.theta = theta;
      model.train_loss = empirical_risk(opts.loss, F, data.Y, theta);
      model.converged = true;
      return model;
    }
    model.step = 1.0 / model.lipschitz;
    std::vector<double> prev(W);
    for (int it = 0; it < opts.max_iter; ++it) {
      multiply(F, theta, resid);
      for (std::size_t i = 0; i < N; ++i) resid[i] -= data.Y[i];
      multiply_transpose(F, resid, grad);
      prev = theta;
      for (std::size_t j = 0; j < W; ++j) theta[j] -= model.step * 2.0 * invN * grad[j];
      project(theta, model.box);
      model.box_violations += count_outside(theta, model.box);
      double move = 0.0;
      for (std::size_t j = 0; j < W; ++j) move += (theta[j] - prev[j]) * (theta[j] - prev[j]);
      model.grad_norm = std::sqrt(move) / model.step;
      model.iterations = it + 1;
      if (model.grad_norm <= opts.tol) {
        model.converged = true;
        break;
      }
    }
    model.theta = theta;
    model.train_loss = empirical_risk(opts.loss, F, data.Y, theta);
  } else {
    double radius = 0.0;
    for (double b : model.box) radius += b * b;
    radius = std::sqrt(radius);
    double row_scale = 0.0;
    for (std::size_t i = 0; i < N; ++i) row_scale += dot(F.row(i), F.row(i));
    row_scale = std::sqrt(row_scale * invN);
    model.step = row_scale > 0.0 ? radius / row_scale : 0.0;
    std::vector<double> best = theta;
    double best_loss = empirical_risk(opts.loss, F, data.Y, theta);
    for (int it = 0; it < opts.max_iter && model.step > 0.0; ++it) {
      multiply(F, theta, resid);
      for (std::size_t i = 0; i < N; ++i) {
        const double d = resid[i] - data.Y[i];
        resid[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      }
      multiply_transpose(F, resid, grad);
      double gn = 0.0;
      for (std::size_t j = 0; j < W; ++j) {
        grad[j] *= invN;
        gn += grad[j] * grad[j];
      }
      model.grad_norm = std::sqrt(gn);
      model.iterations = it + 1;
      if (model.grad_norm == 0.0) {
        model.converged = true;
        break;
      }
      const double eta = model.step / std::sqrt(static_cast<double>(it) + 1.0);
      for (std::size_t j = 0; j < W; ++j) theta[j] -= eta * grad[j];
      project(theta, model.box);
      model.box_violations += count_outside(theta, model.box);
      const double l = empirical_risk(opts.loss, F, data.Y, theta);
      if (l < best_loss) {
        best_loss = l;
        best = theta;
      }
      if (best_loss <= opts.tol) {
        model.converged = true;
        break;
      }
    }
    if (model.step == 0.0) model.converged = true;
    model.theta = best;
    model.train_loss = best_loss;
  }
  if (!model.converged) {
    model.warnings.push_back("did not converge within " + std::to_string(opts.max_iter) +
                             " iterations; final gradient norm " + std::to_string(model.grad_norm));
  }
  return model;
}

}  // namespace cfnet
