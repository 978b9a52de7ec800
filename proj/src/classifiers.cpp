#include "maxhunt/classifiers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mh {

KnnModel knn_fit(const Matrix& features, const std::vector<int>& labels, int k) {
  if (features.rows != labels.size()) throw Error("feature/label count mismatch");
  if (features.rows == 0) throw Error("empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > features.rows) {
    throw Error("k out of range: " + std::to_string(k));
  }
  if (k % 2 == 0) throw Error("k must be odd, got " + std::to_string(k));
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error("label outside {0,1}");
  }
  return KnnModel{features, labels, k};
}

std::vector<int> knn_predict(const KnnModel& model, const Matrix& queries) {
  if (queries.cols != model.train_x.cols) {
    throw Error("query dimension " + std::to_string(queries.cols) +
                " does not match training dimension " +
                std::to_string(model.train_x.cols));
  }
  const std::size_t m = model.train_x.rows;
  const std::size_t k = static_cast<std::size_t>(model.k);
  std::vector<int> out(queries.rows);
  std::vector<std::pair<double, std::size_t>> dist(m);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    const double* qr = queries.row(q);
    for (std::size_t i = 0; i < m; ++i) {
      const double* tr = model.train_x.row(i);
      double s = 0.0;
      for (std::size_t c = 0; c < queries.cols; ++c) {
        const double d = qr[c] - tr[c];
        s += d * d;
      }
      dist[i] = {s, i};
    }
    // Pair ordering breaks distance ties by smaller training index.
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    int votes = 0;
    for (std::size_t i = 0; i < k; ++i) votes += model.labels[dist[i].second];
    out[q] = 2 * votes > model.k ? 1 : 0;
  }
  return out;
}

LdaModel lda_fit(const Matrix& features, const std::vector<int>& labels,
                 double regularization) {
  if (features.rows != labels.size()) throw Error("feature/label count mismatch");
  const std::size_t c = features.cols;
  if (c < 1) throw Error("LDA needs at least one feature");
  std::size_t n0 = 0, n1 = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error("label outside {0,1}");
    (l == 0 ? n0 : n1) += 1;
  }
  if (n0 < 2 || n1 < 2) {
    throw Error("degenerate class: LDA needs at least 2 rows per class");
  }

  LdaModel model;
  model.mean0.assign(c, 0.0);
  model.mean1.assign(c, 0.0);
  for (std::size_t i = 0; i < features.rows; ++i) {
    auto& mean = labels[i] == 0 ? model.mean0 : model.mean1;
    const double* r = features.row(i);
    for (std::size_t j = 0; j < c; ++j) mean[j] += r[j];
  }
  for (std::size_t j = 0; j < c; ++j) {
    model.mean0[j] /= n0;
    model.mean1[j] /= n1;
  }

  // Pooled within-class covariance [(n0-1)S0 + (n1-1)S1] / (n0+n1-2).
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(c, c);
  Eigen::VectorXd centered(c);
  for (std::size_t i = 0; i < features.rows; ++i) {
    const auto& mean = labels[i] == 0 ? model.mean0 : model.mean1;
    const double* r = features.row(i);
    for (std::size_t j = 0; j < c; ++j) centered[j] = r[j] - mean[j];
    s.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  s = s.selfadjointView<Eigen::Lower>();
  s /= static_cast<double>(n0 + n1 - 2);

  double diag_add = regularization * s.trace() / c;
  if (diag_add == 0.0) diag_add = regularization;  // all-constant features
  s.diagonal().array() += diag_add;

  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw Error("LDA covariance is singular even after regularization; "
                "increase the regularization parameter");
  }
  Eigen::VectorXd delta(c);
  for (std::size_t j = 0; j < c; ++j) delta[j] = model.mean1[j] - model.mean0[j];
  Eigen::VectorXd w = llt.solve(delta);

  model.direction.assign(w.data(), w.data() + c);
  model.chol_lower = Matrix(c, c);
  Eigen::MatrixXd lower = llt.matrixL();
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) model.chol_lower(i, j) = lower(i, j);
  }
  model.log_prior_odds = std::log(static_cast<double>(n1) / n0);
  return model;
}

std::vector<int> lda_predict(const LdaModel& model, const Matrix& queries) {
  const std::size_t c = model.direction.size();
  if (queries.cols != c) {
    throw Error("query dimension " + std::to_string(queries.cols) +
                " does not match model dimension " + std::to_string(c));
  }
  std::vector<int> out(queries.rows);
  for (std::size_t i = 0; i < queries.rows; ++i) {
    const double* r = queries.row(i);
    double g = model.log_prior_odds;
    for (std::size_t j = 0; j < c; ++j) {
      g += (r[j] - 0.5 * (model.mean0[j] + model.mean1[j])) * model.direction[j];
    }
    out[i] = g > 0.0 ? 1 : 0;
  }
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw Error("label sequence length mismatch");
  if (predicted.empty()) throw Error("empty label sequences");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) agree += predicted[i] == truth[i];
  return static_cast<double>(agree) / predicted.size();
}

}  // namespace mh
