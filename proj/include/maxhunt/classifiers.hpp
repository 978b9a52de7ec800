#pragma once

#include "maxhunt/core.hpp"

namespace mh {

// Lazy k-nearest-neighbors model: stores the training data verbatim.
// k must be odd so binary votes cannot tie.
struct KnnModel {
  Matrix train_x;
  std::vector<int> labels;
  int k = 1;
};

KnnModel knn_fit(const Matrix& features, const std::vector<int>& labels, int k);

// Majority vote among the k nearest rows by Euclidean distance; equal
// distances rank by smaller training index.
std::vector<int> knn_predict(const KnnModel& model, const Matrix& queries);

// Fisher linear discriminant with pooled within-class covariance and
// empirical priors.
struct LdaModel {
  std::vector<double> mean0, mean1;
  std::vector<double> direction;  // S^-1 (mean1 - mean0)
  Matrix chol_lower;              // Cholesky factor of the regularized S
  double log_prior_odds = 0.0;    // log(n1 / n0)
};

// regularization scales trace(S)/c and is added to the diagonal (with an
// absolute fallback when the trace is zero); both classes need >= 2 rows.
LdaModel lda_fit(const Matrix& features, const std::vector<int>& labels,
                 double regularization = 1e-8);

// Label 1 iff (x - (mean0+mean1)/2) . direction + log_prior_odds > 0;
// the boundary case goes to label 0.
std::vector<int> lda_predict(const LdaModel& model, const Matrix& queries);

// Fraction of agreeing positions.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace mh
