#pragma once

#include <string>
#include <vector>

#include "maxhunt/core.hpp"

namespace mh {

// What a curve's values measure: squared distance covariance, squared
// distance correlation, or a two-sample t score (selectors module).
enum class Measure { V2, R2, T };

// Which finite-sample form backs a V2 value:
//   U  - unbiased two-sample form 4*p^2*(1-p)^2 * [I01 - (I00 + I11)/2]
//   V  - plug-in pair average  -(2/n^2) * sum (Yi-p)(Yj-p)|xi-xj|
//   DC - double-centered distance-matrix product (1/n^2) * sum Aij*Bij
enum class Estimator { U, V, DC };

std::string measure_name(Measure m);
std::string estimator_name(Estimator e);
Measure measure_from_name(const std::string& name);
Estimator estimator_from_name(const std::string& name);

// Values of the process at d chosen grid points, with the labels.
struct MarginalSample {
  Matrix values;            // n x d
  std::vector<int> labels;  // 0/1 per row
};

// t -> measure(X_t, Y) evaluated over a grid.
struct DependenceCurve {
  Grid grid;
  std::vector<double> values;
  Measure measure = Measure::V2;
  Estimator estimator = Estimator::U;
};

// U-statistic form; requires >= 2 samples in each class. May be negative.
double dcov_sq_u(const MarginalSample& sample);

// V-statistic (plug-in) form; requires n >= 2.
double dcov_sq_v(const MarginalSample& sample);

// Double-centered form for arbitrary real y (n x q); requires n >= 2.
// For binary y encoded as a 0/1 column this equals dcov_sq_v exactly.
double dcov_sq_dc(const Matrix& x, const Matrix& y);

// Distance variance: dcov_sq_dc(x, x); always >= 0.
double dvar_sq(const Matrix& x);

// Squared distance correlation with the label: double-centered numerator and
// denominators; defined as 0 when the denominator vanishes (below 1e-14).
double dcor_sq(const MarginalSample& sample);

// Pointwise curve over all grid positions (d = 1 marginals). Measure R2
// always uses the double-centered forms so numerator and denominator are
// plug-ins of the same empirical law; the estimator tag is recorded as given.
DependenceCurve dependence_curve(const FunctionalDataset& dataset,
                                 Measure measure, Estimator estimator);

// Two-column CSV "t,<MEASURE>[_<ESTIMATOR>]".
void save_curve(const DependenceCurve& curve, const std::string& path);

}  // namespace mh
