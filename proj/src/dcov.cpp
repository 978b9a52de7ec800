#include "maxhunt/dcov.hpp"

#include <cmath>
#include <fstream>

namespace mh {

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::V2: return "V2";
    case Measure::R2: return "R2";
    case Measure::T: return "T";
  }
  throw Error("unknown measure");
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::U: return "U";
    case Estimator::V: return "V";
    case Estimator::DC: return "DC";
  }
  throw Error("unknown estimator");
}

Measure measure_from_name(const std::string& name) {
  if (name == "V2" || name == "v2") return Measure::V2;
  if (name == "R2" || name == "r2") return Measure::R2;
  if (name == "T" || name == "t") return Measure::T;
  throw ConfigError("unknown measure: " + name);
}

Estimator estimator_from_name(const std::string& name) {
  if (name == "U" || name == "u") return Estimator::U;
  if (name == "V" || name == "v") return Estimator::V;
  if (name == "DC" || name == "dc") return Estimator::DC;
  throw ConfigError("unknown estimator: " + name);
}

namespace {

double row_distance(const Matrix& x, std::size_t i, std::size_t j) {
  const double* a = x.row(i);
  const double* b = x.row(j);
  double s = 0.0;
  for (std::size_t c = 0; c < x.cols; ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

double cross_row_distance(const Matrix& x, std::size_t i, const Matrix& y,
                          std::size_t j) {
  const double* a = x.row(i);
  const double* b = y.row(j);
  double s = 0.0;
  for (std::size_t c = 0; c < x.cols; ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

void check_sample(const MarginalSample& sample) {
  if (sample.values.cols == 0) throw Error("marginal sample has no columns");
  if (sample.values.rows != sample.labels.size()) {
    throw Error("marginal sample row/label count mismatch");
  }
  for (int l : sample.labels) {
    if (l != 0 && l != 1) throw Error("marginal sample label outside {0,1}");
  }
}

// Distance matrix double-centered in place; returns the input rows' pairwise
// Euclidean distances with row, column and grand means removed.
std::vector<double> centered_distances(const Matrix& x) {
  const std::size_t n = x.rows;
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = row_distance(x, i, j);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += d[i * n + j];
    row_mean[i] = s / n;
    grand += s;
  }
  grand /= static_cast<double>(n) * n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] += grand - row_mean[i] - row_mean[j];
    }
  }
  return d;
}

}  // namespace

double dcov_sq_u(const MarginalSample& sample) {
  check_sample(sample);
  std::vector<std::size_t> idx0, idx1;
  for (std::size_t i = 0; i < sample.labels.size(); ++i) {
    (sample.labels[i] == 0 ? idx0 : idx1).push_back(i);
  }
  const std::size_t n0 = idx0.size(), n1 = idx1.size();
  if (n0 < 2 || n1 < 2) {
    throw Error("degenerate class: the unbiased estimator needs at least 2 "
                "samples per class (found " + std::to_string(n0) + " and " +
                std::to_string(n1) + ")");
  }
  const Matrix& x = sample.values;
  double i00 = 0.0, i11 = 0.0, i01 = 0.0;
  for (std::size_t a = 0; a < n0; ++a) {
    for (std::size_t b = a + 1; b < n0; ++b) i00 += row_distance(x, idx0[a], idx0[b]);
  }
  for (std::size_t a = 0; a < n1; ++a) {
    for (std::size_t b = a + 1; b < n1; ++b) i11 += row_distance(x, idx1[a], idx1[b]);
  }
  for (std::size_t a = 0; a < n0; ++a) {
    for (std::size_t b = 0; b < n1; ++b) i01 += row_distance(x, idx0[a], idx1[b]);
  }
  i00 *= 2.0 / (static_cast<double>(n0) * (n0 - 1));
  i11 *= 2.0 / (static_cast<double>(n1) * (n1 - 1));
  i01 /= static_cast<double>(n0) * n1;
  const double p = static_cast<double>(n1) / (n0 + n1);
  const double q = 1.0 - p;
  return 4.0 * p * p * q * q * (i01 - 0.5 * (i00 + i11));
}

double dcov_sq_v(const MarginalSample& sample) {
  check_sample(sample);
  const std::size_t n = sample.values.rows;
  if (n < 2) throw Error("need at least 2 samples");
  double p = 0.0;
  for (int l : sample.labels) p += l;
  p /= n;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = sample.labels[i] - p;
    for (std::size_t j = i + 1; j < n; ++j) {
      acc += wi * (sample.labels[j] - p) * row_distance(sample.values, i, j);
    }
  }
  // Ordered pairs double the i<j sum; the diagonal contributes zero distance.
  return -2.0 * (2.0 * acc) / (static_cast<double>(n) * n);
}

double dcov_sq_dc(const Matrix& x, const Matrix& y) {
  if (x.rows != y.rows) throw Error("row count mismatch");
  if (x.rows < 2) throw Error("need at least 2 samples");
  if (x.cols == 0 || y.cols == 0) throw Error("degenerate dimension");
  const std::size_t n = x.rows;
  const auto a = centered_distances(x);
  const auto b = centered_distances(y);
  double acc = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) acc += a[i] * b[i];
  return acc / (static_cast<double>(n) * n);
}

double dvar_sq(const Matrix& x) { return dcov_sq_dc(x, x); }

double dcor_sq(const MarginalSample& sample) {
  check_sample(sample);
  Matrix y(sample.labels.size(), 1);
  for (std::size_t i = 0; i < sample.labels.size(); ++i) y(i, 0) = sample.labels[i];
  const double num = dcov_sq_dc(sample.values, y);
  const double den = std::sqrt(dvar_sq(sample.values) * dvar_sq(y));
  if (!(den > 1e-14)) return 0.0;
  return num / den;
}

DependenceCurve dependence_curve(const FunctionalDataset& dataset,
                                 Measure measure, Estimator estimator) {
  dataset.validate();
  if (measure == Measure::T) {
    throw Error("t score curves are produced by the selectors module");
  }
  if (measure == Measure::V2 && estimator == Estimator::U) {
    if (dataset.count(0) < 2 || dataset.count(1) < 2) {
      throw Error("degenerate class: the unbiased estimator needs at least 2 "
                  "samples per class");
    }
  }
  DependenceCurve curve;
  curve.grid = dataset.grid;
  curve.measure = measure;
  curve.estimator = estimator;
  curve.values.resize(dataset.width());

  MarginalSample marginal;
  marginal.values = Matrix(dataset.n(), 1);
  marginal.labels = dataset.labels;
  for (std::size_t j = 0; j < dataset.width(); ++j) {
    for (std::size_t i = 0; i < dataset.n(); ++i) {
      marginal.values(i, 0) = dataset.x(i, j);
    }
    if (measure == Measure::R2) {
      curve.values[j] = dcor_sq(marginal);
    } else {
      switch (estimator) {
        case Estimator::U: curve.values[j] = dcov_sq_u(marginal); break;
        case Estimator::V: curve.values[j] = dcov_sq_v(marginal); break;
        case Estimator::DC: {
          Matrix y(marginal.labels.size(), 1);
          for (std::size_t i = 0; i < marginal.labels.size(); ++i) {
            y(i, 0) = marginal.labels[i];
          }
          curve.values[j] = dcov_sq_dc(marginal.values, y);
          break;
        }
      }
    }
  }
  return curve;
}

void save_curve(const DependenceCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write curve file: " + path);
  out << "t," << measure_name(curve.measure);
  if (curve.measure != Measure::T) out << '_' << estimator_name(curve.estimator);
  out << '\n';
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    out << format_double(curve.grid[i]) << ',' << format_double(curve.values[i])
        << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace mh
