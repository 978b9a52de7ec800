#include "maxhunt/maxima.hpp"

#include <algorithm>

namespace mh {

std::vector<int> local_maxima(const DependenceCurve& curve, int h) {
  const int n = static_cast<int>(curve.values.size());
  if (h < 1 || h >= n) {
    throw Error("window h must satisfy 1 <= h < " + std::to_string(n) +
                ", got " + std::to_string(h));
  }
  std::vector<int> maxima;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - h);
    const int hi = std::min(n - 1, i + h);
    bool is_max = true;
    for (int j = lo; j <= hi && is_max; ++j) {
      if (j != i && !(curve.values[i] > curve.values[j])) is_max = false;
    }
    if (is_max) maxima.push_back(i);
  }
  std::sort(maxima.begin(), maxima.end(), [&](int a, int b) {
    if (curve.values[a] != curve.values[b]) return curve.values[a] > curve.values[b];
    return a < b;
  });
  return maxima;
}

SelectionResult mh_select(const FunctionalDataset& dataset, Measure measure,
                          Estimator estimator, const MaximaConfig& config) {
  if (config.max_vars < 1) throw Error("max_vars must be >= 1");
  if (measure != Measure::V2 && measure != Measure::R2) {
    throw Error("maxima hunting needs measure V2 or R2");
  }
  const DependenceCurve curve = dependence_curve(dataset, measure, estimator);
  auto indices = local_maxima(curve, config.h);
  if (indices.size() > static_cast<std::size_t>(config.max_vars)) {
    indices.resize(config.max_vars);
  }
  SelectionResult result;
  result.indices = indices;
  result.scores.reserve(indices.size());
  for (int i : indices) result.scores.push_back(curve.values[i]);
  result.method_id = measure == Measure::V2 ? "MHV" : "MHR";
  result.hyperparams["h"] = config.h;
  result.hyperparams["max_vars"] = config.max_vars;
  return result;
}

}  // namespace mh
