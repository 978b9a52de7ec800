#pragma once

#include "maxhunt/dcov.hpp"

namespace mh {

struct MaximaConfig {
  int h = 3;          // window half-width in grid indices, 1 <= h < N
  int max_vars = 20;  // cap on the number of returned maxima, >= 1
};

// Index i is a local maximum when its value is strictly greater than every
// other value in the window [i-h, i+h] clipped at the grid edges. Returned
// indices are sorted by value descending, ties broken by smaller index.
std::vector<int> local_maxima(const DependenceCurve& curve, int h);

// Maxima hunting: dependence curve -> local maxima -> truncate to max_vars.
// method_id is MHV for measure V2 and MHR for measure R2. An empty result is
// legal output (e.g. a constant curve has no strict maxima).
SelectionResult mh_select(const FunctionalDataset& dataset, Measure measure,
                          Estimator estimator, const MaximaConfig& config);

}  // namespace mh
