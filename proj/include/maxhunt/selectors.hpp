#pragma once

#include "maxhunt/dcov.hpp"

namespace mh {

enum class SelectorMethod { MHV, MHR, T, FCD, FCQ, MID, MIQ, PLS, BASE };

std::string selector_name(SelectorMethod m);
SelectorMethod selector_from_name(const std::string& name);

// A selector request: which method, how many variables/components it may
// use, plus method-specific parameters (e.g. h for maxima hunting).
struct SelectorSpec {
  SelectorMethod method = SelectorMethod::MHV;
  int target_dim = 20;
  std::map<std::string, double> method_params;
};

// Fitted dimension reduction: either a subset of grid indices or a linear
// map (PLS weights + loadings with the training column means).
struct Projection {
  enum class Kind { IndexSubset, LinearMap };
  Kind kind = Kind::IndexSubset;
  Grid fit_grid;
  std::vector<int> indices;       // IndexSubset
  Matrix weights;                 // N x c unit weight vectors (LinearMap)
  Matrix loadings;                // N x c deflation loadings (LinearMap)
  std::vector<double> col_means;  // centering used by LinearMap
  int components = 0;             // actually fitted components (may be < requested)
};

// Pointwise two-sample t statistic |mean1 - mean0| / sqrt(s1^2/n1 + s0^2/n0)
// per grid index, packaged as a curve with measure tag T. A zero standard
// error yields 0 when the class means agree and a largest-finite sentinel
// otherwise. Both classes need >= 2 samples.
DependenceCurve t_scores(const FunctionalDataset& dataset);

// Top-d indices by t score, descending, ties to the smaller index.
SelectionResult t_select(const FunctionalDataset& dataset, int d);

// Greedy minimum-redundancy maximum-relevance selection.
//   FCD/FCQ: relevance = two-class ANOVA F, redundancy = |Pearson correlation|
//   MID/MIQ: both terms are mutual information over 3-level discretized
//            variables (cut points at mean +- sd), natural log, 0*log 0 = 0
// D variants maximize relevance - meanRedundancy, Q variants the quotient
// (denominator floored at 1e-12). Scores record the greedy criterion value
// at each pick.
SelectionResult mrmr_select(const FunctionalDataset& dataset, int d,
                            SelectorMethod variant);

// Iterative partial least squares with the 0/1 label as response: at each
// step the unit weight vector maximizes covariance with the response
// residual, then data and response are deflated by the regression on the
// score. Training scores come out mutually orthogonal (verified at fit
// time). A degenerate residual stops early with fewer components.
Projection pls_fit(const FunctionalDataset& dataset, int c);

// Identity reduction over all grid points (the no-selection baseline).
Projection base_projection(const Grid& grid);

// Apply a fitted projection to a dataset on the same grid.
Matrix project(const Projection& projection, const FunctionalDataset& dataset);

}  // namespace mh
