#include "maxhunt/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mh {

std::string selector_name(SelectorMethod m) {
  switch (m) {
    case SelectorMethod::MHV: return "MHV";
    case SelectorMethod::MHR: return "MHR";
    case SelectorMethod::T: return "T";
    case SelectorMethod::FCD: return "FCD";
    case SelectorMethod::FCQ: return "FCQ";
    case SelectorMethod::MID: return "MID";
    case SelectorMethod::MIQ: return "MIQ";
    case SelectorMethod::PLS: return "PLS";
    case SelectorMethod::BASE: return "BASE";
  }
  throw Error("unknown selector");
}

SelectorMethod selector_from_name(const std::string& name) {
  for (SelectorMethod m :
       {SelectorMethod::MHV, SelectorMethod::MHR, SelectorMethod::T,
        SelectorMethod::FCD, SelectorMethod::FCQ, SelectorMethod::MID,
        SelectorMethod::MIQ, SelectorMethod::PLS, SelectorMethod::BASE}) {
    if (selector_name(m) == name) return m;
  }
  throw ConfigError("unknown selector method: " + name);
}

namespace {

struct ColumnStats {
  double mean0, mean1, var0, var1;  // per-class mean and ddof-1 variance
};

ColumnStats column_stats(const FunctionalDataset& ds, std::size_t col,
                         std::size_t n0, std::size_t n1) {
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    (ds.labels[i] == 0 ? s0 : s1) += ds.x(i, col);
  }
  ColumnStats st{};
  st.mean0 = s0 / n0;
  st.mean1 = s1 / n1;
  double q0 = 0.0, q1 = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double d = ds.x(i, col) - (ds.labels[i] == 0 ? st.mean0 : st.mean1);
    (ds.labels[i] == 0 ? q0 : q1) += d * d;
  }
  st.var0 = q0 / (n0 - 1);
  st.var1 = q1 / (n1 - 1);
  return st;
}

// Descending-score order with ties to the smaller index.
std::vector<int> order_by_score(const std::vector<double>& scores) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return idx;
}

double pearson_abs(const Matrix& x, std::size_t a, std::size_t b) {
  const std::size_t n = x.rows;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += x(i, a);
    mb += x(i, b);
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = x(i, a) - ma;
    const double db = x(i, b) - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;  // constant column: no linear dependence
  return std::fabs(sab / std::sqrt(saa * sbb));
}

// Two-class ANOVA F statistic for one column.
double anova_f(const ColumnStats& st, std::size_t n0, std::size_t n1) {
  const std::size_t n = n0 + n1;
  const double grand = (n0 * st.mean0 + n1 * st.mean1) / n;
  const double between = n0 * (st.mean0 - grand) * (st.mean0 - grand) +
                         n1 * (st.mean1 - grand) * (st.mean1 - grand);
  const double within = ((n0 - 1) * st.var0 + (n1 - 1) * st.var1) / (n - 2);
  if (within <= 0.0) {
    return between > 0.0 ? std::numeric_limits<double>::max() : 0.0;
  }
  return between / within;
}

// 3-level discretization at mean +- sd (ddof 1): 0 below, 1 inside, 2 above.
std::vector<int> discretize3(const Matrix& x, std::size_t col) {
  const std::size_t n = x.rows;
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m += x(i, col);
  m /= n;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x(i, col) - m;
    q += d * d;
  }
  const double sd = std::sqrt(q / (n - 1));
  std::vector<int> levels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x(i, col);
    levels[i] = v < m - sd ? 0 : (v > m + sd ? 2 : 1);
  }
  return levels;
}

// Plug-in mutual information from the empirical contingency table; natural
// log, 0*log 0 = 0.
double mutual_information(const std::vector<int>& a, int la,
                          const std::vector<int>& b, int lb) {
  const std::size_t n = a.size();
  std::vector<double> joint(static_cast<std::size_t>(la) * lb, 0.0);
  std::vector<double> pa(la, 0.0), pb(lb, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    joint[a[i] * lb + b[i]] += 1.0;
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
  }
  double mi = 0.0;
  for (int r = 0; r < la; ++r) {
    for (int c = 0; c < lb; ++c) {
      const double pj = joint[r * lb + c] / n;
      if (pj > 0.0) mi += pj * std::log(pj * n * n / (pa[r] * pb[c]));
    }
  }
  return mi;
}

}  // namespace

DependenceCurve t_scores(const FunctionalDataset& dataset) {
  dataset.validate();
  const std::size_t n0 = dataset.count(0);
  const std::size_t n1 = dataset.count(1);
  if (n0 < 2 || n1 < 2) {
    throw Error("degenerate class: t scores need at least 2 samples per class");
  }
  DependenceCurve curve;
  curve.grid = dataset.grid;
  curve.measure = Measure::T;
  curve.values.resize(dataset.width());
  for (std::size_t j = 0; j < dataset.width(); ++j) {
    const ColumnStats st = column_stats(dataset, j, n0, n1);
    const double se = std::sqrt(st.var1 / n1 + st.var0 / n0);
    if (se > 0.0) {
      curve.values[j] = std::fabs(st.mean1 - st.mean0) / se;
    } else {
      curve.values[j] = st.mean1 == st.mean0
                            ? 0.0
                            : std::numeric_limits<double>::max();
    }
  }
  return curve;
}

SelectionResult t_select(const FunctionalDataset& dataset, int d) {
  if (d < 1 || static_cast<std::size_t>(d) > dataset.width()) {
    throw Error("target dimension out of range: " + std::to_string(d));
  }
  const DependenceCurve curve = t_scores(dataset);
  auto order = order_by_score(curve.values);
  order.resize(d);
  SelectionResult result;
  result.indices = order;
  for (int i : order) result.scores.push_back(curve.values[i]);
  result.method_id = "T";
  result.hyperparams["dim"] = d;
  return result;
}

SelectionResult mrmr_select(const FunctionalDataset& dataset, int d,
                            SelectorMethod variant) {
  dataset.validate();
  const bool fc = variant == SelectorMethod::FCD || variant == SelectorMethod::FCQ;
  const bool mi = variant == SelectorMethod::MID || variant == SelectorMethod::MIQ;
  if (!fc && !mi) throw Error("mrmr variant must be one of FCD/FCQ/MID/MIQ");
  const bool quotient = variant == SelectorMethod::FCQ || variant == SelectorMethod::MIQ;
  const std::size_t width = dataset.width();
  if (d < 1 || static_cast<std::size_t>(d) > width) {
    throw Error("target dimension out of range: " + std::to_string(d));
  }
  const std::size_t n0 = dataset.count(0);
  const std::size_t n1 = dataset.count(1);
  if (n0 < 2 || n1 < 2) {
    throw Error("degenerate class: mRMR needs at least 2 samples per class");
  }

  std::vector<double> relevance(width);
  std::vector<std::vector<int>> levels;  // discretized columns for MI variants
  if (fc) {
    for (std::size_t j = 0; j < width; ++j) {
      relevance[j] = anova_f(column_stats(dataset, j, n0, n1), n0, n1);
    }
  } else {
    levels.resize(width);
    for (std::size_t j = 0; j < width; ++j) levels[j] = discretize3(dataset.x, j);
    for (std::size_t j = 0; j < width; ++j) {
      relevance[j] = mutual_information(levels[j], 3, dataset.labels, 2);
    }
  }

  SelectionResult result;
  result.method_id = selector_name(variant);
  result.hyperparams["dim"] = d;
  std::vector<bool> taken(width, false);
  std::vector<double> red_sum(width, 0.0);  // redundancy vs. selected set
  for (int step = 0; step < d; ++step) {
    int best = -1;
    double best_score = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      if (taken[j]) continue;
      double score;
      if (step == 0) {
        score = relevance[j];
      } else if (quotient) {
        score = relevance[j] / std::max(red_sum[j] / step, 1e-12);
      } else {
        score = relevance[j] - red_sum[j] / step;
      }
      if (best < 0 || score > best_score) {
        best = static_cast<int>(j);
        best_score = score;
      }
    }
    taken[best] = true;
    result.indices.push_back(best);
    result.scores.push_back(best_score);
    for (std::size_t j = 0; j < width; ++j) {
      if (taken[j]) continue;
      red_sum[j] += fc ? pearson_abs(dataset.x, j, best)
                       : mutual_information(levels[j], 3, levels[best], 3);
    }
  }
  return result;
}

Projection pls_fit(const FunctionalDataset& dataset, int c) {
  dataset.validate();
  const std::size_t n = dataset.n();
  const std::size_t width = dataset.width();
  if (c < 1 || static_cast<std::size_t>(c) > std::min(n - 1, width)) {
    throw Error("component count out of range: " + std::to_string(c));
  }
  if (dataset.count(0) == 0 || dataset.count(1) == 0) {
    throw Error("degenerate class: PLS needs both classes present");
  }

  Projection proj;
  proj.kind = Projection::Kind::LinearMap;
  proj.fit_grid = dataset.grid;
  proj.col_means.assign(width, 0.0);
  for (std::size_t j = 0; j < width; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += dataset.x(i, j);
    proj.col_means[j] = s / n;
  }
  Matrix xr(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      xr(i, j) = dataset.x(i, j) - proj.col_means[j];
    }
  }
  double ymean = 0.0;
  for (int l : dataset.labels) ymean += l;
  ymean /= n;
  std::vector<double> yr(n);
  for (std::size_t i = 0; i < n; ++i) yr[i] = dataset.labels[i] - ymean;

  proj.weights = Matrix(width, c);
  proj.loadings = Matrix(width, c);
  Matrix scores(n, c);
  int fitted = 0;
  for (int comp = 0; comp < c; ++comp) {
    std::vector<double> w(width, 0.0);
    for (std::size_t j = 0; j < width; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += xr(i, j) * yr[i];
      w[j] = s;
    }
    double wn = 0.0;
    for (double v : w) wn += v * v;
    wn = std::sqrt(wn);
    if (wn < 1e-12) break;  // degenerate residual: stop with fewer components
    for (double& v : w) v /= wn;

    std::vector<double> t(n, 0.0);
    double tt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < width; ++j) s += xr(i, j) * w[j];
      t[i] = s;
      tt += s * s;
    }
    if (tt < 1e-24) break;

    std::vector<double> p(width, 0.0);
    for (std::size_t j = 0; j < width; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += xr(i, j) * t[i];
      p[j] = s / tt;
    }
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += yr[i] * t[i];
    q /= tt;

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < width; ++j) xr(i, j) -= t[i] * p[j];
      yr[i] -= q * t[i];
    }
    for (std::size_t j = 0; j < width; ++j) {
      proj.weights(j, comp) = w[j];
      proj.loadings(j, comp) = p[j];
    }
    for (std::size_t i = 0; i < n; ++i) scores(i, comp) = t[i];
    ++fitted;
  }
  if (fitted == 0) throw Error("PLS found no usable component");
  proj.components = fitted;

  // Training scores must be mutually orthogonal by construction.
  for (int a = 0; a < fitted; ++a) {
    for (int b = a + 1; b < fitted; ++b) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += scores(i, a) * scores(i, b);
        na += scores(i, a) * scores(i, a);
        nb += scores(i, b) * scores(i, b);
      }
      if (std::fabs(dot) > 1e-8 * std::max(1.0, std::sqrt(na * nb))) {
        throw Error("PLS scores lost orthogonality");
      }
    }
  }
  return proj;
}

Projection base_projection(const Grid& grid) {
  Projection proj;
  proj.kind = Projection::Kind::IndexSubset;
  proj.fit_grid = grid;
  proj.indices.resize(grid.size());
  std::iota(proj.indices.begin(), proj.indices.end(), 0);
  return proj;
}

Matrix project(const Projection& projection, const FunctionalDataset& dataset) {
  if (!(projection.fit_grid == dataset.grid)) {
    throw Error("projection grid does not match dataset grid");
  }
  if (projection.kind == Projection::Kind::IndexSubset) {
    return gather_columns(dataset.x, projection.indices);
  }
  const std::size_t n = dataset.n();
  const std::size_t width = dataset.width();
  Matrix xr(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      xr(i, j) = dataset.x(i, j) - projection.col_means[j];
    }
  }
  Matrix out(n, projection.components);
  for (int comp = 0; comp < projection.components; ++comp) {
    for (std::size_t i = 0; i < n; ++i) {
      double t = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        t += xr(i, j) * projection.weights(j, comp);
      }
      out(i, comp) = t;
      for (std::size_t j = 0; j < width; ++j) {
        xr(i, j) -= t * projection.loadings(j, comp);
      }
    }
  }
  return out;
}

}  // namespace mh
