#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "maxhunt/error.hpp"
#include "maxhunt/selectors.hpp"
#include "maxhunt/simulation.hpp"

namespace {

mh::Grid even_grid(std::size_t width) {
  mh::Grid g;
  g.points.resize(width);
  for (std::size_t i = 0; i < width; ++i) {
    g.points[i] = static_cast<double>(i + 1) / (width + 1);
  }
  return g;
}

// Four rows, two per class. Column j has class means 0 and mu[j] and unit
// pooled standard error, so the t score at j is |mu[j]|.
mh::FunctionalDataset unit_se_dataset(const std::vector<double>& mu) {
  const double delta = 1.0 / std::sqrt(2.0);
  mh::FunctionalDataset ds;
  ds.grid = even_grid(mu.size());
  ds.x = mh::Matrix(4, mu.size());
  ds.labels = {0, 0, 1, 1};
  for (std::size_t j = 0; j < mu.size(); ++j) {
    ds.x(0, j) = -delta;
    ds.x(1, j) = delta;
    ds.x(2, j) = mu[j] - delta;
    ds.x(3, j) = mu[j] + delta;
  }
  return ds;
}

// Three columns, eight rows. Columns 0 and 1 are perfectly correlated and
// most relevant; column 2 is slightly weaker but nearly uncorrelated with
// them, so every mRMR variant should pick {0, 2}.
mh::FunctionalDataset redundancy_dataset() {
  mh::FunctionalDataset ds;
  ds.grid = even_grid(3);
  ds.x = mh::Matrix(8, 3);
  ds.labels = {0, 0, 0, 0, 1, 1, 1, 1};
  const double a = 1.0, b = 0.9;
  const double col0[] = {-1, 1, -1, 1, a - 1, a + 1, a - 1, a + 1};
  const double col2[] = {-1, 1, 1, -1, b + 1, b - 1, b - 1, b + 1};
  for (std::size_t i = 0; i < 8; ++i) {
    ds.x(i, 0) = col0[i];
    ds.x(i, 1) = 3.0 * col0[i];
    ds.x(i, 2) = col2[i];
  }
  return ds;
}

mh::FunctionalDataset random_dataset(std::size_t n, std::size_t width,
                                     std::uint64_t seed) {
  mh::RngStream rng(seed, 0);
  mh::FunctionalDataset ds;
  ds.grid = even_grid(width);
  ds.x = mh::Matrix(n, width);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = (i < 2) ? 0 : (i < 4) ? 1 : (rng.uniform() < 0.5 ? 1 : 0);
    for (std::size_t j = 0; j < width; ++j) ds.x(i, j) = rng.normal();
  }
  return ds;
}

}  // namespace

TEST_SUITE("selectors") {

TEST_CASE("selector names round-trip") {
  using mh::SelectorMethod;
  for (SelectorMethod m :
       {SelectorMethod::MHV, SelectorMethod::MHR, SelectorMethod::T,
        SelectorMethod::FCD, SelectorMethod::FCQ, SelectorMethod::MID,
        SelectorMethod::MIQ, SelectorMethod::PLS, SelectorMethod::BASE}) {
    CHECK(mh::selector_from_name(mh::selector_name(m)) == m);
  }
  CHECK_THROWS_AS(mh::selector_from_name("DHB"), mh::ConfigError);
}

TEST_CASE("t score arithmetic: unit variances, means 0 and 1, n=100 each") {
  // Interleave +-sqrt(0.99) so each class has mean exactly 0 (or 1) and
  // ddof-1 variance exactly 1: sum of squares 100 * 0.99 = 99 over 99 dof.
  const double c = std::sqrt(0.99);
  mh::FunctionalDataset ds;
  ds.grid = even_grid(2);
  ds.x = mh::Matrix(200, 2);
  ds.labels.resize(200);
  for (std::size_t i = 0; i < 200; ++i) {
    const double sign = (i % 2 == 0) ? -1.0 : 1.0;
    ds.labels[i] = i < 100 ? 0 : 1;
    const double base = ds.labels[i] == 0 ? 0.0 : 1.0;
    ds.x(i, 0) = base + sign * c;
    ds.x(i, 1) = 5.0;  // constant column, equal means -> score 0
  }
  auto curve = mh::t_scores(ds);
  CHECK(curve.measure == mh::Measure::T);
  CHECK(curve.values[0] ==
        doctest::Approx(7.0710678118654755).epsilon(1e-9));  // 1/sqrt(0.02)
  CHECK(curve.values[1] == 0.0);
}

TEST_CASE("zero standard error with distinct means gives the finite sentinel") {
  mh::FunctionalDataset ds;
  ds.grid = even_grid(2);
  ds.x = mh::Matrix(4, 2);
  ds.labels = {0, 0, 1, 1};
  ds.x(0, 0) = ds.x(1, 0) = 2.0;  // constant within each class, means differ
  ds.x(2, 0) = ds.x(3, 0) = 3.0;
  ds.x(0, 1) = -1.0;  // ordinary column so only column 0 is degenerate
  ds.x(1, 1) = 1.0;
  ds.x(2, 1) = -1.0;
  ds.x(3, 1) = 1.0;
  auto curve = mh::t_scores(ds);
  CHECK(curve.values[0] == std::numeric_limits<double>::max());
  CHECK(curve.values[1] == 0.0);
}

TEST_CASE("t scores need two samples per class") {
  mh::FunctionalDataset ds;
  ds.grid = even_grid(2);
  ds.x = mh::Matrix(3, 2, 1.0);
  ds.labels = {0, 0, 1};
  CHECK_THROWS_AS(mh::t_scores(ds), mh::Error);
}

TEST_CASE("t scores are shift and positive-scale invariant") {
  auto ds = random_dataset(30, 5, 91);
  auto base = mh::t_scores(ds).values;

  auto shifted = ds;
  for (std::size_t i = 0; i < shifted.n(); ++i) {
    for (std::size_t j = 0; j < shifted.width(); ++j) shifted.x(i, j) += 13.0;
  }
  auto scaled = ds;
  for (double& v : scaled.x.data) v *= 4.0;

  auto s1 = mh::t_scores(shifted).values;
  auto s2 = mh::t_scores(scaled).values;
  for (std::size_t j = 0; j < base.size(); ++j) {
    CHECK(s1[j] == doctest::Approx(base[j]).epsilon(1e-9));
    CHECK(s2[j] == doctest::Approx(base[j]).epsilon(1e-12));
  }
}

TEST_CASE("t_select takes the top scores, ties to the smaller index") {
  auto ds = unit_se_dataset({0.0, 5.0, 4.0, 0.0});
  auto top2 = mh::t_select(ds, 2);
  CHECK(top2.indices == std::vector<int>{1, 2});
  CHECK(top2.method_id == "T");
  CHECK(top2.hyperparams.at("dim") == 2.0);
  CHECK(top2.scores[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(top2.scores[1] == doctest::Approx(4.0).epsilon(1e-12));

  auto all = mh::t_select(ds, 4);
  CHECK(all.indices == std::vector<int>{1, 2, 0, 3});

  auto tied = mh::t_select(unit_se_dataset({0.0, 5.0, 5.0, 0.0}), 2);
  CHECK(tied.indices == std::vector<int>{1, 2});

  CHECK_THROWS_AS(mh::t_select(ds, 0), mh::Error);
  CHECK_THROWS_AS(mh::t_select(ds, 5), mh::Error);
}

TEST_CASE("mrmr d=1 is the pure relevance argmax, same for D and Q twins") {
  auto ds = unit_se_dataset({1.0, 3.0, 2.0});
  for (auto pair : {std::pair{mh::SelectorMethod::FCD, mh::SelectorMethod::FCQ},
                    std::pair{mh::SelectorMethod::MID, mh::SelectorMethod::MIQ}}) {
    auto d1 = mh::mrmr_select(ds, 1, pair.first);
    auto q1 = mh::mrmr_select(ds, 1, pair.second);
    CHECK(d1.indices == q1.indices);
    CHECK(d1.indices.size() == 1);
  }
  // For the FC family the relevance ranking matches the t ranking.
  auto fcd = mh::mrmr_select(ds, 1, mh::SelectorMethod::FCD);
  CHECK(fcd.indices == std::vector<int>{1});
}

TEST_CASE("redundancy penalty blocks a perfectly correlated duplicate") {
  auto ds = redundancy_dataset();
  for (mh::SelectorMethod variant :
       {mh::SelectorMethod::FCD, mh::SelectorMethod::FCQ, mh::SelectorMethod::MID,
        mh::SelectorMethod::MIQ}) {
    CAPTURE(mh::selector_name(variant));
    auto res = mh::mrmr_select(ds, 2, variant);
    CHECK(res.indices == std::vector<int>{0, 2});
    CHECK(res.method_id == mh::selector_name(variant));
  }
}

TEST_CASE("mrmr outputs d distinct indices and is deterministic") {
  auto ds = random_dataset(40, 12, 17);
  for (mh::SelectorMethod variant :
       {mh::SelectorMethod::FCD, mh::SelectorMethod::FCQ, mh::SelectorMethod::MID,
        mh::SelectorMethod::MIQ}) {
    auto res = mh::mrmr_select(ds, 12, variant);
    REQUIRE(res.indices.size() == 12);
    auto sorted = res.indices;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(sorted.front() >= 0);
    CHECK(sorted.back() <= 11);

    auto again = mh::mrmr_select(ds, 12, variant);
    CHECK(again.indices == res.indices);
    CHECK(again.scores == res.scores);
  }
  CHECK_THROWS_AS(mh::mrmr_select(ds, 0, mh::SelectorMethod::FCD), mh::Error);
  CHECK_THROWS_AS(mh::mrmr_select(ds, 13, mh::SelectorMethod::FCD), mh::Error);
  CHECK_THROWS_AS(mh::mrmr_select(ds, 2, mh::SelectorMethod::PLS), mh::Error);
}

TEST_CASE("first PLS weight is the normalized covariance with the label") {
  auto ds = random_dataset(25, 6, 5);
  auto proj = mh::pls_fit(ds, 1);
  REQUIRE(proj.kind == mh::Projection::Kind::LinearMap);
  REQUIRE(proj.components == 1);

  // Analytic optimum: X_c^T y, unit-normalized.
  std::vector<double> w(ds.width(), 0.0);
  for (std::size_t j = 0; j < ds.width(); ++j) {
    for (std::size_t i = 0; i < ds.n(); ++i) {
      w[j] += (ds.x(i, j) - proj.col_means[j]) * ds.labels[i];
    }
  }
  double norm = 0.0;
  for (double v : w) norm += v * v;
  norm = std::sqrt(norm);
  double cosine = 0.0;
  for (std::size_t j = 0; j < ds.width(); ++j) {
    cosine += (w[j] / norm) * proj.weights(j, 0);
  }
  CHECK(std::fabs(cosine) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("first PLS weight concentrates on a label-copy column") {
  mh::RngStream rng(7, 2);
  mh::FunctionalDataset ds;
  ds.grid = even_grid(6);
  ds.x = mh::Matrix(24, 6);
  ds.labels.resize(24);
  for (std::size_t i = 0; i < 24; ++i) {
    ds.labels[i] = (i % 2 == 0) ? 0 : 1;
    for (std::size_t j = 0; j < 6; ++j) {
      ds.x(i, j) = j == 3 ? static_cast<double>(ds.labels[i]) : 0.2 * rng.normal();
    }
  }
  auto proj = mh::pls_fit(ds, 1);
  std::size_t argmax = 0;
  for (std::size_t j = 1; j < 6; ++j) {
    if (std::fabs(proj.weights(j, 0)) > std::fabs(proj.weights(argmax, 0))) argmax = j;
  }
  CHECK(argmax == 3);
}

TEST_CASE("training scores are mutually orthogonal") {
  auto ds = random_dataset(30, 10, 23);
  auto proj = mh::pls_fit(ds, 4);
  REQUIRE(proj.components >= 2);
  mh::Matrix scores = mh::project(proj, ds);
  for (int a = 0; a < proj.components; ++a) {
    for (int b = a + 1; b < proj.components; ++b) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t i = 0; i < ds.n(); ++i) {
        dot += scores(i, a) * scores(i, b);
        na += scores(i, a) * scores(i, a);
        nb += scores(i, b) * scores(i, b);
      }
      CHECK(std::fabs(dot) <= 1e-8 * std::max(1.0, std::sqrt(na * nb)));
    }
  }
}

TEST_CASE("projecting the fit data reproduces the first score column") {
  auto ds = random_dataset(20, 5, 31);
  auto proj = mh::pls_fit(ds, 2);
  mh::Matrix scores = mh::project(proj, ds);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    double t = 0.0;
    for (std::size_t j = 0; j < ds.width(); ++j) {
      t += (ds.x(i, j) - proj.col_means[j]) * proj.weights(j, 0);
    }
    CHECK(scores(i, 0) == doctest::Approx(t).epsilon(1e-10));
  }
}

TEST_CASE("a perfectly explained response stops the fit early") {
  mh::FunctionalDataset ds;
  ds.grid = even_grid(2);
  ds.x = mh::Matrix(10, 2);
  ds.labels.resize(10);
  for (std::size_t i = 0; i < 10; ++i) {
    ds.labels[i] = (i % 2 == 0) ? 0 : 1;
    ds.x(i, 0) = ds.labels[i];
    ds.x(i, 1) = 2.0 * ds.labels[i];
  }
  auto proj = mh::pls_fit(ds, 2);
  CHECK(proj.components == 1);
  mh::Matrix scores = mh::project(proj, ds);
  CHECK(scores.cols == 1);
}

TEST_CASE("component count is validated against n-1 and width") {
  auto narrow = random_dataset(5, 10, 47);  // min(n-1, width) = 4
  CHECK_THROWS_AS(mh::pls_fit(narrow, 0), mh::Error);
  CHECK_THROWS_AS(mh::pls_fit(narrow, 5), mh::Error);
  CHECK_NOTHROW(mh::pls_fit(narrow, 4));

  mh::FunctionalDataset one_class = narrow;
  std::fill(one_class.labels.begin(), one_class.labels.end(), 1);
  CHECK_THROWS_AS(mh::pls_fit(one_class, 1), mh::Error);
}

TEST_CASE("projection through the centered map turns zeros into constant rows") {
  auto ds = random_dataset(15, 4, 53);
  auto proj = mh::pls_fit(ds, 2);
  mh::FunctionalDataset zeros;
  zeros.grid = ds.grid;
  zeros.x = mh::Matrix(3, 4, 0.0);
  zeros.labels = {0, 1, 0};
  mh::Matrix out = mh::project(proj, zeros);
  for (int c = 0; c < proj.components; ++c) {
    CHECK(out(1, c) == out(0, c));
    CHECK(out(2, c) == out(0, c));
  }
}

TEST_CASE("base projection is the identity gather") {
  auto ds = random_dataset(6, 5, 59);
  auto proj = mh::base_projection(ds.grid);
  CHECK(proj.kind == mh::Projection::Kind::IndexSubset);
  CHECK(proj.indices == std::vector<int>{0, 1, 2, 3, 4});
  mh::Matrix out = mh::project(proj, ds);
  CHECK(out.data == ds.x.data);
}

TEST_CASE("index-subset projection gathers the chosen columns") {
  auto ds = random_dataset(6, 5, 61);
  mh::Projection proj;
  proj.kind = mh::Projection::Kind::IndexSubset;
  proj.fit_grid = ds.grid;
  proj.indices = {2, 0};
  mh::Matrix out = mh::project(proj, ds);
  REQUIRE(out.cols == 2);
  CHECK(out(0, 0) == ds.x(0, 2));
  CHECK(out(3, 1) == ds.x(3, 0));

  mh::FunctionalDataset other = ds;
  other.grid.points[1] += 1e-3;
  CHECK_THROWS_AS(mh::project(proj, other), mh::Error);
}

}  // TEST_SUITE
