#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "maxhunt/classifiers.hpp"
#include "maxhunt/error.hpp"
#include "maxhunt/simulation.hpp"

namespace {

mh::Matrix column(const std::vector<double>& x) {
  mh::Matrix m(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) m(i, 0) = x[i];
  return m;
}

mh::Matrix random_matrix(std::size_t n, std::size_t c, std::uint64_t seed) {
  mh::RngStream rng(seed, 0);
  mh::Matrix m(n, c);
  for (double& v : m.data) v = rng.normal();
  return m;
}

}  // namespace

TEST_SUITE("classifiers") {

TEST_CASE("knn_fit stores inputs and validates k") {
  mh::Matrix x = column({0, 1, 2});
  std::vector<int> y = {0, 1, 1};
  auto model = mh::knn_fit(x, y, 3);
  CHECK(model.train_x.data == x.data);
  CHECK(model.labels == y);
  CHECK(model.k == 3);

  CHECK_THROWS_AS(mh::knn_fit(x, y, 2), mh::Error);   // even
  CHECK_THROWS_AS(mh::knn_fit(x, y, 0), mh::Error);   // too small
  CHECK_THROWS_AS(mh::knn_fit(x, y, 5), mh::Error);   // k > m
  CHECK_THROWS_AS(mh::knn_fit(x, {0, 1}, 1), mh::Error);
  CHECK_THROWS_AS(mh::knn_fit(x, {0, 1, 2}, 1), mh::Error);
}

TEST_CASE("nearest neighbor basics") {
  auto model = mh::knn_fit(column({0, 10}), {0, 1}, 1);
  CHECK(mh::knn_predict(model, column({2})) == std::vector<int>{0});
  CHECK(mh::knn_predict(model, column({9})) == std::vector<int>{1});
  CHECK(mh::knn_predict(model, column({0})) == std::vector<int>{0});
  CHECK(mh::knn_predict(model, column({10})) == std::vector<int>{1});
}

TEST_CASE("k = m predicts the training majority everywhere") {
  auto model = mh::knn_fit(column({0, 1, 2, 3, 4}), {0, 0, 1, 1, 1}, 5);
  auto pred = mh::knn_predict(model, column({-100, 0, 50}));
  CHECK(pred == std::vector<int>{1, 1, 1});
}

TEST_CASE("distance ties go to the smaller training index") {
  // Query is equidistant from both rows; whichever is stored first wins.
  auto a = mh::knn_fit(column({0, 1}), {0, 1}, 1);
  CHECK(mh::knn_predict(a, column({0.5})) == std::vector<int>{0});
  auto b = mh::knn_fit(column({1, 0}), {1, 0}, 1);
  CHECK(mh::knn_predict(b, column({0.5})) == std::vector<int>{1});
}

TEST_CASE("k=3 vote matches a brute-force neighbor sort") {
  const std::vector<double> pts = {0, 1, 2, 3, 4};
  const std::vector<int> labels = {0, 0, 1, 1, 0};
  auto model = mh::knn_fit(column(pts), labels, 3);
  mh::RngStream rng(11, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const double q = 8.0 * rng.uniform() - 2.0;
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      dist.emplace_back(std::fabs(q - pts[i]), i);
    }
    std::sort(dist.begin(), dist.end());
    const int votes = labels[dist[0].second] + labels[dist[1].second] +
                      labels[dist[2].second];
    const int expect = votes >= 2 ? 1 : 0;
    CAPTURE(q);
    CHECK(mh::knn_predict(model, column({q})) == std::vector<int>{expect});
  }
}

TEST_CASE("1-nn is perfect on its own distinct training rows") {
  auto x = random_matrix(25, 3, 101);
  std::vector<int> y(25);
  mh::RngStream rng(102, 0);
  for (std::size_t i = 0; i < 25; ++i) y[i] = rng.uniform() < 0.5 ? 1 : 0;
  auto model = mh::knn_fit(x, y, 1);
  CHECK(mh::accuracy(mh::knn_predict(model, x), y) == 1.0);
}

TEST_CASE("knn is invariant under rotation plus translation") {
  auto x = random_matrix(20, 2, 103);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) y[i] = static_cast<int>(i % 2);
  auto queries = random_matrix(15, 2, 104);
  auto model = mh::knn_fit(x, y, 3);
  auto base = mh::knn_predict(model, queries);

  const double c = std::cos(0.7), s = std::sin(0.7);
  auto rotate = [&](const mh::Matrix& m) {
    mh::Matrix out(m.rows, 2);
    for (std::size_t i = 0; i < m.rows; ++i) {
      out(i, 0) = c * m(i, 0) - s * m(i, 1) + 5.0;
      out(i, 1) = s * m(i, 0) + c * m(i, 1) - 3.0;
    }
    return out;
  };
  auto model2 = mh::knn_fit(rotate(x), y, 3);
  CHECK(mh::knn_predict(model2, rotate(queries)) == base);
}

TEST_CASE("knn predicts batches exactly like single queries") {
  auto x = random_matrix(12, 2, 105);
  std::vector<int> y(12);
  for (std::size_t i = 0; i < 12; ++i) y[i] = static_cast<int>(i % 2);
  auto queries = random_matrix(9, 2, 106);
  auto model = mh::knn_fit(x, y, 3);
  auto batch = mh::knn_predict(model, queries);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    mh::Matrix one(1, 2);
    one(0, 0) = queries(q, 0);
    one(0, 1) = queries(q, 1);
    CHECK(mh::knn_predict(model, one)[0] == batch[q]);
  }
  mh::Matrix wrong(1, 3);
  CHECK_THROWS_AS(mh::knn_predict(model, wrong), mh::Error);
}

TEST_CASE("symmetric 1-D LDA puts the threshold at the midpoint") {
  auto model = mh::lda_fit(column({-2, -1, 1, 2}), {0, 0, 1, 1});
  CHECK(model.log_prior_odds == 0.0);
  // Query at class-1 mean, at the midpoint (tie -> 0), and nearby points.
  CHECK(mh::lda_predict(model, column({1.5})) == std::vector<int>{1});
  CHECK(mh::lda_predict(model, column({0.0})) == std::vector<int>{0});
  CHECK(mh::lda_predict(model, column({-0.05})) == std::vector<int>{0});
  CHECK(mh::lda_predict(model, column({0.05})) == std::vector<int>{1});

  // Scan a fine grid: exactly one label flip, within one step of 0.
  int flips = 0;
  double flip_at = 0.0;
  int prev = -1;
  for (double q = -1.0; q <= 1.0; q += 0.05) {
    const int pred = mh::lda_predict(model, column({q}))[0];
    if (prev >= 0 && pred != prev) {
      ++flips;
      flip_at = q;
    }
    prev = pred;
  }
  CHECK(flips == 1);
  CHECK(std::fabs(flip_at) <= 0.05 + 1e-9);
}

TEST_CASE("identical features across classes yield the majority class") {
  mh::Matrix x(5, 2, 3.0);
  auto model = mh::lda_fit(x, {0, 0, 1, 1, 1});
  auto pred = mh::lda_predict(model, random_matrix(4, 2, 107));
  CHECK(pred == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("prior odds break the tie at the midpoint") {
  auto model = mh::lda_fit(column({-2, -1, 1, 2, 1, 2}), {0, 0, 1, 1, 1, 1});
  CHECK(model.log_prior_odds == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(mh::lda_predict(model, column({0.0})) == std::vector<int>{1});
}

TEST_CASE("2-D direction matches the explicit pooled-covariance solve") {
  // class 0: unit square corners around (0.5, 0.5); class 1: around (3.5, 2.5).
  // Pooled S = I/3, so direction = 3 * (mean1 - mean0) = (9, 6).
  mh::Matrix x(8, 2);
  const double rows[8][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0},
                             {3, 2}, {4, 3}, {3, 3}, {4, 2}};
  for (std::size_t i = 0; i < 8; ++i) {
    x(i, 0) = rows[i][0];
    x(i, 1) = rows[i][1];
  }
  auto model = mh::lda_fit(x, {0, 0, 0, 0, 1, 1, 1, 1});
  CHECK(model.mean0[0] == doctest::Approx(0.5));
  CHECK(model.mean1[1] == doctest::Approx(2.5));
  CHECK(model.direction[0] == doctest::Approx(9.0).epsilon(1e-6));
  CHECK(model.direction[1] == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("lda label batches match single queries and check dimensions") {
  auto x = random_matrix(20, 3, 109);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) y[i] = static_cast<int>(i % 2);
  auto model = mh::lda_fit(x, y);
  auto queries = random_matrix(7, 3, 110);
  auto batch = mh::lda_predict(model, queries);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    mh::Matrix one(1, 3);
    for (std::size_t j = 0; j < 3; ++j) one(0, j) = queries(q, j);
    CHECK(mh::lda_predict(model, one)[0] == batch[q]);
  }
  mh::Matrix wrong(1, 2);
  CHECK_THROWS_AS(mh::lda_predict(model, wrong), mh::Error);
}

TEST_CASE("lda degenerate inputs are rejected") {
  CHECK_THROWS_AS(mh::lda_fit(column({-1, 1, 2}), {0, 1, 1}), mh::Error);
  // Constant features with zero regularization leave a singular covariance.
  mh::Matrix flat(4, 2, 1.0);
  CHECK_THROWS_WITH_AS(mh::lda_fit(flat, {0, 0, 1, 1}, 0.0),
                       doctest::Contains("regularization"), mh::Error);
}

TEST_CASE("lda labels are invariant under invertible affine maps") {
  // Well-separated, well-conditioned data; regularization 0 so the decision
  // is exactly affine-equivariant (no label flips allowed).
  mh::RngStream rng(111, 0);
  mh::Matrix x(40, 2);
  std::vector<int> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    y[i] = static_cast<int>(i % 2);
    x(i, 0) = 4.0 * y[i] + rng.normal();
    x(i, 1) = -2.0 * y[i] + rng.normal();
  }
  auto queries = random_matrix(25, 2, 112);
  for (double& v : queries.data) v *= 3.0;

  auto affine = [](const mh::Matrix& m) {
    mh::Matrix out(m.rows, 2);
    for (std::size_t i = 0; i < m.rows; ++i) {
      out(i, 0) = 2.0 * m(i, 0) + 0.5 * m(i, 1) + 7.0;
      out(i, 1) = -1.0 * m(i, 0) + 3.0 * m(i, 1) - 4.0;
    }
    return out;
  };
  auto base = mh::lda_predict(mh::lda_fit(x, y, 0.0), queries);
  auto mapped = mh::lda_predict(mh::lda_fit(affine(x), y, 0.0), affine(queries));
  CHECK(mapped == base);
}

TEST_CASE("accuracy counts agreements") {
  CHECK(mh::accuracy({0, 1, 1, 0}, {0, 1, 1, 0}) == 1.0);
  CHECK(mh::accuracy({1, 0}, {0, 1}) == 0.0);
  CHECK(mh::accuracy({0, 1, 1, 0}, {0, 1, 0, 0}) == 0.75);
  CHECK_THROWS_AS(mh::accuracy({0, 1}, {0}), mh::Error);
  CHECK_THROWS_AS(mh::accuracy({}, {}), mh::Error);
}

}  // TEST_SUITE
