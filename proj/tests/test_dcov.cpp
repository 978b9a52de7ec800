#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "maxhunt/dcov.hpp"
#include "maxhunt/error.hpp"
#include "maxhunt/simulation.hpp"

namespace {

mh::MarginalSample column_sample(const std::vector<double>& x,
                                 const std::vector<int>& labels) {
  mh::MarginalSample s;
  s.values = mh::Matrix(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) s.values(i, 0) = x[i];
  s.labels = labels;
  return s;
}

mh::Matrix column(const std::vector<double>& x) {
  mh::Matrix m(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) m(i, 0) = x[i];
  return m;
}

mh::Matrix label_column(const std::vector<int>& labels) {
  mh::Matrix m(labels.size(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) m(i, 0) = labels[i];
  return m;
}

mh::MarginalSample random_sample(mh::RngStream& rng, std::size_t n, std::size_t d) {
  mh::MarginalSample s;
  s.values = mh::Matrix(n, d);
  s.labels.resize(n);
  // Guarantee two rows of each class so every estimator is defined.
  for (std::size_t i = 0; i < n; ++i) {
    s.labels[i] = (i < 2) ? 0 : (i < 4) ? 1 : (rng.uniform() < 0.5 ? 1 : 0);
    for (std::size_t j = 0; j < d; ++j) s.values(i, j) = rng.normal();
  }
  return s;
}

}  // namespace

TEST_SUITE("dcov") {

TEST_CASE("u-statistic hand values") {
  // Separated classes: I00 = I11 = 0, I01 = 1 -> 4 p^2 (1-p)^2 * 1 = 0.25.
  auto sep = column_sample({0, 0, 1, 1}, {0, 0, 1, 1});
  CHECK(mh::dcov_sq_u(sep) == doctest::Approx(0.25).epsilon(1e-12));

  // Interleaved classes go negative at this n: 0.25 * (1.5 - 2) = -0.125.
  auto mix = column_sample({0, 2, 1, 3}, {0, 0, 1, 1});
  CHECK(mh::dcov_sq_u(mix) == doctest::Approx(-0.125).epsilon(1e-12));

  auto flat = column_sample({5, 5, 5, 5}, {0, 0, 1, 1});
  CHECK(mh::dcov_sq_u(flat) == 0.0);

  auto degenerate = column_sample({0, 1, 2}, {0, 1, 1});
  CHECK_THROWS_AS(mh::dcov_sq_u(degenerate), mh::Error);
  auto one_class = column_sample({0, 1, 2, 3}, {1, 1, 1, 1});
  CHECK_THROWS_AS(mh::dcov_sq_u(one_class), mh::Error);
}

TEST_CASE("v-statistic hand values") {
  auto sep = column_sample({0, 0, 1, 1}, {0, 0, 1, 1});
  CHECK(mh::dcov_sq_v(sep) == doctest::Approx(0.25).epsilon(1e-12));

  // Same sample where the u-statistic gives -0.125; the plug-in differs.
  auto mix = column_sample({0, 2, 1, 3}, {0, 0, 1, 1});
  CHECK(mh::dcov_sq_v(mix) == doctest::Approx(0.125).epsilon(1e-12));

  auto flat = column_sample({5, 5, 5, 5}, {0, 0, 1, 1});
  CHECK(mh::dcov_sq_v(flat) == 0.0);

  auto tiny = column_sample({1}, {1});
  CHECK_THROWS_AS(mh::dcov_sq_v(tiny), mh::Error);
}

TEST_CASE("double-centered form hand values") {
  CHECK(mh::dcov_sq_dc(column({1, 2, 3, 4}), column({7, 7, 7, 7})) == 0.0);
  CHECK(mh::dcov_sq_dc(column({0, 1}), column({0, 1})) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(mh::dcov_sq_dc(column({1}), column({1})), mh::Error);
}

TEST_CASE("distance variance basics") {
  CHECK(mh::dvar_sq(column({3, 3, 3})) == 0.0);
  CHECK(mh::dvar_sq(column({0, 1})) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(mh::dvar_sq(column({-4, 1, 0, 2, 7})) >= 0.0);
}

TEST_CASE("binary distance variance equals 4 p^2 (1-p)^2") {
  const std::size_t n = 10;
  for (std::size_t ones = 1; ones < n; ++ones) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < ones; ++i) y[i] = 1.0;
    const double p = static_cast<double>(ones) / n;
    const double expect = 4.0 * p * p * (1.0 - p) * (1.0 - p);
    CAPTURE(ones);
    CHECK(mh::dvar_sq(column(y)) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("distance correlation hand values and guards") {
  auto sep = column_sample({0, 0, 1, 1}, {0, 0, 1, 1});
  CHECK(mh::dcor_sq(sep) == doctest::Approx(1.0).epsilon(1e-12));

  auto flat = column_sample({5, 5, 5, 5}, {0, 0, 1, 1});
  CHECK(mh::dcor_sq(flat) == 0.0);  // zero denominator is a defined value

  auto half = column_sample({0, 0, 0, 1}, {0, 0, 1, 1});
  const double r2 = mh::dcor_sq(half);
  CHECK(r2 > 0.0);
  CHECK(r2 <= 1.0 + 1e-12);
}

TEST_CASE("dc equals v on binary labels across random samples") {
  mh::RngStream rng(77, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 4 + rng.next_u64() % 36;
    const std::size_t d = 1 + rng.next_u64() % 3;
    auto s = random_sample(rng, n, d);
    const double v = mh::dcov_sq_v(s);
    const double dc = mh::dcov_sq_dc(s.values, label_column(s.labels));
    CAPTURE(rep);
    CHECK(std::fabs(dc - v) <= 1e-12);
  }
}

TEST_CASE("scaling, translation and permutation behave as the metric dictates") {
  mh::RngStream rng(123, 1);
  auto s = random_sample(rng, 25, 2);
  const double u = mh::dcov_sq_u(s);
  const double v = mh::dcov_sq_v(s);
  const double r = mh::dcor_sq(s);

  const double scale = 3.5;
  mh::MarginalSample scaled = s;
  for (double& x : scaled.values.data) x *= scale;
  CHECK(mh::dcov_sq_u(scaled) == doctest::Approx(scale * u).epsilon(1e-10));
  CHECK(mh::dcov_sq_v(scaled) == doctest::Approx(scale * v).epsilon(1e-10));
  CHECK(mh::dcor_sq(scaled) == doctest::Approx(r).epsilon(1e-10));

  mh::MarginalSample shifted = s;
  for (std::size_t i = 0; i < shifted.values.rows; ++i) {
    shifted.values(i, 0) += 41.0;
    shifted.values(i, 1) -= 17.0;
  }
  CHECK(mh::dcov_sq_u(shifted) == doctest::Approx(u).epsilon(1e-9));
  CHECK(mh::dcov_sq_v(shifted) == doctest::Approx(v).epsilon(1e-9));

  mh::MarginalSample perm = s;
  std::vector<std::size_t> order(s.values.rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
  for (std::size_t i = 0; i < order.size(); ++i) {
    perm.labels[i] = s.labels[order[i]];
    perm.values(i, 0) = s.values(order[i], 0);
    perm.values(i, 1) = s.values(order[i], 1);
  }
  CHECK(mh::dcov_sq_u(perm) == doctest::Approx(u).epsilon(1e-10));
  CHECK(mh::dcov_sq_v(perm) == doctest::Approx(v).epsilon(1e-10));
}

TEST_CASE("u and v forms approach each other as n grows") {
  auto median_gap = [](std::size_t n) {
    std::vector<double> gaps;
    for (int rep = 0; rep < 21; ++rep) {
      mh::RngStream rng(500 + rep, n);
      auto s = random_sample(rng, n, 1);
      gaps.push_back(std::fabs(mh::dcov_sq_u(s) - mh::dcov_sq_v(s)));
    }
    std::sort(gaps.begin(), gaps.end());
    return gaps[gaps.size() / 2];
  };
  const double g50 = median_gap(50);
  const double g400 = median_gap(400);
  CHECK(g400 < g50);
  CHECK(g400 < 0.01);
}

TEST_CASE("dependence_curve matches pointwise estimator calls") {
  mh::RngStream rng(9, 4);
  mh::FunctionalDataset ds;
  ds.grid.points = {0.2, 0.4, 0.6, 0.8};
  ds.x = mh::Matrix(12, 4);
  ds.labels.resize(12);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    ds.labels[i] = (i < 2) ? 0 : (i < 4) ? 1 : (rng.uniform() < 0.5);
    for (std::size_t j = 0; j < 4; ++j) ds.x(i, j) = rng.normal();
  }

  for (mh::Estimator est : {mh::Estimator::U, mh::Estimator::V, mh::Estimator::DC}) {
    auto curve = mh::dependence_curve(ds, mh::Measure::V2, est);
    REQUIRE(curve.values.size() == ds.width());
    CHECK(curve.measure == mh::Measure::V2);
    CHECK(curve.estimator == est);
    for (std::size_t j = 0; j < ds.width(); ++j) {
      mh::MarginalSample s;
      s.values = mh::gather_columns(ds.x, {static_cast<int>(j)});
      s.labels = ds.labels;
      double expect = 0.0;
      switch (est) {
        case mh::Estimator::U: expect = mh::dcov_sq_u(s); break;
        case mh::Estimator::V: expect = mh::dcov_sq_v(s); break;
        case mh::Estimator::DC:
          expect = mh::dcov_sq_dc(s.values, label_column(s.labels));
          break;
      }
      CHECK(curve.values[j] == expect);
    }
  }

  auto r2 = mh::dependence_curve(ds, mh::Measure::R2, mh::Estimator::DC);
  for (double v : r2.values) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("constant-per-class trajectories give a flat curve") {
  mh::FunctionalDataset ds;
  ds.grid.points = {0.1, 0.5, 0.9};
  ds.x = mh::Matrix(6, 3);
  ds.labels = {0, 0, 0, 1, 1, 1};
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 3; ++j) ds.x(i, j) = ds.labels[i] ? 2.0 : -1.0;
  }
  auto curve = mh::dependence_curve(ds, mh::Measure::V2, mh::Estimator::U);
  for (double v : curve.values) CHECK(v == doctest::Approx(curve.values[0]).epsilon(1e-12));
  CHECK(curve.values[0] > 0.0);
}

TEST_CASE("shuffled labels give a near-zero curve") {
  mh::RngStream rng(2026, 7);
  const std::size_t n = 200;
  mh::Grid grid = mh::default_grid();
  mh::FunctionalDataset ds;
  ds.grid = grid;
  ds.x = mh::Matrix(n, grid.size());
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = (i < 2) ? 0 : (i < 4) ? 1 : (rng.uniform() < 0.5);
    auto path = mh::sample_brownian(grid, rng);
    std::copy(path.begin(), path.end(), ds.x.row(i));
  }
  auto curve = mh::dependence_curve(ds, mh::Measure::V2, mh::Estimator::U);
  const double peak = *std::max_element(curve.values.begin(), curve.values.end());
  CHECK(peak < 0.02);  // independence: the whole curve hovers near zero
}

TEST_CASE("name mappings round-trip and reject junk") {
  using namespace mh;
  CHECK(measure_name(Measure::V2) == "V2");
  CHECK(measure_name(Measure::R2) == "R2");
  CHECK(measure_name(Measure::T) == "T");
  CHECK(measure_from_name("v2") == Measure::V2);
  CHECK(measure_from_name("R2") == Measure::R2);
  CHECK_THROWS_AS(measure_from_name("W2"), ConfigError);

  CHECK(estimator_name(Estimator::DC) == "DC");
  CHECK(estimator_from_name("u") == Estimator::U);
  CHECK(estimator_from_name("DC") == Estimator::DC);
  CHECK_THROWS_AS(estimator_from_name("Z"), ConfigError);
}

TEST_CASE("curve CSV has the measure/estimator header") {
  mh::DependenceCurve curve;
  curve.grid.points = {0.25, 0.75};
  curve.values = {0.5, -0.125};
  curve.measure = mh::Measure::V2;
  curve.estimator = mh::Estimator::U;
  const std::string path =
      (std::filesystem::temp_directory_path() / "mh_dcov_curve.csv").string();
  mh::save_curve(curve, path);
  std::ifstream in(path);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  CHECK(l1 == "t,V2_U");
  CHECK(l2 == "0.25,0.5");
  CHECK(l3 == "0.75,-0.125");
  std::remove(path.c_str());
}

}  // TEST_SUITE
