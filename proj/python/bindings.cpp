// Python bindings: thin wrappers over the C++ library using plain lists and
// dicts, so the module has no array-library dependency.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "maxhunt/classifiers.hpp"
#include "maxhunt/core.hpp"
#include "maxhunt/dcov.hpp"
#include "maxhunt/maxima.hpp"
#include "maxhunt/selectors.hpp"
#include "maxhunt/simulation.hpp"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<double>>;
using Params = std::map<std::string, double>;

Rows rows_of(const mh::Matrix& m) {
  Rows out(m.rows, std::vector<double>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) out[i][j] = m(i, j);
  }
  return out;
}

mh::Matrix matrix_from(const Rows& rows, const char* what) {
  if (rows.empty()) throw mh::Error(std::string(what) + " must not be empty");
  mh::Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) {
      throw mh::Error(std::string(what) + " rows have unequal lengths");
    }
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

mh::FunctionalDataset dataset_from(const std::vector<double>& grid, const Rows& x,
                                   const std::vector<int>& labels) {
  mh::FunctionalDataset ds;
  ds.grid.points = grid;
  ds.x = matrix_from(x, "x");
  ds.labels = labels;
  ds.validate();
  return ds;
}

py::dict dataset_dict(const mh::FunctionalDataset& ds) {
  py::dict out;
  out["grid"] = ds.grid.points;
  out["x"] = rows_of(ds.x);
  out["labels"] = ds.labels;
  return out;
}

py::dict selection_dict(const mh::SelectionResult& sel) {
  py::dict out;
  out["indices"] = sel.indices;
  out["scores"] = sel.scores;
  out["method"] = sel.method_id;
  out["hyperparams"] = sel.hyperparams;
  return out;
}

mh::AnalyticModel analytic_from_name(const std::string& name) {
  if (name == "random-slope") return mh::AnalyticModel::StochasticSlope;
  if (name == "drift") return mh::AnalyticModel::LinearDrift;
  throw mh::ConfigError("no analytic curve for model: " + name);
}

}  // namespace

PYBIND11_MODULE(_maxhunt, m) {
  m.doc() =
      "Maxima-hunting variable selection for binary classification of "
      "functional data: dependence curves, local-maxima selection, reference "
      "selectors and classifiers, and Brownian-family simulation oracles.";
  m.attr("__version__") = "0.1.0";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const mh::ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const mh::Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  // ---- grids and simulation ----
  m.def(
      "default_grid", [] { return mh::default_grid().points; },
      "100 equispaced points (5+i)/105, ending exactly at 1.");
  m.def(
      "bridge_grid", [] { return mh::bridge_grid().points; },
      "100 equispaced points (5+i)/106, stopping short of the bridge's pinned "
      "endpoint.");
  m.def("model_names", &mh::model_names, "Names accepted by sample_model.");
  m.def(
      "sample_model",
      [](const std::string& model, std::size_t n, std::uint64_t seed,
         std::uint64_t stream, const Params& params) {
        mh::RngStream rng(seed, stream);
        return dataset_dict(mh::sample_model(mh::make_model(model, params), n, rng));
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 20260814,
      py::arg("stream") = 0, py::arg("params") = Params{},
      "Draw n labeled trajectories from a named model; deterministic in "
      "(seed, stream). Returns {'grid', 'x', 'labels'}.");

  // ---- dataset files ----
  m.def(
      "load_dataset",
      [](const std::string& path) { return dataset_dict(mh::load_dataset(path)); },
      py::arg("path"), "Read a dataset CSV (header 't,<grid...>,label').");
  m.def(
      "save_dataset",
      [](const std::vector<double>& grid, const Rows& x,
         const std::vector<int>& labels, const std::string& path) {
        mh::save_dataset(dataset_from(grid, x, labels), path);
      },
      py::arg("grid"), py::arg("x"), py::arg("labels"), py::arg("path"),
      "Write a dataset CSV; floats use shortest round-trip formatting.");

  // ---- dependence curves and selection ----
  m.def(
      "dependence_curve",
      [](const std::vector<double>& grid, const Rows& x,
         const std::vector<int>& labels, const std::string& measure,
         const std::string& estimator) {
        const auto curve = mh::dependence_curve(
            dataset_from(grid, x, labels), mh::measure_from_name(measure),
            mh::estimator_from_name(estimator));
        py::dict out;
        out["t"] = curve.grid.points;
        out["values"] = curve.values;
        out["measure"] = mh::measure_name(curve.measure);
        out["estimator"] = mh::estimator_name(curve.estimator);
        return out;
      },
      py::arg("grid"), py::arg("x"), py::arg("labels"), py::arg("measure") = "V2",
      py::arg("estimator") = "U",
      "Pointwise dependence-with-the-label curve t -> measure(X_t, Y).");
  m.def(
      "local_maxima",
      [](const std::vector<double>& grid, const std::vector<double>& values,
         int h) {
        mh::DependenceCurve curve;
        curve.grid.points = grid;
        curve.values = values;
        if (curve.values.size() != curve.grid.size()) {
          throw mh::Error("values length does not match the grid");
        }
        return mh::local_maxima(curve, h);
      },
      py::arg("grid"), py::arg("values"), py::arg("h"),
      "Indices that strictly dominate a +-h window, sorted by value descending.");
  m.def(
      "mh_select",
      [](const std::vector<double>& grid, const Rows& x,
         const std::vector<int>& labels, int h, int max_vars,
         const std::string& measure, const std::string& estimator) {
        mh::MaximaConfig config;
        config.h = h;
        config.max_vars = max_vars;
        return selection_dict(mh::mh_select(
            dataset_from(grid, x, labels), mh::measure_from_name(measure),
            mh::estimator_from_name(estimator), config));
      },
      py::arg("grid"), py::arg("x"), py::arg("labels"), py::arg("h") = 3,
      py::arg("max_vars") = 20, py::arg("measure") = "V2",
      py::arg("estimator") = "U",
      "Maxima hunting: local maxima of the dependence curve, most relevant "
      "first.");
  m.def(
      "t_select",
      [](const std::vector<double>& grid, const Rows& x,
         const std::vector<int>& labels, int dim) {
        return selection_dict(mh::t_select(dataset_from(grid, x, labels), dim));
      },
      py::arg("grid"), py::arg("x"), py::arg("labels"), py::arg("dim"),
      "Top-dim grid indices by two-sample t score.");
  m.def(
      "mrmr_select",
      [](const std::vector<double>& grid, const Rows& x,
         const std::vector<int>& labels, int dim, const std::string& variant) {
        return selection_dict(mh::mrmr_select(dataset_from(grid, x, labels), dim,
                                              mh::selector_from_name(variant)));
      },
      py::arg("grid"), py::arg("x"), py::arg("labels"), py::arg("dim"),
      py::arg("variant") = "FCD",
      "Greedy minimum-redundancy maximum-relevance pick (FCD, FCQ, MID, MIQ).");

  // ---- classifiers ----
  m.def(
      "knn_classify",
      [](const Rows& train_x, const std::vector<int>& train_labels,
         const Rows& test_x, int k) {
        const auto model = mh::knn_fit(matrix_from(train_x, "train_x"),
                                       train_labels, k);
        return mh::knn_predict(model, matrix_from(test_x, "test_x"));
      },
      py::arg("train_x"), py::arg("train_labels"), py::arg("test_x"),
      py::arg("k") = 3,
      "k-nearest-neighbor labels for the test rows (k odd; distance ties go "
      "to the earlier training row).");
  m.def(
      "lda_classify",
      [](const Rows& train_x, const std::vector<int>& train_labels,
         const Rows& test_x, double regularization) {
        const auto model = mh::lda_fit(matrix_from(train_x, "train_x"),
                                       train_labels, regularization);
        return mh::lda_predict(model, matrix_from(test_x, "test_x"));
      },
      py::arg("train_x"), py::arg("train_labels"), py::arg("test_x"),
      py::arg("regularization") = 1e-8,
      "Fisher linear discriminant labels with pooled covariance and empirical "
      "priors.");
  m.def("accuracy", &mh::accuracy, py::arg("predicted"), py::arg("truth"),
        "Fraction of agreeing positions.");

  // ---- analytic oracles ----
  m.def(
      "analytic_v2_curve",
      [](const std::string& model, double t, double p, double c) {
        return mh::analytic_v2_curve(analytic_from_name(model), t, p, c);
      },
      py::arg("model"), py::arg("t"), py::arg("p") = 0.5, py::arg("c") = 1.0,
      "Population squared-distance-covariance curve for 'random-slope' or "
      "'drift'.");
  m.def(
      "bayes_error",
      [](const std::string& model, std::size_t budget, std::uint64_t seed,
         std::uint64_t stream, const Params& params) {
        mh::RngStream rng(seed, stream);
        const auto est =
            mh::bayes_error(mh::make_model(model, params), budget, rng);
        py::dict out;
        out["error"] = est.error;
        out["std_error"] = est.std_error;
        return out;
      },
      py::arg("model"), py::arg("budget") = 100000, py::arg("seed") = 20260814,
      py::arg("stream") = 0, py::arg("params") = Params{},
      "Monte-Carlo Bayes error of a named model (models with a known optimal "
      "rule only).");
}
