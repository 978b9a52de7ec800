// Command-line front end for the maxima-hunting toolkit.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maxhunt/classifiers.hpp"
#include "maxhunt/core.hpp"
#include "maxhunt/dcov.hpp"
#include "maxhunt/harness.hpp"
#include "maxhunt/maxima.hpp"
#include "maxhunt/selectors.hpp"
#include "maxhunt/simulation.hpp"

namespace {

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, double> params;
  for (const std::string& item : raw) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= item.size()) {
      throw mh::ConfigError("--param expects key=value, got: " + item);
    }
    params[item.substr(0, eq)] = mh::parse_double(item.substr(eq + 1));
  }
  return params;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mh::ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mh::Error("cannot write " + path);
  out << content;
  if (!out) throw mh::Error("write failed: " + path);
}

std::string model_list() {
  std::string s;
  for (const std::string& name : mh::model_names()) {
    if (!s.empty()) s += ", ";
    s += name;
  }
  return s;
}

// Builds the index-subset selection one subcommand asked for.
mh::SelectionResult run_selection(const mh::FunctionalDataset& data,
                                  mh::SelectorMethod method, int h, int dim,
                                  int max_vars, const std::string& estimator) {
  switch (method) {
    case mh::SelectorMethod::MHV:
    case mh::SelectorMethod::MHR: {
      const bool v2 = method == mh::SelectorMethod::MHV;
      const mh::Measure measure = v2 ? mh::Measure::V2 : mh::Measure::R2;
      const mh::Estimator est = estimator.empty()
                                    ? (v2 ? mh::Estimator::U : mh::Estimator::DC)
                                    : mh::estimator_from_name(estimator);
      mh::MaximaConfig cfg;
      cfg.h = h;
      cfg.max_vars = max_vars;
      return mh::mh_select(data, measure, est, cfg);
    }
    case mh::SelectorMethod::T:
      return mh::t_select(data, dim);
    case mh::SelectorMethod::FCD:
    case mh::SelectorMethod::FCQ:
    case mh::SelectorMethod::MID:
    case mh::SelectorMethod::MIQ:
      return mh::mrmr_select(data, dim, method);
    case mh::SelectorMethod::BASE: {
      mh::SelectionResult r;
      for (std::size_t j = 0; j < data.width(); ++j) {
        r.indices.push_back(static_cast<int>(j));
        r.scores.push_back(0.0);
      }
      r.method_id = "BASE";
      return r;
    }
    case mh::SelectorMethod::PLS:
      throw mh::ConfigError(
          "PLS builds projections, not variable subsets; use classify or "
          "experiment");
  }
  throw mh::ConfigError("unsupported selector");
}

std::string selection_to_csv(const mh::SelectionResult& sel, const mh::Grid& grid) {
  std::string text = "rank,index,t,score\n";
  for (std::size_t i = 0; i < sel.indices.size(); ++i) {
    text += std::to_string(i + 1) + "," + std::to_string(sel.indices[i]) + "," +
            mh::format_double(grid[static_cast<std::size_t>(sel.indices[i])]) +
            "," + mh::format_double(sel.scores[i]) + "\n";
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    CLI::App app{
        "maxhunt: variable selection for functional-data classification via "
        "distance-covariance maxima hunting"};
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------------
    auto* simulate = app.add_subcommand(
        "simulate", "Draw a labeled sample from a built-in model (CSV out)");
    std::string sim_model, sim_out;
    std::vector<std::string> sim_params;
    std::size_t sim_n = 100;
    std::uint64_t sim_seed = 20260814, sim_stream = 0;
    simulate->add_option("--model", sim_model, "one of: " + model_list())
        ->required();
    simulate->add_option("--param", sim_params,
                         "model parameter key=value (repeatable)");
    simulate->add_option("--n", sim_n, "sample size")->required();
    simulate->add_option("--seed", sim_seed, "master seed");
    simulate->add_option("--stream", sim_stream, "RNG stream index");
    simulate->add_option("--out", sim_out, "output dataset CSV")->required();
    simulate->callback([&] {
      const mh::ModelSpec model = mh::make_model(sim_model, parse_params(sim_params));
      mh::RngStream rng(sim_seed, sim_stream);
      mh::save_dataset(mh::sample_model(model, sim_n, rng), sim_out);
    });

    // ---- curve -------------------------------------------------------------
    auto* curve = app.add_subcommand(
        "curve", "Dependence curve (V2, R2 or t scores) of a dataset (CSV out)");
    std::string curve_data, curve_measure = "V2", curve_estimator, curve_out;
    curve->add_option("--data", curve_data, "dataset CSV")->required();
    curve->add_option("--measure", curve_measure, "V2, R2 or T (default V2)");
    curve->add_option("--estimator", curve_estimator,
                      "U, V or DC (default: U for V2, DC for R2)");
    curve->add_option("--out", curve_out, "output curve CSV")->required();
    curve->callback([&] {
      const mh::FunctionalDataset data = mh::load_dataset(curve_data);
      const mh::Measure measure = mh::measure_from_name(curve_measure);
      mh::DependenceCurve c;
      if (measure == mh::Measure::T) {
        c = mh::t_scores(data);
      } else {
        const bool v2 = measure == mh::Measure::V2;
        const mh::Estimator est =
            curve_estimator.empty()
                ? (v2 ? mh::Estimator::U : mh::Estimator::DC)
                : mh::estimator_from_name(curve_estimator);
        c = mh::dependence_curve(data, measure, est);
      }
      mh::save_curve(c, curve_out);
    });

    // ---- select ------------------------------------------------------------
    auto* select = app.add_subcommand(
        "select", "Run one variable selector on a dataset (CSV to file/stdout)");
    std::string sel_data, sel_method = "MHV", sel_estimator, sel_out;
    int sel_h = 3, sel_dim = 10, sel_max_vars = 20;
    select->add_option("--data", sel_data, "dataset CSV")->required();
    select->add_option("--method", sel_method,
                       "MHV, MHR, T, FCD, FCQ, MID, MIQ or BASE");
    select->add_option("--window", sel_h, "maxima window half-width h (MHV/MHR)");
    select->add_option("--dim", sel_dim, "number of variables (T/mRMR)");
    select->add_option("--max-vars", sel_max_vars, "cap on kept maxima (MHV/MHR)");
    select->add_option("--estimator", sel_estimator,
                       "U, V or DC (default: U for MHV, DC for MHR)");
    select->add_option("--out", sel_out, "output CSV (stdout when omitted)");
    select->callback([&] {
      const mh::FunctionalDataset data = mh::load_dataset(sel_data);
      const mh::SelectionResult sel = run_selection(
          data, mh::selector_from_name(sel_method), sel_h, sel_dim, sel_max_vars,
          sel_estimator);
      const std::string text = selection_to_csv(sel, data.grid);
      if (sel_out.empty()) {
        std::cout << text;
      } else {
        write_text(sel_out, text);
      }
    });

    // ---- classify ----------------------------------------------------------
    auto* classify = app.add_subcommand(
        "classify", "Train one selector+classifier pipeline and score a test set");
    std::string cls_train, cls_test, cls_method = "MHV+KNN", cls_estimator;
    int cls_h = 3, cls_dim = 10, cls_max_vars = 20, cls_k = 5, cls_components = 3;
    classify->add_option("--train", cls_train, "training dataset CSV")->required();
    classify->add_option("--test", cls_test, "test dataset CSV")->required();
    classify->add_option("--method", cls_method,
                         "SELECTOR+CLASSIFIER, e.g. MHV+KNN or PLS+LDA");
    classify->add_option("--window", cls_h, "maxima window half-width h (MHV/MHR)");
    classify->add_option("--dim", cls_dim, "number of variables (T/mRMR)");
    classify->add_option("--max-vars", cls_max_vars, "cap on kept maxima");
    classify->add_option("--components", cls_components, "PLS components");
    classify->add_option("--k", cls_k, "neighbor count (KNN, odd)");
    classify->add_option("--estimator", cls_estimator, "U, V or DC override");
    classify->callback([&] {
      const mh::FunctionalDataset train = mh::load_dataset(cls_train);
      const mh::FunctionalDataset test = mh::load_dataset(cls_test);
      const std::size_t plus = cls_method.find('+');
      if (plus == std::string::npos) {
        throw mh::ConfigError("--method must look like SELECTOR+CLASSIFIER");
      }
      const mh::SelectorMethod selector =
          mh::selector_from_name(cls_method.substr(0, plus));
      const mh::ClassifierKind classifier =
          mh::classifier_from_name(cls_method.substr(plus + 1));
      if (selector == mh::SelectorMethod::BASE &&
          classifier == mh::ClassifierKind::LDA) {
        throw mh::ConfigError("BASE+LDA is not available");
      }

      mh::Projection proj;
      int n_vars = 0;
      if (selector == mh::SelectorMethod::PLS) {
        proj = mh::pls_fit(train, cls_components);
        n_vars = proj.components;
      } else if (selector == mh::SelectorMethod::BASE) {
        proj = mh::base_projection(train.grid);
        n_vars = static_cast<int>(train.width());
      } else {
        const mh::SelectionResult sel = run_selection(
            train, selector, cls_h, cls_dim, cls_max_vars, cls_estimator);
        if (sel.indices.empty()) {
          throw mh::Error("selection kept no variables");
        }
        proj.kind = mh::Projection::Kind::IndexSubset;
        proj.fit_grid = train.grid;
        proj.indices = sel.indices;
        n_vars = static_cast<int>(sel.indices.size());
      }

      const mh::Matrix xtr = mh::project(proj, train);
      const mh::Matrix xte = mh::project(proj, test);
      double acc;
      if (classifier == mh::ClassifierKind::KNN) {
        const mh::KnnModel model = mh::knn_fit(xtr, train.labels, cls_k);
        acc = mh::accuracy(mh::knn_predict(model, xte), test.labels);
      } else {
        const mh::LdaModel model = mh::lda_fit(xtr, train.labels);
        acc = mh::accuracy(mh::lda_predict(model, xte), test.labels);
      }
      std::cout << "method " << cls_method << "\n"
                << "variables " << n_vars << "\n"
                << "accuracy " << mh::format_double(acc) << "\n";
    });

    // ---- experiment --------------------------------------------------------
    auto* experiment = app.add_subcommand(
        "experiment", "Full study from a JSON config (or a previous manifest)");
    std::string exp_config, exp_out_dir = "results";
    std::uint64_t exp_seed = 0;
    int exp_threads = -1;
    bool exp_quiet = false;
    experiment->add_option("--config", exp_config, "config or manifest JSON")
        ->required();
    experiment->add_option("--out-dir", exp_out_dir, "report directory");
    experiment->add_option("--seed", exp_seed, "override the config seed");
    experiment->add_option("--threads", exp_threads,
                           "override worker count (0 = hardware)");
    experiment->add_flag("--quiet", exp_quiet, "suppress the stdout summary");
    experiment->callback([&] {
      mh::ExperimentConfig config = mh::parse_config(read_file(exp_config));
      if (experiment->count("--seed")) config.seed = exp_seed;
      if (exp_threads >= 0) config.threads = exp_threads;
      const mh::ExperimentReport report = mh::run_experiment(config);
      std::vector<mh::RankingTable> rankings;
      if (config.methods.size() >= 2) {
        rankings = mh::rank_report(report.aggregates);
      }
      mh::emit_report(report, rankings, exp_out_dir);
      if (!exp_quiet) {
        std::cout << "model,n,method,mean_accuracy,accuracy_se,mean_n_vars,"
                     "failures\n";
        for (const mh::AggregateRow& row : report.aggregates) {
          std::cout << row.model << "," << row.n << "," << row.method << ","
                    << mh::format_double(row.mean_accuracy) << ","
                    << mh::format_double(row.accuracy_se) << ","
                    << mh::format_double(row.mean_n_vars) << "," << row.failures
                    << "\n";
        }
        std::cout << "report written to " << exp_out_dir << "\n";
      }
    });

    // ---- rank --------------------------------------------------------------
    auto* rank = app.add_subcommand(
        "rank", "Ranking tables (relative, positional, F1) from an aggregate CSV");
    std::string rank_in, rank_out;
    rank->add_option("--aggregate", rank_in, "aggregate CSV")->required();
    rank->add_option("--out", rank_out, "output CSV (stdout when omitted)");
    rank->callback([&] {
      const std::vector<mh::RankingTable> tables =
          mh::rank_report(mh::load_aggregate_csv(rank_in));
      if (rank_out.empty()) {
        for (const mh::RankingTable& table : tables) {
          for (std::size_t i = 0; i < table.methods.size(); ++i) {
            std::cout << mh::criterion_name(table.criterion) << ","
                      << table.methods[i] << ","
                      << mh::format_double(table.scores[i]) << "\n";
          }
        }
      } else {
        mh::save_rankings(tables, rank_out);
      }
    });

    // ---- oracle ------------------------------------------------------------
    auto* oracle = app.add_subcommand(
        "oracle",
        "Analytic dependence curve / Monte-Carlo Bayes error of a model");
    std::string ora_model, ora_curve_out;
    std::vector<std::string> ora_params;
    bool ora_bayes = false;
    std::size_t ora_budget = 1000000;
    std::uint64_t ora_seed = 20260814;
    oracle->add_option("--model", ora_model, "one of: " + model_list())
        ->required();
    oracle->add_option("--param", ora_params,
                       "model parameter key=value (repeatable)");
    oracle->add_option("--curve", ora_curve_out,
                       "write the exact population V2 curve to this CSV");
    oracle->add_flag("--bayes", ora_bayes, "estimate the Bayes error");
    oracle->add_option("--budget", ora_budget, "Monte-Carlo draws for --bayes");
    oracle->add_option("--seed", ora_seed, "seed for --bayes");
    oracle->callback([&] {
      if (ora_curve_out.empty() && !ora_bayes) {
        throw mh::ConfigError("nothing to do: pass --curve and/or --bayes");
      }
      const std::map<std::string, double> params = parse_params(ora_params);
      const mh::ModelSpec model = mh::make_model(ora_model, params);
      if (!ora_curve_out.empty()) {
        mh::AnalyticModel kind;
        double c = 1.0;
        if (ora_model == "random-slope") {
          kind = mh::AnalyticModel::StochasticSlope;
        } else if (ora_model == "drift") {
          kind = mh::AnalyticModel::LinearDrift;
          c = model.class1.trend.c;
        } else {
          throw mh::ConfigError(
              "no analytic curve for this model (random-slope and drift only)");
        }
        std::string text = "t,V2\n";
        for (std::size_t i = 0; i < model.grid.size(); ++i) {
          text += mh::format_double(model.grid[i]) + "," +
                  mh::format_double(
                      mh::analytic_v2_curve(kind, model.grid[i], model.p, c)) +
                  "\n";
        }
        write_text(ora_curve_out, text);
      }
      if (ora_bayes) {
        mh::RngStream rng(ora_seed, 0);
        const mh::BayesErrorEstimate est = mh::bayes_error(model, ora_budget, rng);
        std::cout << "bayes_error " << mh::format_double(est.error) << "\n"
                  << "std_error " << mh::format_double(est.std_error) << "\n";
      }
    });

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      return app.exit(e);
    }
    return 0;
  } catch (const mh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
