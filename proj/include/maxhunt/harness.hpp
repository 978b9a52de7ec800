#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxhunt/classifiers.hpp"
#include "maxhunt/core.hpp"
#include "maxhunt/selectors.hpp"
#include "maxhunt/simulation.hpp"

namespace mh {

enum class ClassifierKind { KNN, LDA };

std::string classifier_name(ClassifierKind kind);
ClassifierKind classifier_from_name(const std::string& name);

// One pipeline under comparison: a variable selector plus a classifier.
struct MethodSpec {
  SelectorMethod selector = SelectorMethod::MHV;
  ClassifierKind classifier = ClassifierKind::KNN;
  std::string label() const;  // e.g. "MHV+KNN"
};

// Hyperparameter search grids. Each method only consults the grids that
// apply to it: k for any KNN pipeline, h for maxima hunting (the number of
// kept variables then follows from the curve, capped at max(dims)), dims for
// the ranking selectors (T, mRMR), components for PLS. BASE has none.
struct Grids {
  std::vector<int> k_values;
  std::vector<int> dims;
  std::vector<int> h_values;
  std::vector<int> components;
};

Grids default_grids();  // k {1,3,5,7,9,11}, dims 1..20, h {1,2,3,5,8,12}, comps 1..10

struct CvScheme {
  enum class Kind { LeaveOneOut, KFold };
  Kind kind = Kind::LeaveOneOut;
  int folds = 10;  // KFold only
};

// Full description of a study. Exactly one of model_name / dataset_path is
// set: a model name runs the simulation protocol (independent train /
// validation / test samples per replication); a dataset path runs nested
// cross-validation on real data.
struct ExperimentConfig {
  std::string name = "run";
  std::string model_name;
  std::map<std::string, double> model_params;
  std::optional<ModelSpec> model;  // hand-built model, overrides model_name
  std::string dataset_path;
  std::vector<std::size_t> train_sizes = {30, 50, 100, 200};
  int replications = 100;
  std::size_t validation_size = 200;
  std::size_t test_size = 200;
  CvScheme cv;
  std::vector<MethodSpec> methods;
  Grids grids = default_grids();
  std::uint64_t seed = 20260814;
  std::uint64_t replication_offset = 0;  // first replication's stream index
  int threads = 1;                       // 0 = one per hardware thread

  bool simulation_mode() const { return model.has_value() || !model_name.empty(); }
  void validate() const;  // throws ConfigError
};

// Parses a JSON config (or a run manifest, whose "config" object is used).
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

// Winning hyperparameters; -1 marks values the method does not use.
struct HyperChoice {
  int k = -1;
  int h = -1;
  int dim = -1;
  int components = -1;
};

struct ReplicationRow {
  std::string model;
  std::size_t n = 0;
  std::string method;
  std::uint64_t replication = 0;
  bool ok = false;
  double accuracy = 0.0;
  int n_vars = 0;
  HyperChoice hyper;
  std::string error;
};

struct AggregateRow {
  std::string model;
  std::size_t n = 0;
  std::string method;
  int replications_used = 0;
  int failures = 0;
  double mean_accuracy = 0.0;
  double accuracy_se = 0.0;
  double mean_n_vars = 0.0;
  HyperChoice modal;  // most frequent value, ties toward the smaller one
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReplicationRow> rows;
  std::vector<AggregateRow> aggregates;
};

// Runs the whole study. Deterministic in (config, seed): replication r at
// train-size index i always consumes stream (i << 32) | (offset + r),
// drawing train, validation, test in that order, whatever the thread count.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct ValidationOutcome {
  HyperChoice hyper;
  double validation_accuracy = 0.0;
  int n_vars = 0;
};

// Exhaustive grid search maximizing validation accuracy; ties prefer fewer
// variables, then smaller k, h, dim, components, in that order.
ValidationOutcome validate_hyperparams(const MethodSpec& method, const Grids& grids,
                                       const FunctionalDataset& train,
                                       const FunctionalDataset& validation);

// Class-stratified fold assignment (deterministic in seed). Leave-one-out
// yields n singleton folds in index order.
std::vector<std::vector<std::size_t>> make_folds(const std::vector<int>& labels,
                                                 const CvScheme& scheme,
                                                 std::uint64_t seed);

struct CvResult {
  double accuracy = 0.0;  // mean over completed outer folds
  int folds_used = 0;
  int fold_failures = 0;
  double mean_n_vars = 0.0;
  HyperChoice modal;
  std::vector<ReplicationRow> fold_rows;  // one per outer fold
};

// Nested cross-validation: the outer loop estimates accuracy; an inner loop
// with the same scheme, run within each outer training set, picks the
// hyperparameters used for that fold.
CvResult cross_validate(const FunctionalDataset& dataset, const MethodSpec& method,
                        const CvScheme& scheme, const Grids& grids,
                        std::uint64_t seed);

enum class RankCriterion { Relative, Positional, F1 };

std::string criterion_name(RankCriterion criterion);

struct RankingTable {
  RankCriterion criterion = RankCriterion::Relative;
  std::vector<std::string> methods;
  std::vector<double> scores;  // mean over experiments
};

// Scores one experiment's accuracies. Relative: affine map onto [0,10]
// (all-equal row: everyone 10). Positional: 10, 9, 8, ... by descending
// accuracy. F1: 25, 18, 15, 10, 8, 6, 4 (0 beyond seventh place). Ties share
// the mean of the points they span.
std::vector<double> rank_row(const std::vector<double>& accuracies,
                             RankCriterion criterion);

RankingTable rank_methods(const std::vector<std::vector<double>>& accuracy_rows,
                          const std::vector<std::string>& methods,
                          RankCriterion criterion);

// Builds all three ranking tables from aggregate rows, treating each
// (model, n) pair as one experiment. Every experiment must cover the same
// method set.
std::vector<RankingTable> rank_report(const std::vector<AggregateRow>& aggregates);

// Writes aggregate.csv, raw.csv, variable_counts.csv, ranking.csv (when
// rankings are given), and manifest.json into out_dir.
void emit_report(const ExperimentReport& report,
                 const std::vector<RankingTable>& rankings,
                 const std::string& out_dir);

std::vector<AggregateRow> load_aggregate_csv(const std::string& path);
void save_rankings(const std::vector<RankingTable>& rankings,
                   const std::string& path);

}  // namespace mh
