#include "maxhunt/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <thread>
#include <utility>

#include "json.hpp"
#include "maxhunt/dcov.hpp"
#include "maxhunt/maxima.hpp"

namespace mh {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string opt_int(int v) { return v < 0 ? std::string() : std::to_string(v); }

int parse_opt_int(const std::string& s) {
  return s.empty() ? -1 : static_cast<int>(parse_double(s));
}

// ---------------------------------------------------------------------------
// Candidate machinery: everything one selector can offer for one training set

// One fitted dimension reduction plus the grid value that produced it.
struct Candidate {
  Projection proj;
  int n_vars = 0;
  int h = -1, dim = -1, components = -1;
};

std::vector<Candidate> build_candidates(SelectorMethod selector,
                                        const FunctionalDataset& train,
                                        const Grids& grids) {
  std::vector<Candidate> out;
  const int width = static_cast<int>(train.width());
  const int max_dim =
      std::min(width, *std::max_element(grids.dims.begin(), grids.dims.end()));

  auto subset_candidate = [&](std::vector<int> indices, int h, int dim) {
    Candidate c;
    c.proj.kind = Projection::Kind::IndexSubset;
    c.proj.fit_grid = train.grid;
    c.proj.indices = std::move(indices);
    c.n_vars = static_cast<int>(c.proj.indices.size());
    c.h = h;
    c.dim = dim;
    return c;
  };

  switch (selector) {
    case SelectorMethod::MHV:
    case SelectorMethod::MHR: {
      // One curve, one maxima scan per window width; the variable count is
      // whatever the curve offers, capped at the largest dimension allowed.
      const bool v2 = selector == SelectorMethod::MHV;
      const DependenceCurve curve =
          dependence_curve(train, v2 ? Measure::V2 : Measure::R2,
                           v2 ? Estimator::U : Estimator::DC);
      for (int h : grids.h_values) {
        if (h < 1 || h >= width) continue;
        std::vector<int> maxima = local_maxima(curve, h);
        if (maxima.empty()) continue;
        if (maxima.size() > static_cast<std::size_t>(max_dim)) {
          maxima.resize(max_dim);
        }
        out.push_back(subset_candidate(std::move(maxima), h, -1));
      }
      break;
    }
    case SelectorMethod::T:
    case SelectorMethod::FCD:
    case SelectorMethod::FCQ:
    case SelectorMethod::MID:
    case SelectorMethod::MIQ: {
      // Rank once at the largest dimension; smaller dimensions are prefixes.
      const SelectionResult full =
          selector == SelectorMethod::T
              ? t_select(train, max_dim)
              : mrmr_select(train, max_dim, selector);
      std::vector<int> seen;
      for (int dim : grids.dims) {
        const int d = std::min<int>(dim, static_cast<int>(full.indices.size()));
        if (d < 1 || std::count(seen.begin(), seen.end(), d)) continue;
        seen.push_back(d);
        out.push_back(subset_candidate(
            std::vector<int>(full.indices.begin(), full.indices.begin() + d),
            -1, d));
      }
      break;
    }
    case SelectorMethod::PLS: {
      const int cap = std::min<int>(
          {*std::max_element(grids.components.begin(), grids.components.end()),
           width, static_cast<int>(train.n()) - 1});
      if (cap < 1) break;
      const Projection full = pls_fit(train, cap);
      std::vector<int> seen;
      for (int comps : grids.components) {
        const int c = std::min(comps, full.components);
        if (c < 1 || std::count(seen.begin(), seen.end(), c)) continue;
        seen.push_back(c);
        Candidate cand;
        cand.proj = full;
        cand.proj.components = c;
        cand.n_vars = c;
        cand.components = c;
        out.push_back(std::move(cand));
      }
      break;
    }
    case SelectorMethod::BASE: {
      Candidate c;
      c.proj = base_projection(train.grid);
      c.n_vars = width;
      out.push_back(std::move(c));
      break;
    }
  }
  return out;
}

// k values a KNN fit can accept for this training size.
std::vector<int> admissible_ks(const std::vector<int>& k_values, std::size_t m) {
  std::vector<int> ks;
  for (int k : k_values) {
    if (k >= 1 && k % 2 == 1 && static_cast<std::size_t>(k) <= m) ks.push_back(k);
  }
  return ks;
}

// Accuracy for every k in one pass: one neighbor sort per query, then label
// counts over growing prefixes. Ties in distance go to the smaller training
// index, matching knn_predict.
std::vector<double> knn_sweep(const Matrix& train_x, const std::vector<int>& train_y,
                              const Matrix& query_x, const std::vector<int>& query_y,
                              const std::vector<int>& ks) {
  const std::size_t m = train_x.rows;
  const std::size_t q = query_x.rows;
  const std::size_t kmax =
      static_cast<std::size_t>(*std::max_element(ks.begin(), ks.end()));
  std::vector<int> correct(ks.size(), 0);
  std::vector<std::pair<double, std::size_t>> dist(m);
  std::vector<int> ones(kmax + 1, 0);
  for (std::size_t i = 0; i < q; ++i) {
    const double* xi = query_x.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double* xj = train_x.row(j);
      double d2 = 0.0;
      for (std::size_t c = 0; c < train_x.cols; ++c) {
        const double diff = xi[c] - xj[c];
        d2 += diff * diff;
      }
      dist[j] = {d2, j};
    }
    std::partial_sort(dist.begin(), dist.begin() + kmax, dist.end());
    for (std::size_t r = 0; r < kmax; ++r) {
      ones[r + 1] = ones[r] + train_y[dist[r].second];
    }
    for (std::size_t t = 0; t < ks.size(); ++t) {
      const int k = ks[t];
      const int label = 2 * ones[k] > k ? 1 : 0;
      correct[t] += label == query_y[i] ? 1 : 0;
    }
  }
  std::vector<double> acc(ks.size());
  for (std::size_t t = 0; t < ks.size(); ++t) {
    acc[t] = static_cast<double>(correct[t]) / static_cast<double>(q);
  }
  return acc;
}

// A scored hyperparameter combination. Ordering: higher accuracy, then fewer
// variables, then smaller k, h, dim, components.
struct Choice {
  bool valid = false;
  double acc = -1.0;
  double n_vars = 0.0;
  HyperChoice hp;
  const Candidate* winner = nullptr;
};

bool better(const Choice& a, const Choice& b) {
  if (a.valid != b.valid) return a.valid;
  if (a.acc != b.acc) return a.acc > b.acc;
  if (a.n_vars != b.n_vars) return a.n_vars < b.n_vars;
  if (a.hp.k != b.hp.k) return a.hp.k < b.hp.k;
  if (a.hp.h != b.hp.h) return a.hp.h < b.hp.h;
  if (a.hp.dim != b.hp.dim) return a.hp.dim < b.hp.dim;
  return a.hp.components < b.hp.components;
}

HyperChoice candidate_hyper(const Candidate& cand, int k) {
  HyperChoice hp;
  hp.k = k;
  hp.h = cand.h;
  hp.dim = cand.dim;
  hp.components = cand.components;
  return hp;
}

// Grid search over candidates x k on a held-out validation set.
Choice evaluate_candidates(const std::vector<Candidate>& candidates,
                           ClassifierKind classifier, const Grids& grids,
                           const FunctionalDataset& train,
                           const FunctionalDataset& validation) {
  Choice best;
  const std::vector<int> ks =
      classifier == ClassifierKind::KNN ? admissible_ks(grids.k_values, train.n())
                                        : std::vector<int>();
  if (classifier == ClassifierKind::KNN && ks.empty()) {
    throw Error("no admissible k: the grid needs an odd k <= the training size");
  }
  for (const Candidate& cand : candidates) {
    try {
      const Matrix xtr = project(cand.proj, train);
      const Matrix xv = project(cand.proj, validation);
      if (classifier == ClassifierKind::KNN) {
        const std::vector<double> accs =
            knn_sweep(xtr, train.labels, xv, validation.labels, ks);
        for (std::size_t t = 0; t < ks.size(); ++t) {
          Choice c{true, accs[t], static_cast<double>(cand.n_vars),
                   candidate_hyper(cand, ks[t]), &cand};
          if (better(c, best)) best = c;
        }
      } else {
        const LdaModel lda = lda_fit(xtr, train.labels);
        const std::vector<int> pred = lda_predict(lda, xv);
        Choice c{true, accuracy(pred, validation.labels),
                 static_cast<double>(cand.n_vars), candidate_hyper(cand, -1),
                 &cand};
        if (better(c, best)) best = c;
      }
    } catch (const Error&) {
      // A candidate that cannot be fit (e.g. singular LDA) just drops out.
    }
  }
  if (!best.valid) throw Error("every hyperparameter candidate failed");
  return best;
}

double score_fold(const Candidate& cand, ClassifierKind classifier, int k,
                  const FunctionalDataset& train, const FunctionalDataset& test) {
  const Matrix xtr = project(cand.proj, train);
  const Matrix xte = project(cand.proj, test);
  if (classifier == ClassifierKind::KNN) {
    const KnnModel model = knn_fit(xtr, train.labels, k);
    return accuracy(knn_predict(model, xte), test.labels);
  }
  const LdaModel model = lda_fit(xtr, train.labels);
  return accuracy(lda_predict(model, xte), test.labels);
}

// ---------------------------------------------------------------------------
// Aggregation

int modal_value(const std::vector<int>& values) {
  std::map<int, int> counts;
  for (int v : values) {
    if (v >= 0) ++counts[v];
  }
  int best = -1, best_count = 0;
  for (const auto& [value, count] : counts) {
    if (count > best_count) {  // map order resolves ties toward smaller value
      best = value;
      best_count = count;
    }
  }
  return best;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ReplicationRow>& rows) {
  // Group in first-appearance order of (model, n, method).
  std::vector<AggregateRow> aggregates;
  std::map<std::array<std::string, 3>, std::size_t> index;
  for (const ReplicationRow& row : rows) {
    const std::array<std::string, 3> key = {row.model, std::to_string(row.n),
                                            row.method};
    if (!index.count(key)) {
      index[key] = aggregates.size();
      AggregateRow agg;
      agg.model = row.model;
      agg.n = row.n;
      agg.method = row.method;
      aggregates.push_back(agg);
    }
  }
  for (std::size_t g = 0; g < aggregates.size(); ++g) {
    AggregateRow& agg = aggregates[g];
    double sum = 0.0, sumsq = 0.0, vars = 0.0;
    std::vector<int> ks, hs, dims, comps;
    for (const ReplicationRow& row : rows) {
      if (row.model != agg.model || row.n != agg.n || row.method != agg.method) {
        continue;
      }
      if (!row.ok) {
        ++agg.failures;
        continue;
      }
      ++agg.replications_used;
      sum += row.accuracy;
      sumsq += row.accuracy * row.accuracy;
      vars += row.n_vars;
      ks.push_back(row.hyper.k);
      hs.push_back(row.hyper.h);
      dims.push_back(row.hyper.dim);
      comps.push_back(row.hyper.components);
    }
    const int used = agg.replications_used;
    if (used > 0) {
      agg.mean_accuracy = sum / used;
      agg.mean_n_vars = vars / used;
      if (used > 1) {
        const double var = (sumsq - sum * sum / used) / (used - 1);
        agg.accuracy_se = std::sqrt(std::max(var, 0.0) / used);
      }
      agg.modal.k = modal_value(ks);
      agg.modal.h = modal_value(hs);
      agg.modal.dim = modal_value(dims);
      agg.modal.components = modal_value(comps);
    }
  }
  return aggregates;
}

// ---------------------------------------------------------------------------
// Simulation protocol

ExperimentReport run_simulation(const ExperimentConfig& config) {
  const ModelSpec model = config.model ? *config.model
                                       : make_model(config.model_name,
                                                    config.model_params);
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t slots = config.train_sizes.size() * reps;
  std::vector<std::vector<ReplicationRow>> results(slots);

  auto run_slot = [&](std::size_t slot) {
    const std::size_t ni_index = slot / reps;
    const std::size_t rep = slot % reps;
    const std::size_t n_train = config.train_sizes[ni_index];
    const std::uint64_t replication = config.replication_offset + rep;
    const std::uint64_t stream =
        (static_cast<std::uint64_t>(ni_index) << 32) | replication;

    std::vector<ReplicationRow>& rows = results[slot];
    for (const MethodSpec& method : config.methods) {
      ReplicationRow row;
      row.model = model.name.empty() ? std::string("custom") : model.name;
      row.n = n_train;
      row.method = method.label();
      row.replication = replication;
      rows.push_back(std::move(row));
    }

    try {
      RngStream rng(config.seed, stream);
      const FunctionalDataset train = sample_model(model, n_train, rng);
      const FunctionalDataset validation =
          sample_model(model, config.validation_size, rng);
      const FunctionalDataset test = sample_model(model, config.test_size, rng);

      // Selection work is shared between methods that differ only in the
      // classifier.
      std::map<SelectorMethod, std::vector<Candidate>> cache;
      std::map<SelectorMethod, std::string> cache_error;
      for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const MethodSpec& method = config.methods[mi];
        ReplicationRow& row = rows[mi];
        try {
          if (cache_error.count(method.selector)) {
            throw Error(cache_error[method.selector]);
          }
          if (!cache.count(method.selector)) {
            try {
              cache[method.selector] =
                  build_candidates(method.selector, train, config.grids);
            } catch (const std::exception& e) {
              cache_error[method.selector] = e.what();
              throw Error(e.what());
            }
          }
          const std::vector<Candidate>& cands = cache[method.selector];
          if (cands.empty()) {
            throw Error(selector_name(method.selector) +
                        " produced no usable candidate");
          }
          const Choice best = evaluate_candidates(cands, method.classifier,
                                                  config.grids, train, validation);
          row.accuracy =
              score_fold(*best.winner, method.classifier, best.hp.k, train, test);
          row.n_vars = best.winner->n_vars;
          row.hyper = best.hp;
          row.ok = true;
        } catch (const std::exception& e) {
          row.ok = false;
          row.error = e.what();
        }
      }
    } catch (const std::exception& e) {
      for (ReplicationRow& row : rows) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };

  int threads = config.threads == 0
                    ? std::max(1u, std::thread::hardware_concurrency())
                    : config.threads;
  threads = std::min<int>(threads, static_cast<int>(slots));
  if (threads <= 1) {
    for (std::size_t slot = 0; slot < slots; ++slot) run_slot(slot);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t slot = next.fetch_add(1); slot < slots;
             slot = next.fetch_add(1)) {
          run_slot(slot);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  ExperimentReport report;
  report.config = config;
  for (const auto& rows : results) {
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

// ---------------------------------------------------------------------------
// Real-data protocol

ExperimentReport run_real_data(const ExperimentConfig& config) {
  const FunctionalDataset dataset = load_dataset(config.dataset_path);
  const std::string model_label =
      std::filesystem::path(config.dataset_path).stem().string();

  ExperimentReport report;
  report.config = config;
  for (const MethodSpec& method : config.methods) {
    CvResult cv = cross_validate(dataset, method, config.cv, config.grids,
                                 config.seed);
    for (ReplicationRow& row : cv.fold_rows) {
      row.model = model_label;
      report.rows.push_back(std::move(row));
    }
  }
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------
// Names and labels

std::string classifier_name(ClassifierKind kind) {
  return kind == ClassifierKind::KNN ? "KNN" : "LDA";
}

ClassifierKind classifier_from_name(const std::string& name) {
  if (name == "KNN" || name == "knn") return ClassifierKind::KNN;
  if (name == "LDA" || name == "lda") return ClassifierKind::LDA;
  throw ConfigError("unknown classifier: " + name);
}

std::string MethodSpec::label() const {
  return selector_name(selector) + "+" + classifier_name(classifier);
}

Grids default_grids() {
  Grids g;
  g.k_values = {1, 3, 5, 7, 9, 11};
  g.dims.resize(20);
  std::iota(g.dims.begin(), g.dims.end(), 1);
  g.h_values = {1, 2, 3, 5, 8, 12};
  g.components.resize(10);
  std::iota(g.components.begin(), g.components.end(), 1);
  return g;
}

// ---------------------------------------------------------------------------
// Config validation, parsing, serialization

void ExperimentConfig::validate() const {
  const bool has_model = model.has_value() || !model_name.empty();
  if (has_model == !dataset_path.empty()) {
    throw ConfigError("configure exactly one of model or dataset");
  }
  if (methods.empty()) throw ConfigError("no methods configured");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i].selector == SelectorMethod::BASE &&
        methods[i].classifier == ClassifierKind::LDA) {
      throw ConfigError(
          "BASE+LDA is not available: the baseline keeps every grid point, "
          "leaving the pooled covariance singular");
    }
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      if (methods[i].label() == methods[j].label()) {
        throw ConfigError("duplicate method: " + methods[i].label());
      }
    }
  }
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (grids.k_values.empty() || grids.dims.empty() || grids.h_values.empty() ||
      grids.components.empty()) {
    throw ConfigError("every hyperparameter grid needs at least one value");
  }
  for (int k : grids.k_values) {
    if (k < 1 || k % 2 == 0) throw ConfigError("k grid values must be odd and >= 1");
  }
  for (int d : grids.dims) {
    if (d < 1) throw ConfigError("dimension grid values must be >= 1");
  }
  for (int h : grids.h_values) {
    if (h < 1) throw ConfigError("h grid values must be >= 1");
  }
  for (int c : grids.components) {
    if (c < 1) throw ConfigError("component grid values must be >= 1");
  }
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (has_model) {
    if (train_sizes.empty()) throw ConfigError("no training sizes configured");
    for (std::size_t n : train_sizes) {
      if (n < 2) throw ConfigError("training sizes must be >= 2");
    }
    if (validation_size < 1 || test_size < 1) {
      throw ConfigError("validation and test sizes must be >= 1");
    }
    if (!model && !model_name.empty()) {
      try {
        make_model(model_name, model_params);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
  } else {
    if (cv.kind == CvScheme::Kind::KFold && cv.folds < 2) {
      throw ConfigError("k-fold cross-validation needs folds >= 2");
    }
  }
}

namespace {

MethodSpec parse_method_string(const std::string& text) {
  const std::size_t plus = text.find('+');
  if (plus == std::string::npos || plus == 0 || plus + 1 >= text.size()) {
    throw ConfigError("method must look like SELECTOR+CLASSIFIER: " + text);
  }
  MethodSpec m;
  m.selector = selector_from_name(text.substr(0, plus));
  m.classifier = classifier_from_name(text.substr(plus + 1));
  return m;
}

void check_keys(const ordered_json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return item.key() == a;
        }) == allowed.end()) {
      throw ConfigError(std::string("unknown ") + where + " key: " + item.key());
    }
  }
}

std::vector<int> int_list(const ordered_json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(std::string(what) + " must be a non-empty array");
  }
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) {
      throw ConfigError(std::string(what) + " entries must be integers");
    }
    out.push_back(v.get<int>());
  }
  return out;
}

// Full ModelSpec <-> JSON, so manifests round-trip even for hand-built models.
const char* trend_kind_name(TrendSpec::Kind k) {
  switch (k) {
    case TrendSpec::Kind::None: return "none";
    case TrendSpec::Kind::Linear: return "linear";
    case TrendSpec::Kind::StochasticSlope: return "stochastic-slope";
    case TrendSpec::Kind::Peak: return "peak";
    case TrendSpec::Kind::Tabulated: return "tabulated";
  }
  return "none";
}

TrendSpec::Kind trend_kind_from(const std::string& s) {
  if (s == "none") return TrendSpec::Kind::None;
  if (s == "linear") return TrendSpec::Kind::Linear;
  if (s == "stochastic-slope") return TrendSpec::Kind::StochasticSlope;
  if (s == "peak") return TrendSpec::Kind::Peak;
  if (s == "tabulated") return TrendSpec::Kind::Tabulated;
  throw ConfigError("unknown trend kind: " + s);
}

const char* family_name(ProcessSpec::Family f) {
  switch (f) {
    case ProcessSpec::Family::Brownian: return "brownian";
    case ProcessSpec::Family::BrownianBridge: return "brownian-bridge";
    case ProcessSpec::Family::OU: return "ou";
    case ProcessSpec::Family::SmoothedBrownian: return "smoothed-brownian";
  }
  return "brownian";
}

ProcessSpec::Family family_from(const std::string& s) {
  if (s == "brownian") return ProcessSpec::Family::Brownian;
  if (s == "brownian-bridge") return ProcessSpec::Family::BrownianBridge;
  if (s == "ou") return ProcessSpec::Family::OU;
  if (s == "smoothed-brownian") return ProcessSpec::Family::SmoothedBrownian;
  throw ConfigError("unknown process family: " + s);
}

ordered_json process_to_json(const ProcessSpec& p) {
  ordered_json j;
  j["family"] = family_name(p.family);
  j["trend"] = ordered_json{{"kind", trend_kind_name(p.trend.kind)},
                            {"c", p.trend.c},
                            {"m", p.trend.m},
                            {"k", p.trend.k},
                            {"values", p.trend.values}};
  j["a"] = p.a;
  j["b"] = p.b;
  j["bandwidth"] = p.bandwidth;
  return j;
}

ProcessSpec process_from_json(const ordered_json& j) {
  check_keys(j, "process", {"family", "trend", "a", "b", "bandwidth"});
  ProcessSpec p;
  if (j.contains("family")) p.family = family_from(j.at("family").get<std::string>());
  if (j.contains("trend")) {
    const auto& t = j.at("trend");
    check_keys(t, "trend", {"kind", "c", "m", "k", "values"});
    if (t.contains("kind")) p.trend.kind = trend_kind_from(t.at("kind").get<std::string>());
    if (t.contains("c")) p.trend.c = t.at("c").get<double>();
    if (t.contains("m")) p.trend.m = t.at("m").get<int>();
    if (t.contains("k")) p.trend.k = t.at("k").get<int>();
    if (t.contains("values")) p.trend.values = t.at("values").get<std::vector<double>>();
  }
  if (j.contains("a")) p.a = j.at("a").get<double>();
  if (j.contains("b")) p.b = j.at("b").get<double>();
  if (j.contains("bandwidth")) p.bandwidth = j.at("bandwidth").get<double>();
  return p;
}

ordered_json model_to_json(const ModelSpec& m) {
  ordered_json j;
  switch (m.kind) {
    case ModelSpec::Kind::Conditional: j["kind"] = "conditional"; break;
    case ModelSpec::Kind::Logistic: j["kind"] = "logistic"; break;
    case ModelSpec::Kind::Mixture: j["kind"] = "mixture"; break;
  }
  j["grid"] = m.grid.points;
  j["p"] = m.p;
  if (m.kind == ModelSpec::Kind::Conditional) {
    j["class0"] = process_to_json(m.class0);
    j["class1"] = process_to_json(m.class1);
  } else if (m.kind == ModelSpec::Kind::Logistic) {
    j["marginal"] = process_to_json(m.marginal);
    ordered_json link = ordered_json::array();
    for (const auto& mono : m.link) {
      link.push_back(ordered_json{{"index", mono.index},
                                  {"power", mono.power},
                                  {"coef", mono.coef}});
    }
    j["link"] = link;
  } else {
    auto mix_json = [](const std::vector<MixtureComponent>& mix) {
      ordered_json out = ordered_json::array();
      for (const auto& comp : mix) {
        ordered_json item;
        item["weight"] = comp.weight;
        item["process"] = process_to_json(comp.process);
        out.push_back(std::move(item));
      }
      return out;
    };
    j["mix0"] = mix_json(m.mix0);
    j["mix1"] = mix_json(m.mix1);
  }
  if (!m.name.empty()) j["name"] = m.name;
  return j;
}

ModelSpec model_from_json(const ordered_json& j) {
  check_keys(j, "model", {"kind", "grid", "p", "class0", "class1", "marginal",
                          "link", "mix0", "mix1", "name"});
  ModelSpec m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "conditional") m.kind = ModelSpec::Kind::Conditional;
  else if (kind == "logistic") m.kind = ModelSpec::Kind::Logistic;
  else if (kind == "mixture") m.kind = ModelSpec::Kind::Mixture;
  else throw ConfigError("unknown model kind: " + kind);
  if (j.contains("grid")) {
    m.grid.points = j.at("grid").get<std::vector<double>>();
  } else {
    m.grid = default_grid();
  }
  if (j.contains("p")) m.p = j.at("p").get<double>();
  if (j.contains("class0")) m.class0 = process_from_json(j.at("class0"));
  if (j.contains("class1")) m.class1 = process_from_json(j.at("class1"));
  if (j.contains("marginal")) m.marginal = process_from_json(j.at("marginal"));
  if (j.contains("link")) {
    for (const auto& mono : j.at("link")) {
      check_keys(mono, "link", {"index", "power", "coef"});
      m.link.push_back({mono.at("index").get<int>(), mono.at("power").get<int>(),
                        mono.at("coef").get<double>()});
    }
  }
  auto read_mix = [&](const char* key, std::vector<MixtureComponent>& out) {
    if (!j.contains(key)) return;
    for (const auto& comp : j.at(key)) {
      check_keys(comp, "mixture component", {"weight", "process"});
      out.push_back({comp.at("weight").get<double>(),
                     process_from_json(comp.at("process"))});
    }
  };
  read_mix("mix0", m.mix0);
  read_mix("mix1", m.mix1);
  if (j.contains("name")) m.name = j.at("name").get<std::string>();
  return m;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("config")) j = j.at("config");  // accept a run manifest

  check_keys(j, "config",
             {"name", "model", "model_params", "dataset", "train_sizes",
              "replications", "validation_size", "test_size", "cv", "methods",
              "grids", "seed", "replication_offset", "threads"});

  ExperimentConfig c;
  try {
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    if (j.contains("model")) {
      if (j.at("model").is_string()) {
        c.model_name = j.at("model").get<std::string>();
      } else {
        c.model = model_from_json(j.at("model"));
      }
    }
    if (j.contains("model_params")) {
      for (const auto& item : j.at("model_params").items()) {
        if (!item.value().is_number()) {
          throw ConfigError("model_params values must be numbers");
        }
        c.model_params[item.key()] = item.value().get<double>();
      }
    }
    if (j.contains("dataset")) c.dataset_path = j.at("dataset").get<std::string>();
    if (j.contains("train_sizes")) {
      c.train_sizes.clear();
      for (int n : int_list(j.at("train_sizes"), "train_sizes")) {
        if (n < 1) throw ConfigError("train_sizes entries must be >= 1");
        c.train_sizes.push_back(static_cast<std::size_t>(n));
      }
    }
    if (j.contains("replications")) c.replications = j.at("replications").get<int>();
    if (j.contains("validation_size")) {
      c.validation_size = j.at("validation_size").get<std::size_t>();
    }
    if (j.contains("test_size")) c.test_size = j.at("test_size").get<std::size_t>();
    if (j.contains("cv")) {
      const auto& cv = j.at("cv");
      check_keys(cv, "cv", {"scheme", "folds"});
      const std::string scheme = cv.at("scheme").get<std::string>();
      if (scheme == "loo" || scheme == "leave-one-out") {
        c.cv.kind = CvScheme::Kind::LeaveOneOut;
      } else if (scheme == "k-fold" || scheme == "kfold") {
        c.cv.kind = CvScheme::Kind::KFold;
      } else {
        throw ConfigError("unknown cv scheme: " + scheme);
      }
      if (cv.contains("folds")) c.cv.folds = cv.at("folds").get<int>();
    }
    if (j.contains("methods")) {
      if (!j.at("methods").is_array()) throw ConfigError("methods must be an array");
      for (const auto& entry : j.at("methods")) {
        if (entry.is_string()) {
          c.methods.push_back(parse_method_string(entry.get<std::string>()));
        } else if (entry.is_object()) {
          check_keys(entry, "method", {"selector", "classifier"});
          MethodSpec m;
          m.selector = selector_from_name(entry.at("selector").get<std::string>());
          m.classifier =
              classifier_from_name(entry.at("classifier").get<std::string>());
          c.methods.push_back(m);
        } else {
          throw ConfigError("method entries must be strings or objects");
        }
      }
    }
    if (j.contains("grids")) {
      const auto& g = j.at("grids");
      check_keys(g, "grids", {"k", "dim", "h", "components"});
      if (g.contains("k")) c.grids.k_values = int_list(g.at("k"), "grids.k");
      if (g.contains("dim")) c.grids.dims = int_list(g.at("dim"), "grids.dim");
      if (g.contains("h")) c.grids.h_values = int_list(g.at("h"), "grids.h");
      if (g.contains("components")) {
        c.grids.components = int_list(g.at("components"), "grids.components");
      }
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("replication_offset")) {
      c.replication_offset = j.at("replication_offset").get<std::uint64_t>();
    }
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }

  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["name"] = config.name;
  if (!config.model_name.empty()) {
    j["model"] = config.model_name;
    if (!config.model_params.empty()) j["model_params"] = config.model_params;
  } else if (config.model) {
    j["model"] = model_to_json(*config.model);
  }
  if (!config.dataset_path.empty()) {
    j["dataset"] = config.dataset_path;
    j["cv"] = ordered_json{{"scheme", config.cv.kind == CvScheme::Kind::KFold
                                          ? "k-fold"
                                          : "leave-one-out"}};
    if (config.cv.kind == CvScheme::Kind::KFold) j["cv"]["folds"] = config.cv.folds;
  } else {
    j["train_sizes"] = config.train_sizes;
    j["replications"] = config.replications;
    j["validation_size"] = config.validation_size;
    j["test_size"] = config.test_size;
  }
  ordered_json methods = ordered_json::array();
  for (const MethodSpec& m : config.methods) methods.push_back(m.label());
  j["methods"] = methods;
  j["grids"] = ordered_json{{"k", config.grids.k_values},
                            {"dim", config.grids.dims},
                            {"h", config.grids.h_values},
                            {"components", config.grids.components}};
  j["seed"] = config.seed;
  j["replication_offset"] = config.replication_offset;
  j["threads"] = config.threads;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Entry points

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  return config.simulation_mode() ? run_simulation(config) : run_real_data(config);
}

ValidationOutcome validate_hyperparams(const MethodSpec& method, const Grids& grids,
                                       const FunctionalDataset& train,
                                       const FunctionalDataset& validation) {
  const std::vector<Candidate> cands =
      build_candidates(method.selector, train, grids);
  if (cands.empty()) {
    throw Error(selector_name(method.selector) + " produced no usable candidate");
  }
  const Choice best =
      evaluate_candidates(cands, method.classifier, grids, train, validation);
  ValidationOutcome out;
  out.hyper = best.hp;
  out.validation_accuracy = best.acc;
  out.n_vars = best.winner->n_vars;
  return out;
}

// ---------------------------------------------------------------------------
// Cross-validation

std::vector<std::vector<std::size_t>> make_folds(const std::vector<int>& labels,
                                                 const CvScheme& scheme,
                                                 std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (n < 2) throw Error("cross-validation needs at least 2 samples");
  std::size_t n_by_class[2] = {0, 0};
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error("labels must be 0 or 1");
    ++n_by_class[y];
  }

  if (scheme.kind == CvScheme::Kind::LeaveOneOut) {
    if (n_by_class[0] < 2 || n_by_class[1] < 2) {
      throw Error("leave-one-out needs at least 2 samples of each class");
    }
    std::vector<std::vector<std::size_t>> folds(n);
    for (std::size_t i = 0; i < n; ++i) folds[i] = {i};
    return folds;
  }

  const int nf = scheme.folds;
  if (nf < 2 || static_cast<std::size_t>(nf) > n) {
    throw Error("fold count must lie in [2, n]");
  }
  std::vector<std::vector<std::size_t>> folds(nf);
  std::size_t cursor = 0;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    RngStream rng(seed, static_cast<std::uint64_t>(cls));
    for (std::size_t i = idx.size(); i > 1; --i) {  // Fisher-Yates
      const std::size_t j = rng.next_u64() % i;
      std::swap(idx[i - 1], idx[j]);
    }
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      folds[(cursor + pos) % nf].push_back(idx[pos]);
    }
    cursor = (cursor + idx.size()) % nf;
  }
  for (const auto& fold : folds) {
    std::size_t train_count[2] = {n_by_class[0], n_by_class[1]};
    for (std::size_t i : fold) --train_count[labels[i]];
    if (train_count[0] == 0 || train_count[1] == 0) {
      throw Error("stratification failed: a training split lost a class");
    }
  }
  return folds;
}

CvResult cross_validate(const FunctionalDataset& dataset, const MethodSpec& method,
                        const CvScheme& scheme, const Grids& grids,
                        std::uint64_t seed) {
  dataset.validate();
  const auto outer_folds = make_folds(dataset.labels, scheme, seed);
  const std::size_t n = dataset.n();

  CvResult result;
  double acc_sum = 0.0, vars_sum = 0.0;
  std::vector<int> ks, hs, dims, comps;

  for (std::size_t f = 0; f < outer_folds.size(); ++f) {
    ReplicationRow row;
    row.n = n;
    row.method = method.label();
    row.replication = f;

    try {
      std::vector<std::size_t> train_idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(outer_folds[f].begin(), outer_folds[f].end(), i) ==
            outer_folds[f].end()) {
          train_idx.push_back(i);
        }
      }
      const FunctionalDataset outer_train = subset_rows(dataset, train_idx);
      const FunctionalDataset outer_test = subset_rows(dataset, outer_folds[f]);

      // Inner loop: same scheme inside the outer training set, pooled
      // accuracy per hyperparameter combination. A combination counts only
      // if it is available in every completed inner fold.
      const std::uint64_t inner_seed = seed ^ (0x9E3779B97F4A7C15ULL * (f + 1));
      const auto inner_folds =
          make_folds(outer_train.labels, scheme, inner_seed);

      struct PairStat {
        int folds = 0;
        long correct = 0;
        long total = 0;
        double n_vars_sum = 0.0;
      };
      std::map<std::array<int, 4>, PairStat> stats;  // (h, dim, comps, k)
      int ok_inner = 0;
      for (const auto& inner_test_idx : inner_folds) {
        try {
          std::vector<std::size_t> inner_train_idx;
          for (std::size_t i = 0; i < outer_train.n(); ++i) {
            if (std::find(inner_test_idx.begin(), inner_test_idx.end(), i) ==
                inner_test_idx.end()) {
              inner_train_idx.push_back(i);
            }
          }
          const FunctionalDataset it_train =
              subset_rows(outer_train, inner_train_idx);
          const FunctionalDataset it_test = subset_rows(outer_train, inner_test_idx);
          const auto cands = build_candidates(method.selector, it_train, grids);
          if (cands.empty()) continue;
          const std::vector<int> fold_ks =
              method.classifier == ClassifierKind::KNN
                  ? admissible_ks(grids.k_values, it_train.n())
                  : std::vector<int>{-1};
          if (fold_ks.empty()) continue;
          struct Touch {
            std::array<int, 4> key;
            long correct;
            long total;
            int n_vars;
          };
          std::vector<Touch> touched;
          for (const Candidate& cand : cands) {
            try {
              if (method.classifier == ClassifierKind::KNN) {
                const Matrix xtr = project(cand.proj, it_train);
                const Matrix xte = project(cand.proj, it_test);
                const auto accs =
                    knn_sweep(xtr, it_train.labels, xte, it_test.labels, fold_ks);
                for (std::size_t t = 0; t < fold_ks.size(); ++t) {
                  touched.push_back(
                      {{cand.h, cand.dim, cand.components, fold_ks[t]},
                       std::lround(accs[t] * static_cast<double>(it_test.n())),
                       static_cast<long>(it_test.n()), cand.n_vars});
                }
              } else {
                const double acc = score_fold(cand, method.classifier, -1,
                                              it_train, it_test);
                touched.push_back({{cand.h, cand.dim, cand.components, -1},
                                   std::lround(acc * static_cast<double>(it_test.n())),
                                   static_cast<long>(it_test.n()), cand.n_vars});
              }
            } catch (const Error&) {
              // candidate unusable in this inner fold
            }
          }
          if (touched.empty()) continue;
          ++ok_inner;
          for (const Touch& t : touched) {
            PairStat& st = stats[t.key];
            ++st.folds;
            st.correct += t.correct;
            st.total += t.total;
            st.n_vars_sum += t.n_vars;
          }
        } catch (const Error&) {
          // inner fold skipped (e.g. stratification loss); others carry on
        }
      }
      if (ok_inner == 0) throw Error("every inner validation fold failed");

      Choice best;
      for (const auto& [key, st] : stats) {
        if (st.folds != ok_inner) continue;
        Choice c;
        c.valid = true;
        c.acc = static_cast<double>(st.correct) / static_cast<double>(st.total);
        c.n_vars = st.n_vars_sum / st.folds;
        c.hp.h = key[0];
        c.hp.dim = key[1];
        c.hp.components = key[2];
        c.hp.k = key[3];
        if (better(c, best)) best = c;
      }
      if (!best.valid) {
        throw Error("no hyperparameter combination survived inner validation");
      }

      // Refit on the full outer training set with the winning combination.
      const auto outer_cands = build_candidates(method.selector, outer_train, grids);
      const Candidate* winner = nullptr;
      for (const Candidate& cand : outer_cands) {
        if (cand.h == best.hp.h && cand.dim == best.hp.dim &&
            cand.components == best.hp.components) {
          winner = &cand;
          break;
        }
      }
      if (!winner) {
        throw Error("winning hyperparameters are not available on the full fold");
      }
      row.accuracy =
          score_fold(*winner, method.classifier, best.hp.k, outer_train, outer_test);
      row.n_vars = winner->n_vars;
      row.hyper = best.hp;
      row.ok = true;

      acc_sum += row.accuracy;
      vars_sum += winner->n_vars;
      ks.push_back(best.hp.k);
      hs.push_back(best.hp.h);
      dims.push_back(best.hp.dim);
      comps.push_back(best.hp.components);
      ++result.folds_used;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      ++result.fold_failures;
    }
    result.fold_rows.push_back(std::move(row));
  }

  if (result.folds_used > 0) {
    result.accuracy = acc_sum / result.folds_used;
    result.mean_n_vars = vars_sum / result.folds_used;
    result.modal.k = modal_value(ks);
    result.modal.h = modal_value(hs);
    result.modal.dim = modal_value(dims);
    result.modal.components = modal_value(comps);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Rankings

std::string criterion_name(RankCriterion criterion) {
  switch (criterion) {
    case RankCriterion::Relative: return "relative";
    case RankCriterion::Positional: return "positional";
    case RankCriterion::F1: return "F1";
  }
  return "relative";
}

std::vector<double> rank_row(const std::vector<double>& accuracies,
                             RankCriterion criterion) {
  const std::size_t m = accuracies.size();
  if (m < 2) throw Error("ranking needs at least two methods");
  for (double a : accuracies) {
    if (!std::isfinite(a)) throw Error("ranking scores must be finite");
  }

  if (criterion == RankCriterion::Relative) {
    const double w = *std::min_element(accuracies.begin(), accuracies.end());
    const double big = *std::max_element(accuracies.begin(), accuracies.end());
    std::vector<double> out(m, 10.0);
    if (big > w) {
      for (std::size_t i = 0; i < m; ++i) {
        out[i] = 10.0 * (accuracies[i] - w) / (big - w);
      }
    }
    return out;
  }

  // Points by place, ties sharing the mean of the points they span.
  std::vector<double> points(m);
  static const double f1[] = {25, 18, 15, 10, 8, 6, 4};
  for (std::size_t pos = 0; pos < m; ++pos) {
    points[pos] = criterion == RankCriterion::Positional
                      ? 10.0 - static_cast<double>(pos)
                      : (pos < 7 ? f1[pos] : 0.0);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (accuracies[a] != accuracies[b]) return accuracies[a] > accuracies[b];
    return a < b;
  });
  std::vector<double> out(m, 0.0);
  std::size_t pos = 0;
  while (pos < m) {
    std::size_t end = pos + 1;
    while (end < m && accuracies[order[end]] == accuracies[order[pos]]) ++end;
    double share = 0.0;
    for (std::size_t i = pos; i < end; ++i) share += points[i];
    share /= static_cast<double>(end - pos);
    for (std::size_t i = pos; i < end; ++i) out[order[i]] = share;
    pos = end;
  }
  return out;
}

RankingTable rank_methods(const std::vector<std::vector<double>>& accuracy_rows,
                          const std::vector<std::string>& methods,
                          RankCriterion criterion) {
  if (methods.size() < 2) throw Error("ranking needs at least two methods");
  if (accuracy_rows.empty()) throw Error("ranking needs at least one experiment");
  RankingTable table;
  table.criterion = criterion;
  table.methods = methods;
  table.scores.assign(methods.size(), 0.0);
  for (const auto& row : accuracy_rows) {
    if (row.size() != methods.size()) {
      throw Error("accuracy row does not match the method list");
    }
    const std::vector<double> pts = rank_row(row, criterion);
    for (std::size_t i = 0; i < pts.size(); ++i) table.scores[i] += pts[i];
  }
  for (double& s : table.scores) s /= static_cast<double>(accuracy_rows.size());
  return table;
}

std::vector<RankingTable> rank_report(const std::vector<AggregateRow>& aggregates) {
  // Each (model, n) pair is one experiment; every experiment must cover the
  // same methods.
  std::vector<std::string> methods;
  for (const AggregateRow& row : aggregates) {
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
      methods.push_back(row.method);
    }
  }
  if (methods.size() < 2) throw Error("ranking needs at least two methods");

  std::vector<std::pair<std::string, std::size_t>> experiments;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> seen;
  for (const AggregateRow& row : aggregates) {
    const std::pair<std::string, std::size_t> key = {row.model, row.n};
    std::size_t e = 0;
    for (; e < experiments.size(); ++e) {
      if (experiments[e] == key) break;
    }
    if (e == experiments.size()) {
      experiments.push_back(key);
      rows.emplace_back(methods.size(), 0.0);
      seen.emplace_back(methods.size(), false);
    }
    const std::size_t mi = static_cast<std::size_t>(
        std::find(methods.begin(), methods.end(), row.method) - methods.begin());
    rows[e][mi] = row.mean_accuracy;
    seen[e][mi] = true;
  }
  for (std::size_t e = 0; e < experiments.size(); ++e) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      if (!seen[e][mi]) {
        throw Error("method " + methods[mi] + " is missing from experiment " +
                    experiments[e].first + "/n=" +
                    std::to_string(experiments[e].second));
      }
    }
  }

  std::vector<RankingTable> tables;
  for (RankCriterion c : {RankCriterion::Relative, RankCriterion::Positional,
                          RankCriterion::F1}) {
    tables.push_back(rank_methods(rows, methods, c));
  }
  return tables;
}

// ---------------------------------------------------------------------------
// Report files

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

std::string rankings_to_csv(const std::vector<RankingTable>& rankings) {
  std::string text = "criterion,method,score\n";
  for (const RankingTable& table : rankings) {
    for (std::size_t i = 0; i < table.methods.size(); ++i) {
      text += criterion_name(table.criterion) + "," +
              csv_escape(table.methods[i]) + "," + format_double(table.scores[i]) +
              "\n";
    }
  }
  return text;
}

}  // namespace

void emit_report(const ExperimentReport& report,
                 const std::vector<RankingTable>& rankings,
                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  std::string agg =
      "model,n,method,replications_used,failures,mean_accuracy,accuracy_se,"
      "mean_n_vars,modal_k,modal_h,modal_dim,modal_components\n";
  for (const AggregateRow& row : report.aggregates) {
    agg += csv_escape(row.model) + "," + std::to_string(row.n) + "," +
           csv_escape(row.method) + "," + std::to_string(row.replications_used) +
           "," + std::to_string(row.failures) + "," +
           format_double(row.mean_accuracy) + "," +
           format_double(row.accuracy_se) + "," + format_double(row.mean_n_vars) +
           "," + opt_int(row.modal.k) + "," + opt_int(row.modal.h) + "," +
           opt_int(row.modal.dim) + "," + opt_int(row.modal.components) + "\n";
  }
  write_file(dir / "aggregate.csv", agg);

  std::string raw =
      "model,n,method,replication,ok,accuracy,n_vars,k,h,dim,components,error\n";
  for (const ReplicationRow& row : report.rows) {
    raw += csv_escape(row.model) + "," + std::to_string(row.n) + "," +
           csv_escape(row.method) + "," + std::to_string(row.replication) + "," +
           (row.ok ? "1" : "0") + "," + format_double(row.accuracy) + "," +
           std::to_string(row.n_vars) + "," + opt_int(row.hyper.k) + "," +
           opt_int(row.hyper.h) + "," + opt_int(row.hyper.dim) + "," +
           opt_int(row.hyper.components) + "," + csv_escape(row.error) + "\n";
  }
  write_file(dir / "raw.csv", raw);

  std::string counts = "model,n,method,mean_n_vars,min_n_vars,max_n_vars\n";
  for (const AggregateRow& agg_row : report.aggregates) {
    int lo = 0, hi = 0;
    bool first = true;
    for (const ReplicationRow& row : report.rows) {
      if (!row.ok || row.model != agg_row.model || row.n != agg_row.n ||
          row.method != agg_row.method) {
        continue;
      }
      lo = first ? row.n_vars : std::min(lo, row.n_vars);
      hi = first ? row.n_vars : std::max(hi, row.n_vars);
      first = false;
    }
    counts += csv_escape(agg_row.model) + "," + std::to_string(agg_row.n) + "," +
              csv_escape(agg_row.method) + "," +
              format_double(agg_row.mean_n_vars) + "," + std::to_string(lo) +
              "," + std::to_string(hi) + "\n";
  }
  write_file(dir / "variable_counts.csv", counts);

  if (!rankings.empty()) {
    write_file(dir / "ranking.csv", rankings_to_csv(rankings));
  }

  ordered_json manifest;
  manifest["config"] = ordered_json::parse(config_to_json(report.config));
  manifest["seed"] = report.config.seed;
  manifest["version"] = "0.1.0";
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<AggregateRow> load_aggregate_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty aggregate file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected =
      "model,n,method,replications_used,failures,mean_accuracy,accuracy_se,"
      "mean_n_vars,modal_k,modal_h,modal_dim,modal_components";
  if (line != expected) {
    throw Error("unexpected aggregate header in " + path);
  }
  std::vector<AggregateRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 12) {
      throw Error(path + ": line " + std::to_string(line_no) +
                  " has " + std::to_string(f.size()) + " fields, expected 12");
    }
    try {
      AggregateRow row;
      row.model = f[0];
      row.n = static_cast<std::size_t>(parse_double(f[1]));
      row.method = f[2];
      row.replications_used = static_cast<int>(parse_double(f[3]));
      row.failures = static_cast<int>(parse_double(f[4]));
      row.mean_accuracy = parse_double(f[5]);
      row.accuracy_se = parse_double(f[6]);
      row.mean_n_vars = parse_double(f[7]);
      row.modal.k = parse_opt_int(f[8]);
      row.modal.h = parse_opt_int(f[9]);
      row.modal.dim = parse_opt_int(f[10]);
      row.modal.components = parse_opt_int(f[11]);
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      throw Error(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (rows.empty()) throw Error("no aggregate rows in " + path);
  return rows;
}

void save_rankings(const std::vector<RankingTable>& rankings,
                   const std::string& path) {
  write_file(path, rankings_to_csv(rankings));
}

}  // namespace mh
