#include "maxhunt/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace mh {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
  // Scramble (seed, stream) into a pseudo-random offset of the splitmix64
  // sequence; distinct streams land astronomically far apart.
  state_ = mix64(seed + kGolden * (stream + 1));
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::uniform() {
  return std::ldexp(static_cast<double>(next_u64() >> 11), -53);
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(kTwoPi * u2);
}

Grid default_grid() {
  Grid g;
  g.points.resize(100);
  for (int i = 1; i <= 100; ++i) g.points[i - 1] = (5.0 + i) / 105.0;
  return g;
}

Grid bridge_grid() {
  Grid g;
  g.points.resize(100);
  for (int i = 1; i <= 100; ++i) g.points[i - 1] = (5.0 + i) / 106.0;
  return g;
}

std::vector<double> sample_brownian(const Grid& grid, RngStream& rng) {
  std::vector<double> x(grid.size());
  double prev_t = 0.0, prev_x = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    prev_x += std::sqrt(grid[i] - prev_t) * rng.normal();
    prev_t = grid[i];
    x[i] = prev_x;
  }
  return x;
}

std::vector<double> sample_brownian_bridge(const Grid& grid, RngStream& rng) {
  const bool has_end = grid[grid.size() - 1] == 1.0;
  std::vector<double> b = sample_brownian(grid, rng);
  double b1;
  if (has_end) {
    b1 = b.back();
  } else {
    // One extra increment up to t = 1, consumed after the grid draws so the
    // bridge and plain Brownian paths agree on shared prefixes.
    b1 = b.back() + std::sqrt(1.0 - grid[grid.size() - 1]) * rng.normal();
  }
  for (std::size_t i = 0; i < grid.size(); ++i) b[i] -= grid[i] * b1;
  return b;
}

std::vector<double> sample_ou(const Grid& grid, double a, double b,
                              const std::vector<double>& mean, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("OU parameters must be positive");
  if (!mean.empty() && mean.size() != grid.size()) {
    throw Error("OU mean function length does not match grid");
  }
  auto m = [&](std::size_t i) { return mean.empty() ? 0.0 : mean[i]; };
  std::vector<double> x(grid.size());
  x[0] = m(0) + std::sqrt(a) * rng.normal();  // stationary start
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double dt = grid[i] - grid[i - 1];
    const double rho = std::exp(-b * dt);
    x[i] = m(i) + rho * (x[i - 1] - m(i - 1)) +
           std::sqrt(a * (1.0 - rho * rho)) * rng.normal();
  }
  return x;
}

double phi_peak(int m, int k, double t) {
  if (m < 1 || k < 1 || k > (1 << (m - 1))) {
    throw Error("invalid peak parameters m=" + std::to_string(m) +
                " k=" + std::to_string(k));
  }
  if (t < 0.0 || t > 1.0) throw Error("peak argument outside [0,1]");
  const double denom = static_cast<double>(1 << m);
  const double lo = (2.0 * k - 2.0) / denom;
  const double mid = (2.0 * k - 1.0) / denom;
  const double hi = 2.0 * k / denom;
  const double slope = std::sqrt(std::pow(2.0, m - 1));
  if (t <= lo || t >= hi) return 0.0;
  return t < mid ? slope * (t - lo) : slope * (hi - t);
}

std::vector<double> smooth_trajectory(const std::vector<double>& trajectory,
                                      const Grid& grid, double bandwidth) {
  if (!(bandwidth > 0.0)) throw Error("bandwidth must be positive");
  if (trajectory.size() != grid.size()) {
    throw Error("trajectory length does not match grid");
  }
  double min_spacing = 1.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    min_spacing = std::min(min_spacing, grid[i] - grid[i - 1]);
  }
  if (bandwidth < min_spacing / 10.0) return trajectory;  // delta-kernel limit
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double wsum = 0.0, acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double d = (grid[i] - grid[j]) / bandwidth;
      const double w = std::exp(-0.5 * d * d);
      wsum += w;
      acc += w * trajectory[j];
    }
    out[i] = acc / wsum;
  }
  return out;
}

namespace {

std::vector<double> trend_values(const TrendSpec& trend, const Grid& grid,
                                 RngStream& rng) {
  std::vector<double> v(grid.size(), 0.0);
  switch (trend.kind) {
    case TrendSpec::Kind::None:
      break;
    case TrendSpec::Kind::Linear:
      for (std::size_t i = 0; i < grid.size(); ++i) v[i] = trend.c * grid[i];
      break;
    case TrendSpec::Kind::StochasticSlope: {
      const double theta = rng.normal();
      for (std::size_t i = 0; i < grid.size(); ++i) v[i] = theta * grid[i];
      break;
    }
    case TrendSpec::Kind::Peak:
      for (std::size_t i = 0; i < grid.size(); ++i) {
        v[i] = phi_peak(trend.m, trend.k, grid[i]);
      }
      break;
    case TrendSpec::Kind::Tabulated:
      if (trend.values.size() != grid.size()) {
        throw Error("tabulated trend length does not match grid");
      }
      v = trend.values;
      break;
  }
  return v;
}

// One trajectory: trend draw (if random) first, then the base path.
// Smoothing applies to the base process only; the trend is added afterwards.
std::vector<double> sample_process(const ProcessSpec& spec, const Grid& grid,
                                   RngStream& rng) {
  const std::vector<double> trend = trend_values(spec.trend, grid, rng);
  std::vector<double> path;
  switch (spec.family) {
    case ProcessSpec::Family::Brownian:
      path = sample_brownian(grid, rng);
      break;
    case ProcessSpec::Family::BrownianBridge:
      path = sample_brownian_bridge(grid, rng);
      break;
    case ProcessSpec::Family::OU:
      path = sample_ou(grid, spec.a, spec.b, {}, rng);
      break;
    case ProcessSpec::Family::SmoothedBrownian:
      path = smooth_trajectory(sample_brownian(grid, rng), grid, spec.bandwidth);
      break;
  }
  for (std::size_t i = 0; i < path.size(); ++i) path[i] += trend[i];
  return path;
}

double link_value(const std::vector<LinkMonomial>& link,
                  const std::vector<double>& x) {
  double psi = 0.0;
  for (const auto& mono : link) {
    psi += mono.coef * std::pow(x[mono.index], mono.power);
  }
  return psi;
}

void validate_model(const ModelSpec& model) {
  model.grid.validate();
  if (model.kind != ModelSpec::Kind::Logistic &&
      !(model.p > 0.0 && model.p < 1.0)) {
    throw Error("class probability must lie in (0,1)");
  }
  if (model.kind == ModelSpec::Kind::Logistic) {
    if (model.link.empty()) throw Error("logistic model needs a link");
    for (const auto& mono : model.link) {
      if (mono.index < 0 ||
          static_cast<std::size_t>(mono.index) >= model.grid.size()) {
        throw Error("link index out of range: " + std::to_string(mono.index));
      }
      if (mono.power < 1) throw Error("link power must be >= 1");
    }
  }
  if (model.kind == ModelSpec::Kind::Mixture) {
    for (const auto* mix : {&model.mix0, &model.mix1}) {
      if (mix->empty()) throw Error("mixture class has no components");
      double total = 0.0;
      for (const auto& comp : *mix) {
        if (!(comp.weight > 0.0)) throw Error("mixture weights must be positive");
        total += comp.weight;
      }
      if (std::fabs(total - 1.0) > 1e-9) {
        throw Error("mixture weights must sum to 1");
      }
    }
  }
}

const ProcessSpec& pick_component(const std::vector<MixtureComponent>& mix,
                                  RngStream& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (const auto& comp : mix) {
    cum += comp.weight;
    if (u < cum) return comp.process;
  }
  return mix.back().process;
}

}  // namespace

FunctionalDataset sample_model(const ModelSpec& model, std::size_t n,
                               RngStream& rng) {
  validate_model(model);
  if (n == 0) throw Error("sample size must be >= 1");
  FunctionalDataset ds;
  ds.grid = model.grid;
  ds.x = Matrix(n, model.grid.size());
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> path;
    int label;
    switch (model.kind) {
      case ModelSpec::Kind::Conditional: {
        label = rng.uniform() < model.p ? 1 : 0;
        path = sample_process(label ? model.class1 : model.class0, model.grid, rng);
        break;
      }
      case ModelSpec::Kind::Logistic: {
        path = sample_process(model.marginal, model.grid, rng);
        const double eta = 1.0 / (1.0 + std::exp(-link_value(model.link, path)));
        label = rng.uniform() < eta ? 1 : 0;
        break;
      }
      case ModelSpec::Kind::Mixture: {
        label = rng.uniform() < model.p ? 1 : 0;
        const ProcessSpec& proc =
            pick_component(label ? model.mix1 : model.mix0, rng);
        path = sample_process(proc, model.grid, rng);
        break;
      }
      default:
        throw Error("unknown model kind");
    }
    std::copy(path.begin(), path.end(), ds.x.row(i));
    ds.labels[i] = label;
  }
  return ds;
}

double eta_random_slope(double x1, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0,1)");
  return 1.0 / ((1.0 - p) / p * std::sqrt(2.0) * std::exp(-x1 * x1 / 4.0) + 1.0);
}

int bayes_rule_random_slope(double x1, double p) {
  return x1 * x1 > random_slope_threshold_sq(p) ? 1 : 0;
}

double random_slope_threshold_sq(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0,1)");
  return 4.0 * std::log(std::sqrt(2.0) * (1.0 - p) / p);
}

double eta_drift(double x1, double c, double p) {
  if (c == 0.0) throw Error("drift coefficient must be nonzero");
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0,1)");
  return 1.0 / ((1.0 - p) / p * std::exp(c * c / 2.0 - c * x1) + 1.0);
}

int bayes_rule_drift(double x1, double c, double p) {
  const double thr = drift_threshold(c, p);
  return (c > 0.0 ? x1 > thr : x1 < thr) ? 1 : 0;
}

double drift_threshold(double c, double p) {
  if (c == 0.0) throw Error("drift coefficient must be nonzero");
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0,1)");
  return c / 2.0 - std::log(p / (1.0 - p)) / c;
}

double eta_peak(double s, int m, double p) {
  if (m < 1) throw Error("peak level must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0,1)");
  const double scale = std::sqrt(std::pow(2.0, m - 1));
  return 1.0 / ((1.0 - p) / p * std::exp(0.5 - scale * s) + 1.0);
}

int bayes_rule_peak(double x_left, double x_mid, double x_right, int m, int k,
                    double p) {
  if (k < 1 || k > (1 << (m - 1))) throw Error("invalid peak parameters");
  const double s = (x_mid - x_left) + (x_mid - x_right);
  return s > peak_threshold(m, p) ? 1 : 0;
}

double peak_threshold(int m, double p) {
  if (m < 1) throw Error("peak level must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0,1)");
  return 1.0 / std::sqrt(std::pow(2.0, m + 1)) -
         std::log(p / (1.0 - p)) / std::sqrt(std::pow(2.0, m - 1));
}

double folded_normal_mean(double mean, double sigma) {
  if (sigma < 0.0) throw Error("sigma must be >= 0");
  if (sigma == 0.0) return std::fabs(mean);
  return sigma * std::sqrt(2.0 / M_PI) * std::exp(-mean * mean / (2.0 * sigma * sigma)) +
         mean * (2.0 * normal_cdf(mean / sigma) - 1.0);
}

double analytic_v2_curve(AnalyticModel model, double t, double p, double c) {
  if (!(p > 0.0 && p < 1.0)) throw Error("p must lie in (0,1)");
  if (t < 0.0 || t > 1.0) throw Error("t outside [0,1]");
  if (t == 0.0) return 0.0;
  const double w = 4.0 * p * p * (1.0 - p) * (1.0 - p);
  if (model == AnalyticModel::StochasticSlope) {
    const double i01 = std::sqrt(2.0 * (t * t + 2.0 * t) / M_PI);
    const double i00 = std::sqrt(4.0 * t / M_PI);
    const double i11 = std::sqrt(4.0 * (t * t + t) / M_PI);
    return w * (i01 - 0.5 * (i00 + i11));
  }
  const double i01 = folded_normal_mean(c * t, std::sqrt(2.0 * t));
  const double i_same = std::sqrt(4.0 * t / M_PI);
  return w * (i01 - i_same);
}

namespace {

bool is_plain(const ProcessSpec& s, ProcessSpec::Family family) {
  return s.family == family && s.trend.kind == TrendSpec::Kind::None;
}

// Exact joint draw of a zero-mean process at a sorted time subset.
std::vector<double> draw_at_times(const ProcessSpec& spec,
                                  const std::vector<double>& times,
                                  RngStream& rng) {
  std::vector<double> x(times.size());
  if (spec.family == ProcessSpec::Family::Brownian) {
    double prev_t = 0.0, prev_x = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      prev_x += std::sqrt(times[i] - prev_t) * rng.normal();
      prev_t = times[i];
      x[i] = prev_x;
    }
    return x;
  }
  if (spec.family == ProcessSpec::Family::OU) {
    x[0] = std::sqrt(spec.a) * rng.normal();
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double rho = std::exp(-spec.b * (times[i] - times[i - 1]));
      x[i] = rho * x[i - 1] + std::sqrt(spec.a * (1.0 - rho * rho)) * rng.normal();
    }
    return x;
  }
  throw Error("no exact marginal sampler for this process family");
}

}  // namespace

BayesErrorEstimate bayes_error(const ModelSpec& model, std::size_t budget,
                               RngStream& rng) {
  validate_model(model);
  if (budget < 2) throw Error("budget must be >= 2");

  // Accumulate min(eta, 1 - eta) per draw of X; its mean is P(g*(X) != Y).
  double sum = 0.0, sumsq = 0.0;
  auto add = [&](double eta) {
    const double e = std::min(eta, 1.0 - eta);
    sum += e;
    sumsq += e * e;
  };

  if (model.kind == ModelSpec::Kind::Conditional &&
      is_plain(model.class0, ProcessSpec::Family::Brownian) &&
      model.class1.family == ProcessSpec::Family::Brownian) {
    const TrendSpec& trend = model.class1.trend;
    if (trend.kind == TrendSpec::Kind::StochasticSlope) {
      for (std::size_t i = 0; i < budget; ++i) {
        const bool one = rng.uniform() < model.p;
        const double sd = one ? std::sqrt(2.0) : 1.0;
        add(eta_random_slope(sd * rng.normal(), model.p));
      }
    } else if (trend.kind == TrendSpec::Kind::Linear) {
      for (std::size_t i = 0; i < budget; ++i) {
        const bool one = rng.uniform() < model.p;
        const double x1 = rng.normal() + (one ? trend.c : 0.0);
        add(eta_drift(x1, trend.c, model.p));
      }
    } else if (trend.kind == TrendSpec::Kind::Peak) {
      const double denom = static_cast<double>(1 << trend.m);
      const std::vector<double> times = {(2.0 * trend.k - 2.0) / denom,
                                         (2.0 * trend.k - 1.0) / denom,
                                         2.0 * trend.k / denom};
      const double bump = 1.0 / std::sqrt(std::pow(2.0, trend.m + 1));
      for (std::size_t i = 0; i < budget; ++i) {
        const bool one = rng.uniform() < model.p;
        double bl = 0.0, bm, br;
        if (times[0] > 0.0) bl = std::sqrt(times[0]) * rng.normal();
        bm = bl + std::sqrt(times[1] - times[0]) * rng.normal();
        br = bm + std::sqrt(times[2] - times[1]) * rng.normal();
        const double s = 2.0 * (bm + (one ? bump : 0.0)) - bl - br;
        add(eta_peak(s, trend.m, model.p));
      }
    } else {
      throw Error("no Bayes rule available for this model");
    }
  } else if (model.kind == ModelSpec::Kind::Logistic &&
             (is_plain(model.marginal, ProcessSpec::Family::Brownian) ||
              is_plain(model.marginal, ProcessSpec::Family::OU))) {
    // Exact joint law at the link points only.
    std::vector<int> indices;
    for (const auto& mono : model.link) indices.push_back(mono.index);
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    std::vector<double> times;
    for (int idx : indices) times.push_back(model.grid[idx]);
    std::vector<double> full(model.grid.size(), 0.0);
    for (std::size_t i = 0; i < budget; ++i) {
      const auto x = draw_at_times(model.marginal, times, rng);
      for (std::size_t j = 0; j < indices.size(); ++j) full[indices[j]] = x[j];
      const double eta = 1.0 / (1.0 + std::exp(-link_value(model.link, full)));
      add(eta);
    }
  } else {
    throw Error("no Bayes rule available for this model");
  }

  BayesErrorEstimate est;
  est.error = sum / budget;
  const double var = (sumsq - sum * sum / budget) / (budget - 1);
  est.std_error = std::sqrt(std::max(var, 0.0) / budget);
  return est;
}

ModelSpec make_model(const std::string& name,
                     const std::map<std::string, double>& params) {
  auto get = [&](const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : params) {
      (void)value;
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
            return key == a;
          }) == allowed.end()) {
        throw ConfigError("model '" + name + "' has no parameter '" + key + "'");
      }
    }
  };

  ModelSpec model;
  model.name = name;
  model.grid = default_grid();
  if (name == "random-slope") {
    check_keys({"p"});
    model.kind = ModelSpec::Kind::Conditional;
    model.p = get("p", 0.5);
    model.class1.trend.kind = TrendSpec::Kind::StochasticSlope;
  } else if (name == "drift") {
    check_keys({"c", "p"});
    model.kind = ModelSpec::Kind::Conditional;
    model.p = get("p", 0.5);
    model.class1.trend.kind = TrendSpec::Kind::Linear;
    model.class1.trend.c = get("c", 1.0);
  } else if (name == "peak") {
    check_keys({"m", "k", "p"});
    model.kind = ModelSpec::Kind::Conditional;
    model.p = get("p", 0.5);
    model.class1.trend.kind = TrendSpec::Kind::Peak;
    model.class1.trend.m = static_cast<int>(get("m", 2));
    model.class1.trend.k = static_cast<int>(get("k", 1));
    phi_peak(model.class1.trend.m, model.class1.trend.k, 0.0);  // validate (m,k)
  } else if (name == "logistic-two-point" || name == "logistic-poly") {
    check_keys({"a", "b"});
    model.kind = ModelSpec::Kind::Logistic;
    model.marginal.family = ProcessSpec::Family::OU;
    model.marginal.a = get("a", 1.0);
    model.marginal.b = get("b", 1.0);
    if (name == "logistic-two-point") {
      model.link = {{29, 1, 10.0}, {69, 1, 10.0}};
    } else {
      model.link = {{49, 4, 10.0}, {79, 3, 50.0}, {29, 2, 20.0}};
    }
  } else if (name == "drift-mixture") {
    check_keys({"c", "p"});
    model.kind = ModelSpec::Kind::Mixture;
    model.p = get("p", 0.5);
    const double c = get("c", 2.0);
    ProcessSpec plain;
    ProcessSpec up = plain, down = plain;
    up.trend.kind = TrendSpec::Kind::Linear;
    up.trend.c = c;
    down.trend.kind = TrendSpec::Kind::Linear;
    down.trend.c = -c;
    model.mix0 = {{1.0, plain}};
    model.mix1 = {{0.5, up}, {0.5, down}};
  } else if (name == "bridge-drift") {
    check_keys({"c", "p"});
    model.kind = ModelSpec::Kind::Conditional;
    model.grid = bridge_grid();
    model.p = get("p", 0.5);
    model.class0.family = ProcessSpec::Family::BrownianBridge;
    model.class1.family = ProcessSpec::Family::BrownianBridge;
    model.class1.trend.kind = TrendSpec::Kind::Linear;
    model.class1.trend.c = get("c", 1.0);
  } else if (name == "smoothed-drift") {
    check_keys({"c", "p", "bandwidth"});
    model.kind = ModelSpec::Kind::Conditional;
    model.p = get("p", 0.5);
    model.class0.family = ProcessSpec::Family::SmoothedBrownian;
    model.class0.bandwidth = get("bandwidth", 0.05);
    model.class1 = model.class0;
    model.class1.trend.kind = TrendSpec::Kind::Linear;
    model.class1.trend.c = get("c", 1.0);
  } else {
    throw ConfigError("unknown model: " + name);
  }
  validate_model(model);
  return model;
}

std::vector<std::string> model_names() {
  return {"random-slope", "drift",         "peak",
          "logistic-two-point", "logistic-poly", "drift-mixture",
          "bridge-drift",       "smoothed-drift"};
}

}  // namespace mh
