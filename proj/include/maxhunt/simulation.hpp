#pragma once

#include <cstdint>

#include "maxhunt/core.hpp"

namespace mh {

// Deterministic per-replication random stream: the same (seed, stream) pair
// reproduces identical draws on any platform and thread schedule. Normals
// use an in-house Box-Muller consuming exactly two engine words per call, so
// draw sequences never depend on the standard library's distributions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform();  // [0,1), 53-bit resolution
  double normal();   // N(0,1)

 private:
  std::uint64_t state_;  // splitmix64 state; simple, splittable, well mixed
};

// Additive mean component of a trajectory.
struct TrendSpec {
  enum class Kind { None, Linear, StochasticSlope, Peak, Tabulated };
  Kind kind = Kind::None;
  double c = 0.0;              // Linear: c * t
  int m = 1, k = 1;            // Peak: triangular bump phi_peak(m, k, .)
  std::vector<double> values;  // Tabulated: one value per grid point
};

// A Gaussian process family plus an optional trend.
struct ProcessSpec {
  enum class Family { Brownian, BrownianBridge, OU, SmoothedBrownian };
  Family family = Family::Brownian;
  TrendSpec trend;
  double a = 1.0, b = 1.0;   // OU covariance a * exp(-b|s-t|)
  double bandwidth = 0.05;   // Gaussian smoothing width (SmoothedBrownian)
};

// One polynomial term of a logistic link: coef * x[index]^power.
struct LinkMonomial {
  int index = 0;
  int power = 1;
  double coef = 0.0;
};

struct MixtureComponent {
  double weight = 1.0;
  ProcessSpec process;
};

// Data-generating model. Three kinds:
//   Conditional - P(Y=1) = p, trajectory drawn from the label's process
//   Logistic    - trajectory from the marginal process, then
//                 Y ~ Bernoulli(1 / (1 + exp(-link(x))))
//   Mixture     - like Conditional but each class draws its process from a
//                 weighted component list
struct ModelSpec {
  enum class Kind { Conditional, Logistic, Mixture };
  Kind kind = Kind::Conditional;
  Grid grid;
  double p = 0.5;
  ProcessSpec class0, class1;              // Conditional
  ProcessSpec marginal;                    // Logistic
  std::vector<LinkMonomial> link;          // Logistic
  std::vector<MixtureComponent> mix0, mix1;  // Mixture
  std::string name;  // registry name when built by make_model
};

// 100 equispaced points t_i = (5+i)/105, i = 1..100; last point exactly 1.
Grid default_grid();

// Bridge variant (5+i)/106: same spacing family but stops short of the
// endpoint, where a Brownian bridge is pinned to zero.
Grid bridge_grid();

// Standard Brownian motion on the grid: X(t1) ~ N(0, t1), independent
// increments of variance t_{i+1} - t_i.
std::vector<double> sample_brownian(const Grid& grid, RngStream& rng);

// B(t) - t * B(1); B is drawn on grid + {1}, with the extra draw consumed
// after the grid draws.
std::vector<double> sample_brownian_bridge(const Grid& grid, RngStream& rng);

// Stationary Ornstein-Uhlenbeck with covariance a * exp(-b|s-t|) around the
// mean function (empty = zero); exact discretization, no Euler error.
std::vector<double> sample_ou(const Grid& grid, double a, double b,
                              const std::vector<double>& mean, RngStream& rng);

// Triangular bump: integral of a Haar wavelet. Rises with slope
// sqrt(2^(m-1)) on ((2k-2)/2^m, (2k-1)/2^m), falls symmetrically, zero
// outside; peak value 1/sqrt(2^(m+1)).
double phi_peak(int m, int k, double t);

// Discrete Gaussian-kernel convolution with weights renormalized over the
// grid; a bandwidth below a tenth of the grid spacing returns the input.
std::vector<double> smooth_trajectory(const std::vector<double>& trajectory,
                                      const Grid& grid, double bandwidth);

// Draw n labeled trajectories. Per-row draw order is fixed and documented:
// Conditional: label, then (for a stochastic-slope trend) the slope, then
// the path; Logistic: path first, then the label; Mixture: label, component,
// slope, path.
FunctionalDataset sample_model(const ModelSpec& model, std::size_t n,
                               RngStream& rng);

// ---- Analytic oracles for the Brownian-family models ----
//
// random-slope: class 0 is Brownian, class 1 adds theta * t, theta ~ N(0,1).
// drift:        class 1 adds c * t instead.
// peak:         class 1 adds phi_peak(m, k, .).
// Each Bayes rule depends on the trajectory only through one statistic.

double eta_random_slope(double x1, double p);
int bayes_rule_random_slope(double x1, double p);
// g* is 1{x1^2 > threshold}; the threshold may be negative (then g* == 1).
double random_slope_threshold_sq(double p);

double eta_drift(double x1, double c, double p);
int bayes_rule_drift(double x1, double c, double p);
// For c > 0: 1{x1 > threshold}; for c < 0 the inequality reverses.
double drift_threshold(double c, double p);

// S = (x_mid - x_left) + (x_mid - x_right) at the three dyadic points
// (2k-2)/2^m, (2k-1)/2^m, 2k/2^m.
double eta_peak(double s, int m, double p);
int bayes_rule_peak(double x_left, double x_mid, double x_right, int m, int k,
                    double p);
double peak_threshold(int m, double p);

// E|N(mean, sigma)|; exponent mean^2 / (2 sigma^2).
double folded_normal_mean(double mean, double sigma);

// Population curve t -> V^2(X_t, Y) for the two trend models with an
// explicit closed form.
enum class AnalyticModel { StochasticSlope, LinearDrift };
double analytic_v2_curve(AnalyticModel model, double t, double p, double c = 1.0);

struct BayesErrorEstimate {
  double error = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo estimate of the Bayes error P(g*(X) != Y), averaging
// min(eta, 1-eta) over draws of X. Supported for the three trend models
// above and for logistic models over Brownian/OU marginals; anything else
// has no available g* and throws.
BayesErrorEstimate bayes_error(const ModelSpec& model, std::size_t budget,
                               RngStream& rng);

// Named model registry. Parameters not in `params` keep their defaults;
// unknown names or parameters are rejected.
ModelSpec make_model(const std::string& name,
                     const std::map<std::string, double>& params = {});
std::vector<std::string> model_names();

}  // namespace mh
