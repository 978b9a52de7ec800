#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "maxhunt/error.hpp"

namespace mh {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// Strict parse of a full token; throws Error on trailing junk or empty input.
double parse_double(const std::string& s);

// Discretization grid: strictly increasing time points in [0,1].
struct Grid {
  std::vector<double> points;

  std::size_t size() const { return points.size(); }
  double operator[](std::size_t i) const { return points[i]; }
  bool operator==(const Grid& other) const { return points == other.points; }

  // Enforces length >= 2, strict monotonicity and the [0,1] range.
  void validate() const;
};

// Dense row-major matrix; the only matrix type used across the library.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  double* row(std::size_t i) { return data.data() + i * cols; }
};

// n trajectories sampled on a common grid with binary labels.
struct FunctionalDataset {
  Grid grid;
  Matrix x;                 // n x N, row i = trajectory i on the grid
  std::vector<int> labels;  // values in {0,1}, one per row

  std::size_t n() const { return x.rows; }
  std::size_t width() const { return grid.size(); }
  std::size_t count(int label) const;

  // Enforces: n >= 1, row width == grid length, labels in {0,1}, valid grid.
  void validate() const;
};

// Rows regrouped by label; p_hat = n1 / (n0 + n1).
struct ClassSplit {
  std::vector<std::size_t> idx0, idx1;  // original row indices, input order
  Matrix class0, class1;
  double p_hat = 0.0;
};

// Output of any variable-selection method: distinct grid indices plus the
// relevance score each one was picked with.
struct SelectionResult {
  std::vector<int> indices;
  std::vector<double> scores;
  std::string method_id;
  std::map<std::string, double> hyperparams;
};

// Dataset CSV: header "t,<grid values...>,label"; each row holds the
// trajectory values followed by the 0/1 label. Errors carry 1-based
// row/column positions.
FunctionalDataset load_dataset(const std::string& path);
void save_dataset(const FunctionalDataset& dataset, const std::string& path);

ClassSplit split_by_class(const FunctionalDataset& dataset);

// Column gather / row subset helpers shared by selectors and the harness.
Matrix gather_columns(const Matrix& x, const std::vector<int>& indices);
FunctionalDataset subset_rows(const FunctionalDataset& dataset,
                              const std::vector<std::size_t>& rows);

}  // namespace mh
