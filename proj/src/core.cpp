#include "maxhunt/core.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mh {

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || s.empty()) {
    throw Error("not a number: '" + s + "'");
  }
  return v;
}

void Grid::validate() const {
  if (points.size() < 2) throw Error("grid needs at least 2 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < 0.0 || points[i] > 1.0) {
      throw Error("grid point " + std::to_string(i + 1) + " outside [0,1]: " +
                  format_double(points[i]));
    }
    if (i > 0 && points[i] <= points[i - 1]) {
      throw Error("grid not strictly increasing at point " + std::to_string(i + 1));
    }
  }
}

std::size_t FunctionalDataset::count(int label) const {
  std::size_t c = 0;
  for (int l : labels) c += (l == label);
  return c;
}

void FunctionalDataset::validate() const {
  grid.validate();
  if (x.rows == 0) throw Error("dataset has no rows");
  if (x.cols != grid.size()) {
    throw Error("trajectory width " + std::to_string(x.cols) +
                " does not match grid length " + std::to_string(grid.size()));
  }
  if (labels.size() != x.rows) {
    throw Error("label count " + std::to_string(labels.size()) +
                " does not match row count " + std::to_string(x.rows));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error("row " + std::to_string(i + 1) + ": label outside {0,1}");
    }
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

FunctionalDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "t" || header.back() != "label") {
    throw Error(path + ": malformed header, expected 't,<grid...>,label'");
  }

  FunctionalDataset ds;
  const std::size_t width = header.size() - 2;
  ds.grid.points.reserve(width);
  for (std::size_t j = 1; j + 1 < header.size(); ++j) {
    double t;
    try {
      t = parse_double(header[j]);
    } catch (const Error&) {
      throw Error(path + ": header column " + std::to_string(j + 1) +
                  ": non-numeric grid value '" + header[j] + "'");
    }
    if (!ds.grid.points.empty() && t <= ds.grid.points.back()) {
      throw Error(path + ": header column " + std::to_string(j + 1) +
                  ": grid not strictly increasing");
    }
    ds.grid.points.push_back(t);
  }
  ds.grid.validate();

  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    auto cells = split_csv_line(line);
    if (cells.size() != width + 1) {
      throw Error(path + ": row " + std::to_string(row) + ": expected " +
                  std::to_string(width + 1) + " cells, found " +
                  std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < width; ++j) {
      try {
        values.push_back(parse_double(cells[j]));
      } catch (const Error&) {
        throw Error(path + ": row " + std::to_string(row) + ", column " +
                    std::to_string(j + 1) + ": non-numeric cell '" + cells[j] + "'");
      }
    }
    const std::string& lab = cells[width];
    if (lab == "0") {
      ds.labels.push_back(0);
    } else if (lab == "1") {
      ds.labels.push_back(1);
    } else {
      throw Error(path + ": row " + std::to_string(row) + ", column " +
                  std::to_string(width + 1) + ": label outside {0,1}: '" + lab + "'");
    }
  }
  if (row == 0) throw Error(path + ": no data rows");
  ds.x.rows = row;
  ds.x.cols = width;
  ds.x.data = std::move(values);
  ds.validate();
  return ds;
}

void save_dataset(const FunctionalDataset& dataset, const std::string& path) {
  dataset.validate();
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset file: " + path);
  out << "t";
  for (double t : dataset.grid.points) out << ',' << format_double(t);
  out << ",label\n";
  for (std::size_t i = 0; i < dataset.n(); ++i) {
    const double* r = dataset.x.row(i);
    for (std::size_t j = 0; j < dataset.width(); ++j) {
      if (j) out << ',';
      out << format_double(r[j]);
    }
    out << ',' << dataset.labels[i] << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

ClassSplit split_by_class(const FunctionalDataset& dataset) {
  dataset.validate();
  ClassSplit split;
  for (std::size_t i = 0; i < dataset.n(); ++i) {
    (dataset.labels[i] == 0 ? split.idx0 : split.idx1).push_back(i);
  }
  const std::size_t width = dataset.width();
  split.class0 = Matrix(split.idx0.size(), width);
  split.class1 = Matrix(split.idx1.size(), width);
  for (std::size_t i = 0; i < split.idx0.size(); ++i) {
    const double* src = dataset.x.row(split.idx0[i]);
    std::copy(src, src + width, split.class0.row(i));
  }
  for (std::size_t i = 0; i < split.idx1.size(); ++i) {
    const double* src = dataset.x.row(split.idx1[i]);
    std::copy(src, src + width, split.class1.row(i));
  }
  split.p_hat = static_cast<double>(split.idx1.size()) / dataset.n();
  return split;
}

Matrix gather_columns(const Matrix& x, const std::vector<int>& indices) {
  for (int j : indices) {
    if (j < 0 || static_cast<std::size_t>(j) >= x.cols) {
      throw Error("column index out of range: " + std::to_string(j));
    }
  }
  Matrix out(x.rows, indices.size());
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double* src = x.row(i);
    double* dst = out.row(i);
    for (std::size_t j = 0; j < indices.size(); ++j) dst[j] = src[indices[j]];
  }
  return out;
}

FunctionalDataset subset_rows(const FunctionalDataset& dataset,
                              const std::vector<std::size_t>& rows) {
  FunctionalDataset out;
  out.grid = dataset.grid;
  out.x = Matrix(rows.size(), dataset.width());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= dataset.n()) throw Error("row index out of range");
    const double* src = dataset.x.row(rows[i]);
    std::copy(src, src + dataset.width(), out.x.row(i));
    out.labels.push_back(dataset.labels[rows[i]]);
  }
  return out;
}

}  // namespace mh
