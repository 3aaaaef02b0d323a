#include "qcmi/synthgen.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qcmi/random.hpp"

namespace qcmi {

void TimeSeries::validate() const {
  if (values.rows() < 2) throw std::invalid_argument("time series: need at least 2 steps");
  if (values.cols() < 1) throw std::invalid_argument("time series: need at least one variable");
  if (!values.allFinite()) throw std::invalid_argument("time series: values must be finite");
  if (adjacency.size() != 0 && (adjacency.rows() != values.cols() || adjacency.cols() != values.cols()))
    throw std::invalid_argument("time series: adjacency must be n x n");
  if (run_starts.empty() || run_starts.front() != 0) throw std::invalid_argument("time series: first run must start at 0");
  for (std::size_t r = 1; r < run_starts.size(); ++r) {
    if (run_starts[r] <= run_starts[r - 1] || run_starts[r] >= steps())
      throw std::invalid_argument("time series: run starts must be increasing and inside the series");
  }
}

namespace {

double wrap_unit(double v) { return v - std::floor(v); }

}  // namespace

Dataset gen_mod1(std::size_t n, int degree, double noise_width, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_mod1: N must be >= 1");
  if (degree < 1) throw std::invalid_argument("gen_mod1: degree must be >= 1");
  if (!(noise_width > 0.0 && noise_width < 1.0)) throw std::invalid_argument("gen_mod1: noise width must lie in (0, 1)");
  Rng rng(seed);
  const auto rows = static_cast<Eigen::Index>(n);
  Matrix x(rows, 1), y(rows, 1), z(rows, 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    x(i, 0) = std::pow(rng.uniform(), degree);
    z(i, 0) = std::pow(rng.uniform(), degree);
    const double w = rng.uniform(0.0, noise_width);
    y(i, 0) = wrap_unit(x(i, 0) + z(i, 0) + w);
  }
  return Dataset(std::move(x), std::move(y), std::move(z));
}

Dataset gen_beta_gaussian(std::size_t n, double alpha, double beta, double sigma, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_beta_gaussian: N must be >= 1");
  if (!(alpha > 0.0 && beta > 0.0 && sigma > 0.0))
    throw std::invalid_argument("gen_beta_gaussian: alpha, beta and sigma must be positive");
  Rng rng(seed);
  const auto rows = static_cast<Eigen::Index>(n);
  Matrix x(rows, 1), y(rows, 1), z(rows, 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    x(i, 0) = rng.beta(alpha, beta);
    z(i, 0) = rng.beta(alpha, beta);
    y(i, 0) = wrap_unit(x(i, 0) + z(i, 0) + rng.normal(0.0, sigma));
  }
  return Dataset(std::move(x), std::move(y), std::move(z));
}

Dataset inflate_zeros(const Dataset& data, std::size_t count) {
  const Eigen::Index n = data.x.rows();
  const auto extra = static_cast<Eigen::Index>(count);
  Matrix x = Matrix::Zero(n + extra, data.x.cols());
  Matrix y = Matrix::Zero(n + extra, data.y.cols());
  Matrix z = Matrix::Zero(n + extra, data.z.cols());
  x.topRows(n) = data.x;
  y.topRows(n) = data.y;
  z.topRows(n) = data.z;
  return Dataset(std::move(x), std::move(y), std::move(z));
}

BoolMatrix linear_decay_template() {
  BoolMatrix t(6, 6);
  t << 1, 0, 0, 0, 1, 0,
       1, 1, 0, 0, 0, 1,
       0, 1, 1, 0, 0, 0,
       0, 1, 0, 1, 0, 0,
       0, 0, 1, 1, 1, 0,
       1, 1, 0, 0, 0, 1;
  return t;
}

TimeSeries gen_linear_decay(std::size_t steps, double sigma, std::uint64_t seed, std::size_t runs) {
  if (steps < 2) throw std::invalid_argument("gen_linear_decay: need at least 2 steps");
  if (!(sigma > 0.0)) throw std::invalid_argument("gen_linear_decay: sigma must be positive");
  if (runs < 1) throw std::invalid_argument("gen_linear_decay: need at least one run");
  constexpr int kDriven = 6;
  constexpr int kVariables = 13;
  Rng rng(seed);

  const BoolMatrix pattern = linear_decay_template();
  Matrix a = Matrix::Zero(kDriven, kDriven);
  for (int r = 0; r < kDriven; ++r)
    for (int c = 0; c < kDriven; ++c)
      if (pattern(r, c)) a(r, c) = rng.uniform(0.75, 1.25);
  const double radius = Eigen::EigenSolver<Matrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
  a /= 5.0 * radius;

  TimeSeries series;
  const auto total = static_cast<Eigen::Index>(steps * runs);
  series.values.resize(total, kVariables);
  series.run_starts.clear();
  for (std::size_t run = 0; run < runs; ++run) {
    const auto start = static_cast<Eigen::Index>(run * steps);
    series.run_starts.push_back(static_cast<std::size_t>(start));
    for (int v = 0; v < kVariables; ++v) series.values(start, v) = rng.uniform(0.5, 2.0);
    for (Eigen::Index t = start + 1; t < start + static_cast<Eigen::Index>(steps); ++t) {
      series.values.row(t).head(kDriven) = (a * series.values.row(t - 1).head(kDriven).transpose()).transpose();
      for (int v = kDriven; v < kVariables; ++v) series.values(t, v) = rng.normal(0.0, sigma);
    }
  }
  // x_j(t) = sum_i A(j, i) x_i(t-1): i drives j iff A(j, i) != 0.
  series.adjacency = BoolMatrix::Constant(kVariables, kVariables, false);
  series.adjacency.topLeftCorner(kDriven, kDriven) = pattern.transpose();
  return series;
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& series) {
  out << 't';
  for (int v = 0; v < series.variables(); ++v) out << ",v" << v;
  out << '\n';
  std::size_t run = 0;
  for (std::size_t t = 0; t < series.steps(); ++t) {
    if (run + 1 < series.run_starts.size() && series.run_starts[run + 1] == t) ++run;
    out << t - series.run_starts[run];
    for (int v = 0; v < series.variables(); ++v) out << ',' << format_double(series.values(static_cast<Eigen::Index>(t), v));
    out << '\n';
  }
}

void write_adjacency_csv(std::ostream& out, const BoolMatrix& adjacency) {
  out << "i,j\n";
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i)
    for (Eigen::Index j = 0; j < adjacency.cols(); ++j)
      if (adjacency(i, j)) out << i << ',' << j << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
  }
  return out;
}

template <typename T>
T parse(const std::string& text, std::size_t line_no) {
  T value{};
  const char* begin = text.data();
  if (!text.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("csv line " + std::to_string(line_no) + ": cannot parse '" + text + "'");
  return value;
}

}  // namespace

TimeSeries read_timeseries_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("time series csv: missing header");
  const auto header = split(line);
  if (header.size() < 2 || header.front() != "t") throw std::invalid_argument("time series csv: header must be t,v0,..");
  const auto n = header.size() - 1;
  std::vector<std::vector<double>> rows;
  TimeSeries series;
  series.run_starts.clear();
  double prev_t = 0.0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line);
    if (fields.size() != n + 1) throw std::invalid_argument("time series csv line " + std::to_string(line_no) + ": wrong field count");
    const double t = parse<double>(fields[0], line_no);
    if (rows.empty() || !(t > prev_t)) series.run_starts.push_back(rows.size());
    prev_t = t;
    std::vector<double> row(n);
    for (std::size_t v = 0; v < n; ++v) row[v] = parse<double>(fields[v + 1], line_no);
    rows.push_back(std::move(row));
  }
  series.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t v = 0; v < n; ++v) series.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(v)) = rows[r][v];
  if (series.run_starts.empty()) series.run_starts.push_back(0);
  series.validate();
  return series;
}

BoolMatrix read_adjacency_csv(std::istream& in, int variables) {
  BoolMatrix adjacency = BoolMatrix::Constant(variables, variables, false);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("adjacency csv: missing header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line);
    if (fields.size() != 2) throw std::invalid_argument("adjacency csv line " + std::to_string(line_no) + ": expected i,j");
    const int i = parse<int>(fields[0], line_no);
    const int j = parse<int>(fields[1], line_no);
    if (i < 0 || j < 0 || i >= variables || j >= variables)
      throw std::invalid_argument("adjacency csv line " + std::to_string(line_no) + ": index out of range");
    adjacency(i, j) = true;
  }
  return adjacency;
}

}  // namespace qcmi
