#include "qcmi/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qcmi {

Dataset::Dataset(Matrix x_block, Matrix y_block, Matrix z_block)
    : x(std::move(x_block)), y(std::move(y_block)), z(std::move(z_block)) {}

void Dataset::validate() const {
  if (x.cols() < 1 || y.cols() < 1 || z.cols() < 1)
    throw std::invalid_argument("dataset: X, Y and Z blocks need at least one column each");
  if (x.rows() != y.rows() || x.rows() != z.rows())
    throw std::invalid_argument("dataset: X, Y and Z blocks disagree on the number of samples");
  if (!x.allFinite() || !y.allFinite() || !z.allFinite())
    throw std::invalid_argument("dataset: entries must be finite");
}

Matrix Dataset::xz() const {
  Matrix out(x.rows(), x.cols() + z.cols());
  out << x, z;
  return out;
}

Matrix Dataset::yz() const {
  Matrix out(y.rows(), y.cols() + z.cols());
  out << y, z;
  return out;
}

Matrix Dataset::xyz() const {
  Matrix out(x.rows(), x.cols() + y.cols() + z.cols());
  out << x, y, z;
  return out;
}

std::vector<std::size_t> canonical_order(const Eigen::Ref<const Matrix>& points) {
  std::vector<std::size_t> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Eigen::Index cols = points.cols();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double va = points(static_cast<Eigen::Index>(a), c);
      const double vb = points(static_cast<Eigen::Index>(b), c);
      if (va < vb) return true;
      if (vb < va) return false;
    }
    return false;
  });
  return order;
}

Matrix permute_rows(const Eigen::Ref<const Matrix>& m, const std::vector<std::size_t>& order) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < order.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(order[r]));
  return out;
}

Dataset permute_rows(const Dataset& data, const std::vector<std::size_t>& order) {
  return Dataset(permute_rows(data.x, order), permute_rows(data.y, order), permute_rows(data.z, order));
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end)
    throw std::invalid_argument("csv line " + std::to_string(line_no) + ": cannot parse '" + text + "'");
  return value;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  std::string sep;
  for (int c = 0; c < data.dx(); ++c, sep = ",") out << sep << 'x' << c;
  for (int c = 0; c < data.dy(); ++c) out << sep << 'y' << c;
  for (int c = 0; c < data.dz(); ++c) out << sep << 'z' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < data.x.rows(); ++r) {
    sep.clear();
    for (const Matrix* block : {&data.x, &data.y, &data.z}) {
      for (Eigen::Index c = 0; c < block->cols(); ++c, sep = ",") out << sep << format_double((*block)(r, c));
    }
    out << '\n';
  }
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dataset_csv(out, data);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header");
  const auto header = split_csv_line(line);

  // column -> (block, position)
  std::vector<std::pair<int, int>> layout;
  int counts[3] = {0, 0, 0};
  for (const auto& name : header) {
    const auto block = std::string("xyz").find(name.empty() ? '?' : name.front());
    if (block == std::string::npos || name.size() < 2)
      throw std::invalid_argument("csv: unexpected column '" + name + "'");
    int pos = 0;
    const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), pos);
    if (res.ec != std::errc() || res.ptr != name.data() + name.size() || pos < 0)
      throw std::invalid_argument("csv: unexpected column '" + name + "'");
    layout.emplace_back(static_cast<int>(block), pos);
    counts[block] = std::max(counts[block], pos + 1);
  }
  std::vector<int> seen(static_cast<std::size_t>(counts[0] + counts[1] + counts[2]), 0);
  for (const auto& [block, pos] : layout) {
    const int offset = (block > 0 ? counts[0] : 0) + (block > 1 ? counts[1] : 0);
    if (seen[static_cast<std::size_t>(offset + pos)]++)
      throw std::invalid_argument("csv: duplicate column in header");
  }
  if (layout.size() != seen.size())
    throw std::invalid_argument("csv: header columns must be contiguous x0..,y0..,z0..");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != layout.size())
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(layout.size()) + " fields");
    std::vector<double> row(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) row[f] = parse_double(fields[f], line_no);
    rows.push_back(std::move(row));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix blocks[3] = {Matrix(n, counts[0]), Matrix(n, counts[1]), Matrix(n, counts[2])};
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t f = 0; f < layout.size(); ++f)
      blocks[layout[f].first](r, layout[f].second) = rows[static_cast<std::size_t>(r)][f];
  }
  Dataset data(std::move(blocks[0]), std::move(blocks[1]), std::move(blocks[2]));
  data.validate();
  return data;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_dataset_csv(in);
}

}  // namespace qcmi
