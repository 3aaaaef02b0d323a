#include "qcmi/potentials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qcmi {

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Uniform: return "uniform";
    case PotentialKind::Gaussian: return "gaussian";
    case PotentialKind::ProductMarginal: return "product";
    case PotentialKind::Factual: return "factual";
    case PotentialKind::CustomGrid: return "custom-grid";
  }
  return "?";
}

PotentialKind potential_kind_from_string(std::string_view name) {
  if (name == "uniform") return PotentialKind::Uniform;
  if (name == "gaussian") return PotentialKind::Gaussian;
  if (name == "product" || name == "product-marginal") return PotentialKind::ProductMarginal;
  if (name == "factual") return PotentialKind::Factual;
  if (name == "custom-grid" || name == "grid") return PotentialKind::CustomGrid;
  throw std::invalid_argument("unknown potential kind '" + std::string(name) + "'");
}

namespace {

void check_box(const Box& box, Eigen::Index dim) {
  if (box.lo.size() != dim || box.hi.size() != dim)
    throw std::invalid_argument("potential bounds: expected " + std::to_string(dim) + " dimensions");
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (!std::isfinite(box.lo(c)) || !std::isfinite(box.hi(c)))
      throw std::invalid_argument("potential bounds must be finite");
    if (!(box.hi(c) > box.lo(c)))
      throw std::invalid_argument("potential bounds: degenerate or unordered range in dimension " + std::to_string(c));
  }
}

bool inside(const Box& box, const Eigen::Ref<const Vector>& p) {
  return (p.array() >= box.lo.array()).all() && (p.array() <= box.hi.array()).all();
}

double parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("grid csv: cannot parse '" + std::string(text) + "'");
  return value;
}

int cell_of(double v, double lo, double hi, int cells) {
  const int c = static_cast<int>(std::floor((v - lo) / (hi - lo) * cells));
  return std::clamp(c, 0, cells - 1);
}

}  // namespace

double DensityGrid::operator()(const Eigen::Ref<const Vector>& point) const {
  if (point.size() != bounds.lo.size()) throw std::invalid_argument("grid: query dimension mismatch");
  if (!inside(bounds, point)) return 0.0;
  std::size_t flat = 0;
  for (Eigen::Index c = 0; c < point.size(); ++c) {
    const int n = cells[static_cast<std::size_t>(c)];
    flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(cell_of(point(c), bounds.lo(c), bounds.hi(c), n));
  }
  return values[flat];
}

DensityGrid read_density_grid(std::istream& in) {
  std::string line;
  Box box;
  std::vector<double> bound_values;
  while (std::getline(in, line)) {
    if (line.rfind("# bounds:", 0) == 0) {
      std::istringstream ss(line.substr(9));
      double v = 0.0;
      while (ss >> v) bound_values.push_back(v);
      continue;
    }
    if (!line.empty() && line.front() == '#') continue;
    break;  // header
  }
  if (bound_values.empty() || bound_values.size() % 2 != 0)
    throw std::invalid_argument("grid csv: missing or malformed '# bounds:' line");
  const auto d = static_cast<Eigen::Index>(bound_values.size() / 2);
  box.lo.resize(d);
  box.hi.resize(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    box.lo(c) = bound_values[static_cast<std::size_t>(2 * c)];
    box.hi(c) = bound_values[static_cast<std::size_t>(2 * c + 1)];
  }
  check_box(box, d);

  const auto columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns != d + 1) throw std::invalid_argument("grid csv: header must have d coordinate columns plus density");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_number(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (static_cast<Eigen::Index>(row.size()) != d + 1) throw std::invalid_argument("grid csv: wrong field count");
    if (row.back() < 0.0 || !std::isfinite(row.back())) throw std::invalid_argument("grid csv: densities must be finite and >= 0");
    rows.push_back(std::move(row));
  }

  DensityGrid grid;
  grid.bounds = box;
  for (Eigen::Index c = 0; c < d; ++c) {
    std::vector<double> centers;
    for (const auto& row : rows) centers.push_back(row[static_cast<std::size_t>(c)]);
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
    grid.cells.push_back(static_cast<int>(centers.size()));
  }
  std::size_t total = 1;
  for (const int n : grid.cells) total *= static_cast<std::size_t>(n);
  if (total != rows.size()) throw std::invalid_argument("grid csv: rows do not form a complete regular grid");
  grid.values.assign(total, -1.0);
  for (const auto& row : rows) {
    std::size_t flat = 0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const int n = grid.cells[static_cast<std::size_t>(c)];
      flat = flat * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(cell_of(row[static_cast<std::size_t>(c)], box.lo(c), box.hi(c), n));
    }
    if (grid.values[flat] >= 0.0) throw std::invalid_argument("grid csv: two rows map to the same cell");
    grid.values[flat] = row.back();
  }
  return grid;
}

DensityGrid read_density_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_density_grid(in);
}

Potential::Potential(int dx, int dz, Spec spec) : dx_(dx), dz_(dz), spec_(std::move(spec)) {
  if (dx < 1 || dz < 1) throw std::invalid_argument("Potential: dimensions must be >= 1");
  const Eigen::Index d = dx + dz;
  if (auto* u = std::get_if<Uniform>(&spec_)) {
    check_box(u->bounds, d);
  } else if (auto* g = std::get_if<Gaussian>(&spec_)) {
    if (g->mean.size() != d || g->stddev.size() != d)
      throw std::invalid_argument("gaussian potential: mean and stddev need " + std::to_string(d) + " entries");
    if (!(g->stddev.array() > 0.0).all() || !g->stddev.allFinite() || !g->mean.allFinite())
      throw std::invalid_argument("gaussian potential: stddev must be positive and finite");
  } else if (auto* p = std::get_if<ProductMarginal>(&spec_)) {
    if (!p->x_model || !p->z_model || p->x_model->dim() != dx || p->z_model->dim() != dz)
      throw std::invalid_argument("product potential: marginal models do not match dimensions");
  } else if (auto* f = std::get_if<Factual>(&spec_)) {
    if (!f->model || f->model->dim() != d) throw std::invalid_argument("factual potential: model dimension mismatch");
  } else if (auto* grid = std::get_if<DensityGrid>(&spec_)) {
    check_box(grid->bounds, d);
  }
}

PotentialKind Potential::kind() const {
  switch (spec_.index()) {
    case 0: return PotentialKind::Uniform;
    case 1: return PotentialKind::Gaussian;
    case 2: return PotentialKind::ProductMarginal;
    case 3: return PotentialKind::Factual;
    default: return PotentialKind::CustomGrid;
  }
}

bool Potential::bounded() const {
  return kind() == PotentialKind::Uniform || kind() == PotentialKind::CustomGrid;
}

double Potential::density(const Eigen::Ref<const Vector>& xz) const {
  if (xz.size() != dx_ + dz_) throw std::invalid_argument("potential: point dimension mismatch");
  struct Visitor {
    const Eigen::Ref<const Vector>& p;
    int dx;
    double operator()(const Uniform& u) const { return inside(u.bounds, p) ? u.inv_volume : 0.0; }
    double operator()(const Gaussian& g) const {
      const Eigen::ArrayXd u = (p - g.mean).array() / g.stddev.array();
      const double log_q = -0.5 * u.square().sum() - g.stddev.array().log().sum() -
                           0.5 * static_cast<double>(p.size()) * std::log(2.0 * std::numbers::pi);
      return std::exp(log_q);
    }
    double operator()(const ProductMarginal& m) const {
      return m.x_model->density(p.head(dx)) * m.z_model->density(p.tail(p.size() - dx));
    }
    double operator()(const Factual& f) const { return f.model->density(p); }
    double operator()(const DensityGrid& g) const { return g(p); }
  };
  return std::visit(Visitor{xz, dx_}, spec_);
}

double Potential::density(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) const {
  if (x.size() != dx_ || z.size() != dz_) throw std::invalid_argument("potential: point dimension mismatch");
  Vector xz(dx_ + dz_);
  xz << x, z;
  return density(xz);
}

double potential_density(const Potential& q, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) {
  return q.density(x, z);
}

double marginal_bandwidth(std::size_t n, int d) {
  if (n < 2) throw std::invalid_argument("marginal_bandwidth: need at least 2 samples");
  return 0.5 * std::pow(static_cast<double>(n), -1.0 / (2.0 * d + 3.0));
}

Potential make_uniform_potential(int dx, int dz, Box bounds) {
  check_box(bounds, dx + dz);
  const double volume = (bounds.hi - bounds.lo).prod();
  return Potential(dx, dz, Potential::Uniform{std::move(bounds), 1.0 / volume});
}

Potential make_potential(PotentialKind kind, const Dataset& data, const PotentialParams& params) {
  const int dx = data.dx();
  const int dz = data.dz();
  const Eigen::Index d = dx + dz;
  const bool needs_data = kind == PotentialKind::ProductMarginal || kind == PotentialKind::Factual ||
                          (kind == PotentialKind::Uniform && !params.bounds);
  if (needs_data) {
    if (data.size() == 0) throw std::invalid_argument("potential '" + std::string(to_string(kind)) + "' needs a non-empty dataset");
    data.validate();
  }
  switch (kind) {
    case PotentialKind::Uniform: {
      if (params.bounds) return make_uniform_potential(dx, dz, *params.bounds);
      const Matrix xz = data.xz();
      return make_uniform_potential(dx, dz, Box{xz.colwise().minCoeff().transpose(), xz.colwise().maxCoeff().transpose()});
    }
    case PotentialKind::Gaussian: {
      Vector mean = params.mean.value_or(Vector::Zero(d));
      Vector sd = params.stddev.value_or(Vector::Ones(d));
      return Potential(dx, dz, Potential::Gaussian{std::move(mean), std::move(sd)});
    }
    case PotentialKind::ProductMarginal: {
      if (data.size() < 2) throw std::invalid_argument("product potential needs at least 2 samples");
      auto xm = std::make_shared<const KdeModel>(data.x, marginal_bandwidth(data.size(), dx));
      auto zm = std::make_shared<const KdeModel>(data.z, marginal_bandwidth(data.size(), dz));
      return Potential(dx, dz, Potential::ProductMarginal{std::move(xm), std::move(zm)});
    }
    case PotentialKind::Factual: {
      if (data.size() < 2) throw std::invalid_argument("factual potential needs at least 2 samples");
      const double h = params.bandwidth.value_or(bandwidth_rule(data.size(), dx, dz));
      return Potential(dx, dz, Potential::Factual{std::make_shared<const KdeModel>(data.xz(), h)});
    }
    case PotentialKind::CustomGrid: {
      if (!params.grid) throw std::invalid_argument("custom-grid potential needs a density grid");
      return Potential(dx, dz, *params.grid);
    }
  }
  throw std::invalid_argument("unknown potential kind");
}

}  // namespace qcmi
