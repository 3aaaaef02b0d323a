#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qcmi/dataset.hpp"
#include "qcmi/density.hpp"

namespace qcmi {

enum class PotentialKind { Uniform, Gaussian, ProductMarginal, Factual, CustomGrid };

std::string_view to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(std::string_view name);

/// Axis-aligned box over the (X, Z) coordinates, X dimensions first.
struct Box {
  Vector lo;
  Vector hi;
};

/// Piecewise-constant density tabulated at the centers of a regular grid.
struct DensityGrid {
  Box bounds;
  std::vector<int> cells;      // cells per dimension
  std::vector<double> values;  // row-major, last dimension fastest

  double operator()(const Eigen::Ref<const Vector>& point) const;
};

/// Reads a grid from CSV: a `# bounds: lo0 hi0 lo1 hi1 ...` line, a header
/// `c0,..,c{d-1},density`, then one row per cell center.
DensityGrid read_density_grid(std::istream& in);
DensityGrid read_density_grid(const std::string& path);

/// Kind-specific inputs for make_potential. Unset fields take defaults.
struct PotentialParams {
  std::optional<Box> bounds;           // uniform
  std::optional<Vector> mean;          // gaussian, defaults to 0
  std::optional<Vector> stddev;        // gaussian, defaults to 1
  std::optional<double> bandwidth;     // factual: joint KDE bandwidth override
  std::optional<DensityGrid> grid;     // custom-grid
};

/// A replacement density q over the (X, Z) subspace.
class Potential {
 public:
  struct Uniform {
    Box bounds;
    double inv_volume;
  };
  struct Gaussian {
    Vector mean;
    Vector stddev;
  };
  struct ProductMarginal {
    std::shared_ptr<const KdeModel> x_model;
    std::shared_ptr<const KdeModel> z_model;
  };
  struct Factual {
    std::shared_ptr<const KdeModel> model;
  };
  using Spec = std::variant<Uniform, Gaussian, ProductMarginal, Factual, DensityGrid>;

  Potential(int dx, int dz, Spec spec);

  PotentialKind kind() const;
  int dx() const { return dx_; }
  int dz() const { return dz_; }
  const Spec& spec() const { return spec_; }

  /// q(x, z) at a point given as the concatenation [x z].
  double density(const Eigen::Ref<const Vector>& xz) const;
  double density(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) const;

  /// True when q has bounded support (uniform, custom-grid).
  bool bounded() const;

 private:
  int dx_;
  int dz_;
  Spec spec_;
};

/// Builds a potential of the given kind. Uniform bounds default to the
/// empirical per-dimension range of (X, Z); product-marginal and factual fit
/// KDEs to `data`.
Potential make_potential(PotentialKind kind, const Dataset& data, const PotentialParams& params = {});

/// Uniform potential over an explicit box.
Potential make_uniform_potential(int dx, int dz, Box bounds);

/// Bandwidth for a d-dimensional marginal KDE: 0.5 * N^(-1 / (2 d + 3)).
double marginal_bandwidth(std::size_t n, int d);

double potential_density(const Potential& q, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z);

}  // namespace qcmi
