#pragma once

// Rectangular least-squares collocation systems for -Laplace(u) = f with
// homogeneous Dirichlet data: the collocation matrix A, the collocation mass
// matrix M, the load vector, and the structure of A^T A.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "igalsq/collocation_points.hpp"
#include "igalsq/geometry.hpp"
#include "igalsq/sparse_matrix.hpp"
#include "igalsq/spline_core.hpp"

namespace igalsq {

/// Named manufactured problems.
///
///   zero        u = 0, f = 0.
///   polynomial  u o G = prod_i xi_i (1 - xi_i), defined through the
///               parametric coordinates so that it lies in the discrete
///               space for p >= 2 on every domain; f = -Laplace(u) is
///               evaluated through the chain rule. On the interval this is
///               u = x(1-x), f = 2.
///   sine        u = prod_i sin(pi x_i), f = d pi^2 u. Only on the interval
///               and the unit cube, where u vanishes on the boundary.
enum class ManufacturedCase { zero, polynomial, sine };

std::string_view to_string(ManufacturedCase c);
ManufacturedCase parse_manufactured_case(std::string_view name);

/// Throws DomainError if the case is not defined on the patch's domain.
void check_manufactured_case(ManufacturedCase c, DomainTag domain);

/// Exact solution at the physical point G(xi).
double manufactured_solution(ManufacturedCase c, const MapJet& jet, std::span<const double> xi);
/// Source term f at the physical point G(xi).
double manufactured_source(ManufacturedCase c, const MapJet& jet, std::span<const double> xi);

/// Source term as a function of the parametric point and the map jet there.
using SourceFunction = std::function<double(std::span<const double> xi, const MapJet& jet)>;

struct SystemMetadata {
  DomainTag domain = DomainTag::interval;
  int d = 1;
  int p = 0;
  int n = 0;  // spans per direction
  int k = 0;
  double h = 0.0;
  PointScheme scheme = PointScheme::greville;
  double factor = 1.0;  // requested oversampling, Greville only
  std::string source = "zero";
};

struct DiscreteSystem {
  CsrMatrix A;  // m_in x N_b^in, entries -Laplace(N_i) at interior points
  CsrMatrix M;  // same pattern, entries N_i
  std::vector<double> b;
  std::vector<std::size_t> interior_basis;   // column -> flat basis index
  std::vector<std::size_t> interior_points;  // row -> index into CollocationSet::points
  std::vector<std::array<double, 3>> row_points;  // parametric point of each row
  std::size_t m = 0;  // total collocation points, boundary included
  SystemMetadata meta;

  std::size_t dof() const noexcept { return A.cols; }
  std::size_t m_in() const noexcept { return A.rows; }
};

/// Flat indices of the basis functions that do not touch the boundary,
/// i.e. multi-indices with 1 <= i_dir <= N_dir - 2, in increasing order.
std::vector<std::size_t> interior_basis_indices(const NurbsSpace& space);

/// threads <= 0 uses the hardware concurrency.
/// Throws DimensionMismatchError when the space, patch and points disagree
/// on the dimension; SingularMapError propagates from the geometry.
DiscreteSystem assemble(const NurbsSpace& space, const GeometryPatch& patch, const CollocationSet& points,
                        const SourceFunction& f, int threads = 0);
DiscreteSystem assemble(const NurbsSpace& space, const GeometryPatch& patch, const CollocationSet& points,
                        ManufacturedCase f, int threads = 0);

/// Everything needed to build one system: same p, n, k in each direction.
struct Discretization {
  DomainTag domain = DomainTag::interval;
  PatchParams geometry{};
  int p = 2;
  int n = 10;
  int k = 1;
  PointScheme scheme = PointScheme::greville;
  double factor = 1.0;
  ManufacturedCase source = ManufacturedCase::zero;
};

/// Solution space of unit-weight B-splines, one KnotVector(p, n, k) per
/// direction.
NurbsSpace solution_space(const Discretization& disc);

/// Per-direction point lists for the scheme. Greville uses
/// m_dir = oversampled_count(N_dir, factor, d) points per direction, where
/// N_dir counts all basis functions of that direction: the Greville
/// abscissae of the solution knot vector when m_dir == N_dir, otherwise
/// greville_points(p, m_dir).
CollocationSet collocation_points(const Discretization& disc);

DiscreteSystem discretize(const Discretization& disc, int threads = 0);

/// Structural pattern of A^T A (no cancellation), stored row-compressed.
struct SparsityPattern {
  std::size_t size = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> columns;

  std::size_t nnz() const noexcept { return offsets.empty() ? 0 : offsets.back(); }
};

SparsityPattern normal_product_pattern(const CsrMatrix& A);

/// Occupancy image of a pattern: pixel (r, c) is 1 when the block of
/// entries it covers contains a nonzero. Side length is min(size, max_side).
struct Raster {
  std::size_t side = 0;
  std::vector<std::uint8_t> pixels;  // side * side, row-major

  std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * side + c]; }
};

Raster occupancy_raster(const SparsityPattern& pattern, std::size_t max_side = 1024);

/// Plain PGM (P2); occupied pixels are black.
void write_pgm(std::ostream& out, const Raster& raster, std::string_view comment = {});
/// One "row,col" line per structural nonzero, 0-based, with a header line.
void write_occupancy_csv(std::ostream& out, const SparsityPattern& pattern);

}  // namespace igalsq
