#include "igalsq/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "igalsq/errors.hpp"
#include "parallel.hpp"

namespace igalsq {

std::string_view to_string(ManufacturedCase c) {
  switch (c) {
    case ManufacturedCase::zero: return "zero";
    case ManufacturedCase::polynomial: return "polynomial";
    case ManufacturedCase::sine: return "sine";
  }
  return "unknown";
}

ManufacturedCase parse_manufactured_case(std::string_view name) {
  for (auto c : {ManufacturedCase::zero, ManufacturedCase::polynomial, ManufacturedCase::sine})
    if (name == to_string(c)) return c;
  throw DomainError("unknown manufactured case '" + std::string(name) + "' (expected zero, polynomial or sine)");
}

void check_manufactured_case(ManufacturedCase c, DomainTag domain) {
  if (c == ManufacturedCase::sine && domain != DomainTag::interval && domain != DomainTag::unit_cube)
    throw DomainError("manufactured case 'sine' is only defined on the interval and the unit cube");
}

namespace {

// Value, gradient and row-major Hessian of prod_i xi_i (1 - xi_i).
void bubble_jet(std::span<const double> xi, double& value, double* grad, double* hess) {
  const int d = static_cast<int>(xi.size());
  double f[3], df[3];
  for (int i = 0; i < d; ++i) {
    f[i] = xi[i] * (1.0 - xi[i]);
    df[i] = 1.0 - 2.0 * xi[i];
  }
  auto prod_except = [&](int a, int b) {
    double r = 1.0;
    for (int i = 0; i < d; ++i)
      if (i != a && i != b) r *= f[i];
    return r;
  };
  value = prod_except(-1, -1);
  for (int i = 0; i < d; ++i) {
    grad[i] = df[i] * prod_except(i, -1);
    for (int j = 0; j < d; ++j)
      hess[i * d + j] = i == j ? -2.0 * prod_except(i, -1) : df[i] * df[j] * prod_except(i, j);
  }
}

}  // namespace

double manufactured_solution(ManufacturedCase c, const MapJet& jet, std::span<const double> xi) {
  switch (c) {
    case ManufacturedCase::zero: return 0.0;
    case ManufacturedCase::polynomial: {
      double v, g[3], h[9];
      bubble_jet(xi, v, g, h);
      return v;
    }
    case ManufacturedCase::sine: {
      double u = 1.0;
      for (int i = 0; i < jet.dim(); ++i) u *= std::sin(std::numbers::pi * jet.x[i]);
      return u;
    }
  }
  return 0.0;
}

double manufactured_source(ManufacturedCase c, const MapJet& jet, std::span<const double> xi) {
  switch (c) {
    case ManufacturedCase::zero: return 0.0;
    case ManufacturedCase::polynomial: {
      const int d = static_cast<int>(xi.size());
      double v, g[3], h[9];
      bubble_jet(xi, v, g, h);
      return -physical_laplacian(jet, std::span<const double>(g, d), std::span<const double>(h, d * d));
    }
    case ManufacturedCase::sine:
      return jet.dim() * std::numbers::pi * std::numbers::pi * manufactured_solution(c, jet, xi);
  }
  return 0.0;
}

std::vector<std::size_t> interior_basis_indices(const NurbsSpace& space) {
  std::vector<std::size_t> out;
  for (std::size_t flat = 0; flat < space.num_basis(); ++flat) {
    const auto multi = space.multi_index(flat);
    bool inner = true;
    for (int i = 0; i < space.dim(); ++i) inner = inner && multi[i] >= 1 && multi[i] <= space.num_basis(i) - 2;
    if (inner) out.push_back(flat);
  }
  return out;
}

DiscreteSystem assemble(const NurbsSpace& space, const GeometryPatch& patch, const CollocationSet& points,
                        const SourceFunction& f, int threads) {
  const int d = space.dim();
  if (patch.dim() != d || points.dim != d)
    throw DimensionMismatchError("assemble: space (d=" + std::to_string(d) + "), patch (d=" +
                                 std::to_string(patch.dim()) + ") and points (d=" + std::to_string(points.dim) +
                                 ") must share the dimension");

  DiscreteSystem sys;
  sys.interior_basis = interior_basis_indices(space);
  sys.interior_points = points.interior;
  sys.m = points.m();
  sys.meta.domain = patch.tag();
  sys.meta.d = d;
  sys.meta.p = space.direction(0).degree();
  sys.meta.n = space.direction(0).num_spans();
  sys.meta.k = space.direction(0).regularity();
  sys.meta.h = space.direction(0).mesh_size();
  sys.meta.scheme = points.scheme;

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> column_of(space.num_basis(), kNone);
  for (std::size_t c = 0; c < sys.interior_basis.size(); ++c) column_of[sys.interior_basis[c]] = c;

  const std::size_t rows = points.interior.size();
  struct RowBuffer {
    std::vector<std::size_t> cols;
    std::vector<double> a, m;
    double b = 0.0;
  };
  std::vector<RowBuffer> buffers(rows);

  detail::parallel_for(rows, threads, [&](std::size_t r) {
    const auto& pt = points.points[points.interior[r]];
    const std::span<const double> xi(pt.data(), d);
    const BasisEval basis = eval_nurbs(space, xi, 2);
    const MapJet jet = eval_map(patch, xi);
    const LaplacianOperator lap(jet);
    RowBuffer& buf = buffers[r];
    for (std::size_t a = 0; a < basis.size(); ++a) {
      const std::size_t c = column_of[basis.indices[a]];
      if (c == kNone) continue;
      buf.cols.push_back(c);
      buf.a.push_back(-lap.apply(std::span<const double>(&basis.gradients[a * d], d),
                                 std::span<const double>(&basis.hessians[a * d * d], d * d)));
      buf.m.push_back(basis.values[a]);
    }
    buf.b = f(xi, jet);
  });

  for (CsrMatrix* mat : {&sys.A, &sys.M}) {
    mat->rows = rows;
    mat->cols = sys.interior_basis.size();
    mat->offsets.assign(1, 0);
  }
  sys.b.resize(rows);
  sys.row_points.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const RowBuffer& buf = buffers[r];
    sys.A.columns.insert(sys.A.columns.end(), buf.cols.begin(), buf.cols.end());
    sys.A.values.insert(sys.A.values.end(), buf.a.begin(), buf.a.end());
    sys.M.values.insert(sys.M.values.end(), buf.m.begin(), buf.m.end());
    sys.A.offsets.push_back(sys.A.columns.size());
    sys.b[r] = buf.b;
    sys.row_points[r] = points.points[points.interior[r]];
  }
  sys.M.columns = sys.A.columns;
  sys.M.offsets = sys.A.offsets;
  return sys;
}

DiscreteSystem assemble(const NurbsSpace& space, const GeometryPatch& patch, const CollocationSet& points,
                        ManufacturedCase f, int threads) {
  check_manufactured_case(f, patch.tag());
  auto sys = assemble(
      space, patch, points,
      [f](std::span<const double> xi, const MapJet& jet) { return manufactured_source(f, jet, xi); }, threads);
  sys.meta.source = std::string(to_string(f));
  return sys;
}

NurbsSpace solution_space(const Discretization& disc) {
  const int d = domain_dimension(disc.domain);
  return NurbsSpace(std::vector<KnotVector>(d, KnotVector(disc.p, disc.n, disc.k)));
}

CollocationSet collocation_points(const Discretization& disc) {
  const int d = domain_dimension(disc.domain);
  const KnotVector kv(disc.p, disc.n, disc.k);
  std::vector<double> dir;
  switch (disc.scheme) {
    case PointScheme::greville: {
      const int m_dir = oversampled_count(kv.num_basis(), disc.factor, d);
      // The square case is classical collocation at the solution space's own
      // Greville abscissae; for k < p-1 the auxiliary C^{p-1} set of the same
      // size can violate Schoenberg-Whitney and give a singular matrix.
      dir = m_dir == kv.num_basis() ? greville_abscissae(kv) : greville_points(disc.p, m_dir);
      break;
    }
    case PointScheme::sc: dir = sc_points(disc.p, kv); break;
    case PointScheme::cg: dir = cg_points(disc.p, kv); break;
  }
  return tensorize(std::vector<std::vector<double>>(d, dir), disc.scheme);
}

DiscreteSystem discretize(const Discretization& disc, int threads) {
  const auto patch = make_patch(disc.domain, disc.geometry);
  check_manufactured_case(disc.source, disc.domain);
  auto sys = assemble(solution_space(disc), patch, collocation_points(disc), disc.source, threads);
  sys.meta.factor = disc.factor;
  return sys;
}

SparsityPattern normal_product_pattern(const CsrMatrix& A) {
  const CsrMatrix At = A.transposed();
  SparsityPattern pat;
  pat.size = A.cols;
  pat.offsets.assign(1, 0);
  std::vector<std::size_t> marker(A.cols, static_cast<std::size_t>(-1));
  std::vector<std::size_t> row;
  for (std::size_t i = 0; i < A.cols; ++i) {
    row.clear();
    for (std::size_t q = At.offsets[i]; q < At.offsets[i + 1]; ++q) {
      const std::size_t r = At.columns[q];
      for (std::size_t s = A.offsets[r]; s < A.offsets[r + 1]; ++s) {
        const std::size_t j = A.columns[s];
        if (marker[j] != i) {
          marker[j] = i;
          row.push_back(j);
        }
      }
    }
    std::sort(row.begin(), row.end());
    pat.columns.insert(pat.columns.end(), row.begin(), row.end());
    pat.offsets.push_back(pat.columns.size());
  }
  return pat;
}

Raster occupancy_raster(const SparsityPattern& pattern, std::size_t max_side) {
  Raster r;
  r.side = std::min(pattern.size, std::max<std::size_t>(max_side, 1));
  r.pixels.assign(r.side * r.side, 0);
  if (r.side == 0) return r;
  auto pixel = [&](std::size_t i) { return i * r.side / pattern.size; };
  for (std::size_t i = 0; i < pattern.size; ++i)
    for (std::size_t q = pattern.offsets[i]; q < pattern.offsets[i + 1]; ++q)
      r.pixels[pixel(i) * r.side + pixel(pattern.columns[q])] = 1;
  return r;
}

void write_pgm(std::ostream& out, const Raster& raster, std::string_view comment) {
  out << "P2\n";
  if (!comment.empty()) {
    std::size_t start = 0;
    while (start <= comment.size()) {
      const std::size_t end = std::min(comment.find('\n', start), comment.size());
      out << "# " << comment.substr(start, end - start) << '\n';
      start = end + 1;
    }
  }
  out << raster.side << ' ' << raster.side << "\n1\n";
  for (std::size_t r = 0; r < raster.side; ++r) {
    for (std::size_t c = 0; c < raster.side; ++c) out << (c ? " " : "") << (raster.at(r, c) ? 0 : 1);
    out << '\n';
  }
}

void write_occupancy_csv(std::ostream& out, const SparsityPattern& pattern) {
  out << "row,col\n";
  for (std::size_t i = 0; i < pattern.size; ++i)
    for (std::size_t q = pattern.offsets[i]; q < pattern.offsets[i + 1]; ++q)
      out << i << ',' << pattern.columns[q] << '\n';
}

}  // namespace igalsq
