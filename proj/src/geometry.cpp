#include "igalsq/geometry.hpp"

#include <cmath>
#include <Eigen/LU>

#include "igalsq/errors.hpp"

namespace igalsq {

namespace {

constexpr double kSingularTolerance = 1e-12;

// Single rational Bezier segment of a quarter circle from (1,0) to (0,1).
constexpr std::array<std::array<double, 2>, 3> kArc = {{{1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};
const std::array<double, 3> kArcWeights = {1.0, std::sqrt(2.0) / 2.0, 1.0};

KnotVector linear_direction() { return build_knot_vector(1, 1, 0); }
KnotVector conic_direction() { return build_knot_vector(2, 1, 0); }

}  // namespace

std::string_view to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::interval: return "interval";
    case DomainTag::quarter_annulus: return "quarter_annulus";
    case DomainTag::unit_cube: return "unit_cube";
    case DomainTag::hollow_sphere_eighth: return "hollow_sphere_eighth";
  }
  return "unknown";
}

DomainTag parse_domain_tag(std::string_view name) {
  for (auto tag : {DomainTag::interval, DomainTag::quarter_annulus, DomainTag::unit_cube,
                   DomainTag::hollow_sphere_eighth})
    if (name == to_string(tag)) return tag;
  throw DomainError("unknown domain tag '" + std::string(name) + "'");
}

int domain_dimension(DomainTag tag) {
  switch (tag) {
    case DomainTag::interval: return 1;
    case DomainTag::quarter_annulus: return 2;
    case DomainTag::unit_cube:
    case DomainTag::hollow_sphere_eighth: return 3;
  }
  return 0;
}

GeometryPatch::GeometryPatch(DomainTag tag, PatchParams params, NurbsSpace space,
                             std::vector<std::array<double, 3>> control_points)
    : tag_(tag), params_(params), space_(std::move(space)), control_points_(std::move(control_points)) {
  if (control_points_.size() != space_.num_basis())
    throw DimensionMismatchError("geometry patch: control point count does not match the basis");
}

GeometryPatch make_patch(DomainTag tag, const PatchParams& params) {
  switch (tag) {
    case DomainTag::interval:
      return GeometryPatch(tag, params, NurbsSpace({linear_direction()}), {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}});

    case DomainTag::unit_cube: {
      std::vector<std::array<double, 3>> pts;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) pts.push_back({double(i), double(j), double(k)});
      return GeometryPatch(tag, params, NurbsSpace({linear_direction(), linear_direction(), linear_direction()}),
                           std::move(pts));
    }

    case DomainTag::quarter_annulus: {
      if (!(params.inner_radius > 0.0) || !(params.outer_radius > 0.0))
        throw DomainError("quarter annulus: radii must be positive");
      if (!(params.inner_radius < params.outer_radius))
        throw DomainError("quarter annulus: inner radius must be below outer radius");
      const double radii[2] = {params.inner_radius, params.outer_radius};
      std::vector<std::array<double, 3>> pts;
      std::vector<double> weights;
      for (double r : radii)
        for (int j = 0; j < 3; ++j) {
          pts.push_back({r * kArc[j][0], r * kArc[j][1], 0.0});
          weights.push_back(kArcWeights[j]);
        }
      return GeometryPatch(tag, params, NurbsSpace({linear_direction(), conic_direction()}, weights),
                           std::move(pts));
    }

    case DomainTag::hollow_sphere_eighth: {
      if (!(params.mid_radius > 0.0) || !(params.thickness > 0.0))
        throw DomainError("hollow sphere: mid radius and thickness must be positive");
      if (!(params.thickness < 2.0 * params.mid_radius))
        throw DomainError("hollow sphere: thickness must be below twice the mid radius");
      const double radii[2] = {params.mid_radius - 0.5 * params.thickness,
                               params.mid_radius + 0.5 * params.thickness};
      // Meridian from the pole to the equator in (rho, z); revolved about z.
      constexpr std::array<std::array<double, 2>, 3> meridian = {{{0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}}};
      std::vector<std::array<double, 3>> pts;
      std::vector<double> weights;
      for (double r : radii)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const double rho = meridian[i][0];
            pts.push_back({r * rho * kArc[j][0], r * rho * kArc[j][1], r * meridian[i][1]});
            weights.push_back(kArcWeights[i] * kArcWeights[j]);
          }
      return GeometryPatch(tag, params,
                           NurbsSpace({linear_direction(), conic_direction(), conic_direction()}, weights),
                           std::move(pts));
    }
  }
  throw DomainError("make_patch: unknown domain tag");
}

MapJet eval_map_unchecked(const GeometryPatch& patch, std::span<const double> xi) {
  const int d = patch.dim();
  const BasisEval e = eval_nurbs(patch.space(), xi, 2);
  const auto cps = patch.control_points();

  MapJet jet;
  jet.x = SmallVector::Zero(d);
  jet.jacobian = SmallMatrix::Zero(d, d);
  for (int c = 0; c < d; ++c) jet.hessian[c] = SmallMatrix::Zero(d, d);

  for (std::size_t a = 0; a < e.size(); ++a) {
    const auto& P = cps[e.indices[a]];
    for (int c = 0; c < d; ++c) {
      jet.x(c) += P[c] * e.values[a];
      for (int i = 0; i < d; ++i) {
        jet.jacobian(c, i) += P[c] * e.gradient(a, i);
        for (int j = 0; j < d; ++j) jet.hessian[c](i, j) += P[c] * e.hessian(a, i, j);
      }
    }
  }
  return jet;
}

MapJet eval_map(const GeometryPatch& patch, std::span<const double> xi) {
  MapJet jet = eval_map_unchecked(patch, xi);
  if (!(std::abs(jet.det()) >= kSingularTolerance))
    throw SingularMapError("geometric map is singular at the requested parametric point");
  return jet;
}

double physical_laplacian(const MapJet& jet, std::span<const double> grad_xi, std::span<const double> hess_xi) {
  const int d = jet.dim();
  if (!(std::abs(jet.det()) >= kSingularTolerance))
    throw SingularMapError("physical_laplacian: singular Jacobian");
  const SmallMatrix jt = jet.jacobian.transpose();
  const Eigen::PartialPivLU<SmallMatrix> lu_t(jt);

  SmallVector g(d);
  SmallMatrix H(d, d);
  for (int i = 0; i < d; ++i) {
    g(i) = grad_xi[i];
    for (int j = 0; j < d; ++j) H(i, j) = hess_xi[i * d + j];
  }
  // grad_x = J^{-T} g
  const SmallVector grad_x = lu_t.solve(g);
  SmallMatrix inner = H;
  for (int c = 0; c < d; ++c) inner -= grad_x(c) * jet.hessian[c];
  // H_x = J^{-T} inner J^{-1}
  const SmallMatrix left = lu_t.solve(inner);
  const SmallMatrix hx = lu_t.solve(SmallMatrix(left.transpose())).transpose();
  return hx.trace();
}

LaplacianOperator::LaplacianOperator(const MapJet& jet) : dim_(jet.dim()) {
  const int d = dim_;
  if (!(std::abs(jet.det()) >= kSingularTolerance))
    throw SingularMapError("LaplacianOperator: singular Jacobian");
  const SmallMatrix K = jet.jacobian.inverse();
  const SmallMatrix G = K * K.transpose();
  SmallVector t(d);
  for (int c = 0; c < d; ++c) t(c) = jet.hessian[c].cwiseProduct(G).sum();
  const SmallVector q = K * t;
  for (int i = 0; i < d; ++i) {
    drift_[i] = q(i);
    for (int j = 0; j < d; ++j) metric_[i * d + j] = G(i, j);
  }
}

double LaplacianOperator::apply(std::span<const double> grad_xi, std::span<const double> hess_xi) const {
  double out = 0.0;
  for (int q = 0; q < dim_ * dim_; ++q) out += hess_xi[q] * metric_[q];
  for (int i = 0; i < dim_; ++i) out -= grad_xi[i] * drift_[i];
  return out;
}

}  // namespace igalsq
