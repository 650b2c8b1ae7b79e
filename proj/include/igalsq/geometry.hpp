#pragma once

// Fixed NURBS maps G: [0,1]^d -> Omega for the benchmark domains, and the
// chain rule that turns parametric basis derivatives into a physical
// Laplacian.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "igalsq/spline_core.hpp"

namespace igalsq {

enum class DomainTag { interval, quarter_annulus, unit_cube, hollow_sphere_eighth };

std::string_view to_string(DomainTag tag);
DomainTag parse_domain_tag(std::string_view name);
int domain_dimension(DomainTag tag);

struct PatchParams {
  double inner_radius = 1.0;  // quarter annulus
  double outer_radius = 2.0;
  double mid_radius = 10.0;   // hollow sphere
  double thickness = 0.04;
};

using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Point, Jacobian and per-coordinate Hessians of G at one parametric point.
struct MapJet {
  SmallVector x;                    // G(xi)
  SmallMatrix jacobian;             // J(c, a) = d x_c / d xi_a
  std::array<SmallMatrix, 3> hessian;  // hessian[c](a, b) = d^2 x_c / d xi_a d xi_b

  int dim() const noexcept { return static_cast<int>(x.size()); }
  double det() const { return jacobian.determinant(); }
};

class GeometryPatch {
 public:
  GeometryPatch(DomainTag tag, PatchParams params, NurbsSpace space,
                std::vector<std::array<double, 3>> control_points);

  DomainTag tag() const noexcept { return tag_; }
  const PatchParams& params() const noexcept { return params_; }
  const NurbsSpace& space() const noexcept { return space_; }
  int dim() const noexcept { return space_.dim(); }
  std::span<const std::array<double, 3>> control_points() const noexcept { return control_points_; }

 private:
  DomainTag tag_;
  PatchParams params_;
  NurbsSpace space_;
  std::vector<std::array<double, 3>> control_points_;
};

/// Builds one of the benchmark patches. Throws DomainError on nonpositive
/// radii, inner >= outer radius, or thickness >= 2 * mid radius.
///
/// Parametric directions:
///   quarter_annulus       (radial, angular)
///   hollow_sphere_eighth  (through-thickness, polar, azimuthal)
GeometryPatch make_patch(DomainTag tag, const PatchParams& params = {});

/// Throws SingularMapError when |det J| < 1e-12.
MapJet eval_map(const GeometryPatch& patch, std::span<const double> xi);

/// Same as eval_map without the determinant check.
MapJet eval_map_unchecked(const GeometryPatch& patch, std::span<const double> xi);

/// Laplacian in physical coordinates of u = N o G^{-1} given the parametric
/// gradient and Hessian (row-major d x d) of N:
///   grad_x = J^{-T} g,  H_x = J^{-T} (H - sum_c (grad_x)_c H_c) J^{-1}.
double physical_laplacian(const MapJet& jet, std::span<const double> grad_xi, std::span<const double> hess_xi);

/// Precomputed form of physical_laplacian for many basis functions at one
/// point: Laplacian = <H, G> - g . q with G = J^{-1} J^{-T} and
/// q = J^{-1} t, t_c = <H_c, G>.
class LaplacianOperator {
 public:
  explicit LaplacianOperator(const MapJet& jet);

  double apply(std::span<const double> grad_xi, std::span<const double> hess_xi) const;

 private:
  int dim_;
  std::array<double, 9> metric_{};
  std::array<double, 3> drift_{};
};

}  // namespace igalsq
