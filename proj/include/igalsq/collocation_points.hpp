#pragma once

// Parametric collocation point sets: Greville (with oversampling),
// superconvergent (SC) and Cauchy-Galerkin (CG) points, and their tensor
// products split into interior and boundary points.

#include <array>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "igalsq/spline_core.hpp"

namespace igalsq {

enum class PointScheme { greville, sc, cg };

std::string_view to_string(PointScheme scheme);
PointScheme parse_point_scheme(std::string_view name);

/// Tensor grid of parametric points. Points are sorted lexicographically
/// (first coordinate most significant).
struct CollocationSet {
  PointScheme scheme = PointScheme::greville;
  int dim = 1;
  std::vector<std::array<double, 3>> points;
  std::vector<std::size_t> interior;
  std::vector<std::size_t> boundary;
  std::vector<int> per_direction;

  std::size_t m() const noexcept { return points.size(); }
  std::size_t m_in() const noexcept { return interior.size(); }
};

/// m_dir Greville abscissae of the open uniform C^{p-1} knot vector with
/// m_dir - p spans. Throws DomainError when m_dir <= p.
std::vector<double> greville_points(int p, int m_dir);

/// Tabulated superconvergent points on [-1, 1] for 3 <= p <= 7.
/// Throws UnsupportedDegreeError otherwise.
std::vector<double> sc_reference_points(int p);

/// SC reference points mapped into every span of kv; span endpoints shared
/// by neighbouring spans appear once.
std::vector<double> sc_points(int p, const KnotVector& kv);

/// One SC point per span, chosen to keep the set symmetric about 1/2.
///
/// From both ends inwards, span s (counted from its nearer end) takes the
/// outer member when s is even and the inner member when s is odd, where
/// for odd p the members are the pair -a, +a and for even p they are the
/// span endpoint and the span midpoint. A middle span (odd span count)
/// contributes its left member for odd p and its midpoint for even p.
std::vector<double> cg_points(int p, const KnotVector& kv);

/// Full tensor grid from sorted, duplicate-free per-direction lists.
CollocationSet tensorize(const std::vector<std::vector<double>>& per_dir, PointScheme scheme = PointScheme::greville);

/// ceil(factor^(1/d) * n_dir); factor must be >= 1.
int oversampled_count(int n_dir, double factor, int d);

/// "index,xi0,..,interior" rows; interior is 0 or 1. Comment lines first.
void write_points_csv(std::ostream& out, const CollocationSet& set, std::string_view comment = {});

/// Tolerance used to classify boundary points.
inline constexpr double kBoundaryTolerance = 1e-14;

}  // namespace igalsq
