#pragma once

// Open uniform knot vectors, univariate B-spline evaluation with derivatives
// and tensor-product (optionally rational) bases on [0,1]^d.

#include <cstddef>
#include <span>
#include <vector>

namespace igalsq {

/// Open knot vector on [0,1] with uniformly spaced interior breaks.
///
/// The end values carry multiplicity p+1 and each interior break i/n
/// carries multiplicity p-k, so the basis is globally C^k.
class KnotVector {
 public:
  /// Throws DomainError unless p >= 1, n >= 1 and 0 <= k <= p-1.
  KnotVector(int degree, int interior_breaks, int regularity);

  int degree() const noexcept { return degree_; }
  int num_spans() const noexcept { return spans_; }
  int regularity() const noexcept { return regularity_; }
  double mesh_size() const noexcept { return 1.0 / spans_; }

  std::span<const double> knots() const noexcept { return knots_; }
  std::size_t size() const noexcept { return knots_.size(); }
  double operator[](std::size_t i) const noexcept { return knots_[i]; }

  /// Number of basis functions, (n-1)(p-k) + p + 1.
  int num_basis() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }

  /// Distinct break values 0 = b_0 < ... < b_n = 1.
  std::vector<double> breaks() const;

  /// Knot index s with knots[s] <= xi <= knots[s+1] and knots[s] < knots[s+1].
  /// A value sitting on an interior break resolves to the span on its left;
  /// xi = 0 resolves to the first span.
  int find_span(double xi) const;

 private:
  int degree_;
  int spans_;
  int regularity_;
  std::vector<double> knots_;
};

KnotVector build_knot_vector(int p, int n, int k);

/// Active basis functions at one parametric point together with their
/// parametric derivatives. Derivative arrays are empty when not requested.
struct BasisEval {
  int dim = 1;
  int max_deriv = 0;
  std::vector<std::size_t> indices;  // flat basis indices, increasing
  std::vector<double> values;
  std::vector<double> gradients;  // indices.size() * dim
  std::vector<double> hessians;   // indices.size() * dim * dim, row-major

  std::size_t size() const noexcept { return indices.size(); }
  double gradient(std::size_t a, int i) const { return gradients[a * dim + i]; }
  double hessian(std::size_t a, int i, int j) const {
    return hessians[(a * dim + i) * dim + j];
  }
};

/// Univariate values and derivatives of the p+1 B-splines that are active
/// on the span containing xi. `ders[r][j]` is the r-th derivative of basis
/// `first + j`.
struct UnivariateJet {
  int first = 0;
  int max_deriv = 0;
  std::vector<std::vector<double>> ders;
};

/// Cox-de Boor evaluation with derivatives by knot differencing.
/// Throws DomainError for xi outside [0,1] or max_deriv outside 0..2.
UnivariateJet eval_bspline_jet(const KnotVector& kv, double xi, int max_deriv);

/// Same data packaged as a one-dimensional BasisEval.
BasisEval eval_bspline(const KnotVector& kv, double xi, int max_deriv);

/// Tensor-product NURBS space. Weights are stored per tensor index with the
/// first direction varying slowest (row-major over (i_0, ..., i_{d-1})).
class NurbsSpace {
 public:
  /// Polynomial tensor space, all weights 1.
  explicit NurbsSpace(std::vector<KnotVector> directions);
  /// Throws DomainError if the weight count mismatches or any weight <= 0.
  NurbsSpace(std::vector<KnotVector> directions, std::vector<double> weights);

  int dim() const noexcept { return static_cast<int>(dirs_.size()); }
  const KnotVector& direction(int i) const { return dirs_.at(i); }
  const std::vector<KnotVector>& directions() const noexcept { return dirs_; }
  std::span<const double> weights() const noexcept { return weights_; }
  bool rational() const noexcept { return rational_; }

  std::size_t num_basis() const noexcept { return num_basis_; }
  int num_basis(int dir) const { return dirs_.at(dir).num_basis(); }

  std::size_t flat_index(std::span<const int> multi) const;
  std::vector<int> multi_index(std::size_t flat) const;

 private:
  std::vector<KnotVector> dirs_;
  std::vector<double> weights_;
  std::size_t num_basis_ = 0;
  bool rational_ = false;
};

/// Rational basis values and parametric derivatives at xi (length d).
/// With unit weights the values are the tensor B-spline values, untouched.
/// Throws NumericalError if the weighted denominator is not positive.
BasisEval eval_nurbs(const NurbsSpace& space, std::span<const double> xi, int max_deriv);

/// Greville abscissae (eta_{i+1} + ... + eta_{i+p}) / p, one per basis function.
std::vector<double> greville_abscissae(const KnotVector& kv);

}  // namespace igalsq
