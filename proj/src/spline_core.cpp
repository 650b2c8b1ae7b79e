#include "igalsq/spline_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "igalsq/errors.hpp"

namespace igalsq {

KnotVector::KnotVector(int degree, int interior_breaks, int regularity)
    : degree_(degree), spans_(interior_breaks), regularity_(regularity) {
  if (degree < 1) throw DomainError("knot vector: degree must be >= 1, got " + std::to_string(degree));
  if (interior_breaks < 1)
    throw DomainError("knot vector: number of spans must be >= 1, got " + std::to_string(interior_breaks));
  if (regularity < 0 || regularity > degree - 1)
    throw DomainError("knot vector: regularity must lie in [0, p-1], got k=" + std::to_string(regularity) +
                      " for p=" + std::to_string(degree));

  const int interior_mult = degree - regularity;
  knots_.reserve(2 * (degree + 1) + (interior_breaks - 1) * interior_mult);
  knots_.insert(knots_.end(), degree + 1, 0.0);
  for (int i = 1; i < interior_breaks; ++i) {
    const double xi = static_cast<double>(i) / interior_breaks;
    knots_.insert(knots_.end(), interior_mult, xi);
  }
  knots_.insert(knots_.end(), degree + 1, 1.0);
}

std::vector<double> KnotVector::breaks() const {
  std::vector<double> out;
  out.reserve(spans_ + 1);
  for (double v : knots_)
    if (out.empty() || v != out.back()) out.push_back(v);
  return out;
}

int KnotVector::find_span(double xi) const {
  const int lo_clamp = degree_;
  const int hi_clamp = static_cast<int>(knots_.size()) - degree_ - 2;
  if (xi <= knots_[lo_clamp]) return lo_clamp;
  if (xi >= knots_[hi_clamp + 1]) return hi_clamp;
  // First knot >= xi, then step back to the span ending there.
  auto it = std::lower_bound(knots_.begin() + lo_clamp, knots_.begin() + hi_clamp + 2, xi);
  int s = static_cast<int>(it - knots_.begin()) - 1;
  return std::clamp(s, lo_clamp, hi_clamp);
}

KnotVector build_knot_vector(int p, int n, int k) { return KnotVector(p, n, k); }

UnivariateJet eval_bspline_jet(const KnotVector& kv, double xi, int max_deriv) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw DomainError("B-spline evaluation: xi outside [0,1]");
  if (max_deriv < 0 || max_deriv > 2) throw DomainError("B-spline evaluation: max_deriv must be 0, 1 or 2");

  const int p = kv.degree();
  const int span = kv.find_span(xi);
  const auto U = kv.knots();

  // Triangular table of basis values (upper) and knot differences (lower).
  std::vector<double> ndu((p + 1) * (p + 1));
  auto at = [&](int r, int c) -> double& { return ndu[r * (p + 1) + c]; };
  std::vector<double> left(p + 1), right(p + 1);
  at(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - U[span + 1 - j];
    right[j] = U[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      at(j, r) = right[r + 1] + left[j - r];
      const double temp = at(r, j - 1) / at(j, r);
      at(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    at(j, j) = saved;
  }

  UnivariateJet jet;
  jet.first = span - p;
  jet.max_deriv = max_deriv;
  jet.ders.assign(max_deriv + 1, std::vector<double>(p + 1, 0.0));
  for (int j = 0; j <= p; ++j) jet.ders[0][j] = at(j, p);
  if (max_deriv == 0) return jet;

  std::vector<double> a0(p + 1), a1(p + 1);
  for (int r = 0; r <= p; ++r) {
    std::vector<double>* s1 = &a0;
    std::vector<double>* s2 = &a1;
    (*s1)[0] = 1.0;
    for (int k = 1; k <= max_deriv; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        (*s2)[0] = (*s1)[0] / at(pk + 1, rk);
        d = (*s2)[0] * at(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        (*s2)[j] = ((*s1)[j] - (*s1)[j - 1]) / at(pk + 1, rk + j);
        d += (*s2)[j] * at(rk + j, pk);
      }
      if (r <= pk) {
        (*s2)[k] = -(*s1)[k - 1] / at(pk + 1, r);
        d += (*s2)[k] * at(r, pk);
      }
      jet.ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= max_deriv; ++k) {
    for (double& v : jet.ders[k]) v *= factor;
    factor *= (p - k);
  }
  return jet;
}

BasisEval eval_bspline(const KnotVector& kv, double xi, int max_deriv) {
  const UnivariateJet jet = eval_bspline_jet(kv, xi, max_deriv);
  const int p = kv.degree();
  BasisEval out;
  out.dim = 1;
  out.max_deriv = max_deriv;
  out.indices.resize(p + 1);
  for (int j = 0; j <= p; ++j) out.indices[j] = static_cast<std::size_t>(jet.first + j);
  out.values = jet.ders[0];
  if (max_deriv >= 1) out.gradients = jet.ders[1];
  if (max_deriv >= 2) out.hessians = jet.ders[2];
  return out;
}

NurbsSpace::NurbsSpace(std::vector<KnotVector> directions) : dirs_(std::move(directions)) {
  if (dirs_.empty() || dirs_.size() > 3) throw DomainError("NURBS space: dimension must be 1, 2 or 3");
  num_basis_ = 1;
  for (const auto& kv : dirs_) num_basis_ *= static_cast<std::size_t>(kv.num_basis());
  weights_.assign(num_basis_, 1.0);
}

NurbsSpace::NurbsSpace(std::vector<KnotVector> directions, std::vector<double> weights)
    : NurbsSpace(std::move(directions)) {
  if (weights.size() != num_basis_)
    throw DomainError("NURBS space: expected " + std::to_string(num_basis_) + " weights, got " +
                      std::to_string(weights.size()));
  for (double w : weights)
    if (!(w > 0.0)) throw DomainError("NURBS space: weights must be positive");
  weights_ = std::move(weights);
  rational_ = std::any_of(weights_.begin(), weights_.end(), [](double w) { return w != 1.0; });
}

std::size_t NurbsSpace::flat_index(std::span<const int> multi) const {
  std::size_t flat = 0;
  for (std::size_t d = 0; d < dirs_.size(); ++d)
    flat = flat * static_cast<std::size_t>(dirs_[d].num_basis()) + static_cast<std::size_t>(multi[d]);
  return flat;
}

std::vector<int> NurbsSpace::multi_index(std::size_t flat) const {
  std::vector<int> multi(dirs_.size());
  for (std::size_t d = dirs_.size(); d-- > 0;) {
    const auto nb = static_cast<std::size_t>(dirs_[d].num_basis());
    multi[d] = static_cast<int>(flat % nb);
    flat /= nb;
  }
  return multi;
}

BasisEval eval_nurbs(const NurbsSpace& space, std::span<const double> xi, int max_deriv) {
  const int d = space.dim();
  if (static_cast<int>(xi.size()) != d)
    throw DimensionMismatchError("NURBS evaluation: point dimension does not match space");

  std::vector<UnivariateJet> jets;
  jets.reserve(d);
  for (int i = 0; i < d; ++i) jets.push_back(eval_bspline_jet(space.direction(i), xi[i], max_deriv));

  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(space.direction(i).degree() + 1);

  BasisEval out;
  out.dim = d;
  out.max_deriv = max_deriv;
  out.indices.resize(count);
  out.values.resize(count);
  if (max_deriv >= 1) out.gradients.assign(count * d, 0.0);
  if (max_deriv >= 2) out.hessians.assign(count * d * d, 0.0);

  // Walk the active tensor block with the first direction slowest, so the
  // flat indices come out increasing.
  std::vector<int> local(d, 0);
  std::vector<int> global(d);
  for (std::size_t a = 0; a < count; ++a) {
    for (int i = 0; i < d; ++i) global[i] = jets[i].first + local[i];
    out.indices[a] = space.flat_index(global);

    double value = 1.0;
    for (int i = 0; i < d; ++i) value *= jets[i].ders[0][local[i]];
    out.values[a] = value;

    if (max_deriv >= 1) {
      for (int g = 0; g < d; ++g) {
        double v = 1.0;
        for (int i = 0; i < d; ++i) v *= jets[i].ders[i == g ? 1 : 0][local[i]];
        out.gradients[a * d + g] = v;
      }
    }
    if (max_deriv >= 2) {
      for (int r = 0; r < d; ++r) {
        for (int c = r; c < d; ++c) {
          double v = 1.0;
          for (int i = 0; i < d; ++i) {
            const int order = (i == r) + (i == c);
            v *= jets[i].ders[order][local[i]];
          }
          out.hessians[(a * d + r) * d + c] = v;
          out.hessians[(a * d + c) * d + r] = v;
        }
      }
    }

    for (int i = d - 1; i >= 0; --i) {
      if (++local[i] <= space.direction(i).degree()) break;
      local[i] = 0;
    }
  }

  if (!space.rational()) return out;

  // Quotient rule on N_a = w_a B_a / W.
  const auto w = space.weights();
  double W = 0.0;
  std::vector<double> dW(d, 0.0), ddW(d * d, 0.0);
  for (std::size_t a = 0; a < count; ++a) {
    const double wa = w[out.indices[a]];
    W += wa * out.values[a];
    if (max_deriv >= 1)
      for (int g = 0; g < d; ++g) dW[g] += wa * out.gradients[a * d + g];
    if (max_deriv >= 2)
      for (int q = 0; q < d * d; ++q) ddW[q] += wa * out.hessians[a * d * d + q];
  }
  if (!(W > 0.0)) throw NumericalError("NURBS evaluation: weight denominator is not positive");

  for (std::size_t a = 0; a < count; ++a) {
    const double wa = w[out.indices[a]];
    const double N = wa * out.values[a] / W;
    out.values[a] = N;
    if (max_deriv >= 1) {
      double dN[3];
      for (int g = 0; g < d; ++g) {
        dN[g] = (wa * out.gradients[a * d + g] - N * dW[g]) / W;
      }
      if (max_deriv >= 2) {
        for (int r = 0; r < d; ++r)
          for (int c = r; c < d; ++c) {
            double& h = out.hessians[(a * d + r) * d + c];
            h = (wa * h - dN[r] * dW[c] - dN[c] * dW[r] - N * ddW[r * d + c]) / W;
            out.hessians[(a * d + c) * d + r] = h;
          }
      }
      for (int g = 0; g < d; ++g) out.gradients[a * d + g] = dN[g];
    }
  }
  return out;
}

std::vector<double> greville_abscissae(const KnotVector& kv) {
  const int p = kv.degree();
  const int nb = kv.num_basis();
  std::vector<double> out(nb);
  for (int i = 0; i < nb; ++i) {
    double sum = 0.0;
    for (int j = i + 1; j <= i + p; ++j) sum += kv[j];
    out[i] = sum / p;
  }
  // Exact end values; the averaged sums of repeated 0s and 1s already are,
  // but make it explicit for the boundary classification downstream.
  out.front() = 0.0;
  out.back() = 1.0;
  return out;
}

}  // namespace igalsq
