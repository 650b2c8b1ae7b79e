#include "igalsq/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseQR>

#include "igalsq/errors.hpp"

namespace igalsq {

std::string_view to_string(SpectralMethod m) { return m == SpectralMethod::dense_svd ? "dense_svd" : "iterative"; }

std::string_view to_string(Target t) { return t == Target::collocation ? "A" : "M"; }

Target parse_target(std::string_view name) {
  if (name == "A" || name == "collocation") return Target::collocation;
  if (name == "M" || name == "mass") return Target::mass;
  throw DomainError("unknown target '" + std::string(name) + "' (expected A or M)");
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

constexpr Eigen::Index kBlock = 4;

Mat orthonormal_columns(const Mat& y) {
  Eigen::HouseholderQR<Mat> qr(y);
  return qr.householderQ() * Mat::Identity(y.rows(), y.cols());
}

Mat random_block(Eigen::Index n, Eigen::Index b, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat x(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = g(rng);
  return orthonormal_columns(x);
}

struct Ritz {
  double theta = 0.0;
  Vec v;
  int iterations = 0;
};

// Largest eigenpair of the symmetric positive operator `op` by block power
// iteration with a Rayleigh-Ritz step on the current block. Stops when the
// leading Ritz value changes by less than tol (relative) and its residual
// ||op v - theta v|| / theta is below sqrt(tol).
template <class Op>
Ritz dominant_eigenpair(Op&& op, Eigen::Index n, const SpectralOptions& opts, std::mt19937_64& rng,
                        const std::string& what) {
  const Eigen::Index b = std::min(kBlock, n);
  const double res_tol = std::sqrt(opts.tol);
  Mat x = random_block(n, b, rng);
  double prev = 0.0;
  Ritz best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Mat y = op(x);
    Mat h = x.transpose() * y;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const double theta = es.eigenvalues()(b - 1);
    best.theta = theta;
    best.iterations = it;
    if (it > 1 && std::abs(theta - prev) <= opts.tol * std::abs(theta)) {
      Vec v = x * es.eigenvectors().col(b - 1);
      v.normalize();
      const double res = (op(Mat(v)).col(0) - theta * v).norm() / std::abs(theta);
      best.v = v;
      best_res = res;
      if (res <= res_tol) return best;
    }
    prev = theta;
    x = orthonormal_columns(y);
  }
  throw NonConvergenceError(what + ": no convergence in " + std::to_string(opts.max_iter) + " iterations",
                            best.theta, best_res);
}

double normal_residual(const EigenSparse& a, const Vec& v, double sigma) {
  const Vec w = a.transpose() * (a * v);
  return (w - sigma * sigma * v).norm() / (sigma * sigma * v.norm());
}

void check_rank(const SpectralReport& r, const SpectralOptions& opts) {
  if (!(r.sigma_min >= opts.rank_tol * r.sigma_max) || r.sigma_max == 0.0)
    throw RankDeficiencyError("matrix is numerically rank deficient: sigma_min = " + std::to_string(r.sigma_min) +
                              ", sigma_max = " + std::to_string(r.sigma_max));
}

void dense_extremes(const EigenSparse& a, SpectralReport& r) {
  const Eigen::Index n = a.cols();
  Mat d = Mat(a);
  Mat tri;
  if (a.rows() > n) {
    Eigen::HouseholderQR<Mat> qr(std::move(d));
    tri = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    tri = std::move(d);
  }
  Eigen::BDCSVD<Mat> svd(tri, Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  r.sigma_max = s(0);
  r.sigma_min = s(n - 1);
  r.residual_max = normal_residual(a, svd.matrixV().col(0), r.sigma_max);
  r.residual_min = r.sigma_min > 0.0 ? normal_residual(a, svd.matrixV().col(n - 1), r.sigma_min) : 0.0;
}

void iterative_extremes(const EigenSparse& a, const SpectralOptions& opts, SpectralReport& r) {
  const Eigen::Index n = a.cols();
  std::mt19937_64 rng(opts.seed);
  EigenSparse normal = (a.transpose() * a).pruned(0.0);
  normal.makeCompressed();

  const Ritz top = dominant_eigenpair([&](const Mat& x) -> Mat { return normal * x; }, n, opts, rng,
                                      "power iteration for sigma_max");
  r.sigma_max = std::sqrt(top.theta);
  r.residual_max = normal_residual(a, top.v, r.sigma_max);

  Ritz low;
  Eigen::SimplicialLDLT<EigenSparse> ldlt;
  if (!opts.qr_inverse) ldlt.compute(normal);
  const bool ldlt_ok = !opts.qr_inverse && ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0;
  if (ldlt_ok) {
    low = dominant_eigenpair([&](const Mat& x) -> Mat { return ldlt.solve(x); }, n, opts, rng,
                             "inverse iteration for sigma_min");
  } else {
    // (A^T A)^{-1} = P R^{-1} R^{-T} P^T from A P = Q R.
    Eigen::SparseQR<EigenSparse, Eigen::COLAMDOrdering<int>> qr(a);
    if (qr.info() != Eigen::Success) throw FactorizationError("sparse QR of the matrix failed");
    if (qr.rank() < n)
      throw RankDeficiencyError("sparse QR reveals rank " + std::to_string(qr.rank()) + " < " + std::to_string(n));
    // R may hold unsorted inner indices; rebuild it through triplets.
    std::vector<Eigen::Triplet<double>> trips;
    const EigenSparse& rfull = qr.matrixR();
    for (Eigen::Index c = 0; c < rfull.outerSize(); ++c)
      for (EigenSparse::InnerIterator it(rfull, c); it; ++it)
        if (it.row() < n) trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    EigenSparse rt(n, n);
    rt.setFromTriplets(trips.begin(), trips.end());
    const auto perm = qr.colsPermutation();
    low = dominant_eigenpair(
        [&](const Mat& x) -> Mat {
          Mat z = perm.transpose() * x;
          z = rt.triangularView<Eigen::Upper>().transpose().solve(z);
          z = rt.triangularView<Eigen::Upper>().solve(z);
          return perm * z;
        },
        n, opts, rng, "inverse iteration for sigma_min");
  }
  r.sigma_min = (a * low.v).norm() / low.v.norm();
  r.residual_min = r.sigma_min > 0.0 ? normal_residual(a, low.v, r.sigma_min) : 0.0;
  r.iterations = top.iterations + low.iterations;
}

}  // namespace

SpectralReport singular_extremes(const CsrMatrix& A, const SpectralOptions& opts) {
  if (A.rows == 0 || A.cols == 0) throw DimensionMismatchError("singular_extremes: empty matrix");
  SpectralReport r;
  r.rows = A.rows;
  r.cols = A.cols;
  r.nnz = A.nnz();

  EigenSparse a = to_eigen(A);
  if (a.rows() < a.cols()) a = EigenSparse(a.transpose());
  r.method = opts.force.value_or(static_cast<std::size_t>(a.cols()) <= opts.dense_threshold
                                     ? SpectralMethod::dense_svd
                                     : SpectralMethod::iterative);
  if (r.method == SpectralMethod::dense_svd)
    dense_extremes(a, r);
  else
    iterative_extremes(a, opts, r);

  check_rank(r, opts);
  r.cond = r.sigma_max / r.sigma_min;
  return r;
}

TargetReport spectral_sweep_entry(const DiscreteSystem& system, Target target, const SpectralOptions& opts) {
  TargetReport out;
  out.meta = system.meta;
  out.target = target;
  out.dof = system.dof();
  out.m = system.m;
  out.m_in = system.m_in();
  out.report = singular_extremes(target == Target::collocation ? system.A : system.M, opts);
  return out;
}

}  // namespace igalsq
