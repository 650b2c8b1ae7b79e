#include "igalsq/lsq_solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "igalsq/errors.hpp"

namespace igalsq {

std::string_view to_string(SolveMethod m) { return m == SolveMethod::dense_qr ? "dense_qr" : "sparse_normal"; }

namespace {

double norm1(const CsrMatrix& a) {
  std::vector<double> col(a.cols, 0.0);
  for (std::size_t q = 0; q < a.nnz(); ++q) col[a.columns[q]] += std::abs(a.values[q]);
  return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
}

}  // namespace

Solution solve_least_squares(const DiscreteSystem& system, const SolverOptions& opts) {
  const CsrMatrix& A = system.A;
  if (system.b.size() != A.rows) throw DimensionMismatchError("solve_least_squares: load vector length != rows");
  if (A.cols == 0) throw DimensionMismatchError("solve_least_squares: no unknowns");

  Solution sol;
  sol.meta = system.meta;
  sol.interior_basis = system.interior_basis;
  sol.method = opts.force.value_or(A.cols <= opts.dense_threshold ? SolveMethod::dense_qr : SolveMethod::sparse_normal);
  const Eigen::Map<const Eigen::VectorXd> b(system.b.data(), static_cast<Eigen::Index>(system.b.size()));
  const Eigen::Index n = static_cast<Eigen::Index>(A.cols);
  Eigen::VectorXd u;

  if (sol.method == SolveMethod::dense_qr) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(to_dense(A));
    if (qr.rank() < n)
      throw RankDeficiencyError("collocation matrix has rank " + std::to_string(qr.rank()) + " < " +
                                std::to_string(n) + " columns");
    u = qr.solve(b);
  } else {
    const EigenSparse a = to_eigen(A);
    EigenSparse normal = a.transpose() * a;
    normal.makeCompressed();
    Eigen::SimplicialLDLT<EigenSparse> ldlt(normal);
    if (ldlt.info() != Eigen::Success) throw FactorizationError("LDL^T factorization of A^T A failed");
    const Eigen::VectorXd& D = ldlt.vectorD();
    if (!(D.minCoeff() > 1e-14 * D.cwiseAbs().maxCoeff()))
      throw RankDeficiencyError("A^T A is numerically singular (LDL^T pivot ratio below 1e-14)");
    u = ldlt.solve(Eigen::VectorXd(a.transpose() * b));
    if (ldlt.info() != Eigen::Success) throw FactorizationError("LDL^T solve failed");
  }
  if (!u.allFinite()) throw FactorizationError("least-squares solution is not finite");

  sol.u.assign(u.data(), u.data() + u.size());
  std::vector<double> r(A.rows);
  A.multiply(sol.u, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= system.b[i];
  std::vector<double> g(A.cols);
  A.multiply_transpose(r, g);
  double rn = 0.0, gn = 0.0;
  for (double v : r) rn += v * v;
  for (double v : g) gn += v * v;
  sol.residual_norm = std::sqrt(rn);
  const double scale = norm1(A) * b.norm();
  sol.normal_residual = scale > 0.0 ? std::sqrt(gn) / scale : 0.0;
  return sol;
}

double eval_solution(const NurbsSpace& space, const Solution& sol, std::span<const double> xi) {
  const auto basis = eval_nurbs(space, xi, 0);
  double s = 0.0;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto it = std::lower_bound(sol.interior_basis.begin(), sol.interior_basis.end(), basis.indices[a]);
    if (it != sol.interior_basis.end() && *it == basis.indices[a])
      s += sol.u[static_cast<std::size_t>(it - sol.interior_basis.begin())] * basis.values[a];
  }
  return s;
}

namespace {

template <class Visit>
void for_each_grid_point(int d, int per_dir, Visit&& visit) {
  std::array<int, 3> idx{0, 0, 0};
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_dir);
  for (std::size_t q = 0; q < total; ++q) {
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) xi[i] = per_dir == 1 ? 0.5 : static_cast<double>(idx[i]) / (per_dir - 1);
    visit(std::span<const double>(xi.data(), d));
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < per_dir) break;
      idx[i] = 0;
    }
  }
}

}  // namespace

double max_solution_error(const NurbsSpace& space, const GeometryPatch& patch, const Solution& sol,
                          ManufacturedCase exact, int per_dir) {
  if (per_dir < 1) throw DomainError("max_solution_error: need at least one sample per direction");
  double err = 0.0;
  for_each_grid_point(space.dim(), per_dir, [&](std::span<const double> xi) {
    const MapJet jet = eval_map_unchecked(patch, xi);
    err = std::max(err, std::abs(eval_solution(space, sol, xi) - manufactured_solution(exact, jet, xi)));
  });
  return err;
}

void write_solution_csv(std::ostream& out, const Solution& sol) {
  out << "index,coefficient\n";
  out.precision(17);
  for (std::size_t c = 0; c < sol.u.size(); ++c) out << sol.interior_basis[c] << ',' << sol.u[c] << '\n';
}

void write_solution_samples(std::ostream& out, const NurbsSpace& space, const GeometryPatch& patch,
                            const Solution& sol, ManufacturedCase exact, int per_dir) {
  if (per_dir < 1) throw DomainError("write_solution_samples: need at least one sample per direction");
  const int d = space.dim();
  static constexpr const char* axes[3] = {"0", "1", "2"};
  for (int i = 0; i < d; ++i) out << "xi" << axes[i] << ',';
  for (int i = 0; i < d; ++i) out << 'x' << axes[i] << ',';
  out << "u_h,u_exact\n";
  out.precision(17);
  for_each_grid_point(d, per_dir, [&](std::span<const double> xi) {
    const MapJet jet = eval_map_unchecked(patch, xi);
    for (int i = 0; i < d; ++i) out << xi[i] << ',';
    for (int i = 0; i < d; ++i) out << jet.x[i] << ',';
    out << eval_solution(space, sol, xi) << ',' << manufactured_solution(exact, jet, xi) << '\n';
  });
}

}  // namespace igalsq
