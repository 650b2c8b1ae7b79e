#pragma once

// Least-squares solution of the collocation system and evaluation of the
// discrete solution U_h = sum_i u_i N_i o G^{-1}.

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "igalsq/assembly.hpp"

namespace igalsq {

enum class SolveMethod { dense_qr, sparse_normal };

std::string_view to_string(SolveMethod m);

struct SolverOptions {
  std::size_t dense_threshold = 2000;  // columns
  std::optional<SolveMethod> force;
};

struct Solution {
  std::vector<double> u;  // coefficients of the interior basis, column order
  std::vector<std::size_t> interior_basis;
  double residual_norm = 0.0;    // ||A u - b||_2
  double normal_residual = 0.0;  // ||A^T (A u - b)||_2 / (||A||_1 ||b||_2), 0 when b = 0
  SolveMethod method = SolveMethod::dense_qr;
  SystemMetadata meta;
};

/// Minimizes ||A u - b||_2. Columns <= dense_threshold: column-pivoted
/// Householder QR of the dense matrix. Otherwise: sparse LDL^T of A^T A
/// applied to A^T b.
/// Throws RankDeficiencyError or FactorizationError.
Solution solve_least_squares(const DiscreteSystem& system, const SolverOptions& opts = {});

/// U_h at the parametric point xi. Exactly 0 on the parametric boundary.
double eval_solution(const NurbsSpace& space, const Solution& sol, std::span<const double> xi);

/// max |U_h - u| over a uniform grid of `per_dir` points per direction,
/// boundary included, with u the manufactured solution.
double max_solution_error(const NurbsSpace& space, const GeometryPatch& patch, const Solution& sol,
                          ManufacturedCase exact, int per_dir);

/// "index,coefficient" rows; index is the flat basis index.
void write_solution_csv(std::ostream& out, const Solution& sol);

/// Samples on a uniform parametric grid: xi_*, x_*, u_h, u_exact.
void write_solution_samples(std::ostream& out, const NurbsSpace& space, const GeometryPatch& patch,
                            const Solution& sol, ManufacturedCase exact, int per_dir);

}  // namespace igalsq
