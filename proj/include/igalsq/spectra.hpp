#pragma once

// Extreme singular values and spectral condition numbers of rectangular
// sparse matrices.

#include <cstdint>
#include <optional>
#include <string_view>

#include "igalsq/assembly.hpp"
#include "igalsq/sparse_matrix.hpp"

namespace igalsq {

enum class SpectralMethod { dense_svd, iterative };

std::string_view to_string(SpectralMethod m);

struct SpectralOptions {
  std::size_t dense_threshold = 2000;  // columns
  double tol = 1e-10;                  // relative change of the extreme eigenvalue of A^T A
  int max_iter = 10000;
  std::uint64_t seed = 1234;
  double rank_tol = 1e-14;             // sigma_min < rank_tol * sigma_max is rank deficient
  std::optional<SpectralMethod> force;
  bool qr_inverse = false;  // iterative sigma_min through the sparse QR factor even when LDL^T succeeds
};

struct SpectralReport {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double cond = 0.0;  // sigma_max / sigma_min
  SpectralMethod method = SpectralMethod::dense_svd;
  int iterations = 0;  // power + inverse iterations, 0 on the dense path
  double residual_max = 0.0;  // ||A^T A v - s^2 v|| / s^2 for the extreme vectors
  double residual_min = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nnz = 0;
};

/// sigma_max, sigma_min and cond of A. For a wide matrix the extremes are
/// taken over its min(rows, cols) singular values, i.e. those of A^T.
///
/// Dense path (cols <= dense_threshold): Householder QR followed by a full
/// SVD of the triangular factor. Iterative path: block power iteration on
/// A^T A for sigma_max and block inverse iteration with a sparse LDL^T
/// factorization of A^T A for sigma_min, falling back to a sparse QR
/// factor when LDL^T breaks down.
///
/// Throws RankDeficiencyError when sigma_min < rank_tol * sigma_max or a
/// factorization reveals rank loss, NonConvergenceError when an iteration
/// hits max_iter.
SpectralReport singular_extremes(const CsrMatrix& A, const SpectralOptions& opts = {});

enum class Target { collocation, mass };

std::string_view to_string(Target t);
Target parse_target(std::string_view name);

struct TargetReport {
  SystemMetadata meta;
  Target target = Target::collocation;
  std::size_t dof = 0;
  std::size_t m = 0;
  std::size_t m_in = 0;
  SpectralReport report;
};

/// singular_extremes of A (collocation) or M (mass) with the system's
/// discretization metadata attached.
TargetReport spectral_sweep_entry(const DiscreteSystem& system, Target target, const SpectralOptions& opts = {});

}  // namespace igalsq
