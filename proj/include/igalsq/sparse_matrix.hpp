#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

namespace igalsq {

/// Compressed sparse row matrix. Column indices are sorted and unique
/// within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> columns;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return offsets.empty() ? 0 : offsets.back(); }

  /// Throws DimensionMismatchError if the structure invariants do not hold.
  void validate() const;

  void multiply(std::span<const double> x, std::span<double> y) const;            // y = A x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;  // y = A^T x

  CsrMatrix transposed() const;
  CsrMatrix scaled(double c) const;
};

bool operator==(const CsrMatrix& a, const CsrMatrix& b);

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

EigenSparse to_eigen(const CsrMatrix& a);
CsrMatrix from_eigen(const EigenSparse& a);
Eigen::MatrixXd to_dense(const CsrMatrix& a);
CsrMatrix from_dense(const Eigen::MatrixXd& a);

/// Matrix Market "coordinate real general", 1-based, 17 significant digits.
/// Every line of `comment` is written as a '%' comment after the banner.
void write_matrix_market(std::ostream& out, const CsrMatrix& a, std::string_view comment = {});
CsrMatrix read_matrix_market(std::istream& in);

/// Dense vector as Matrix Market "array real general".
void write_matrix_market_vector(std::ostream& out, std::span<const double> v, std::string_view comment = {});

}  // namespace igalsq
