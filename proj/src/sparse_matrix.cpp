#include "igalsq/sparse_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "igalsq/errors.hpp"

namespace igalsq {

void CsrMatrix::validate() const {
  if (offsets.size() != rows + 1) throw DimensionMismatchError("CSR: offsets must have rows+1 entries");
  if (offsets.front() != 0) throw DimensionMismatchError("CSR: first offset must be 0");
  if (columns.size() != nnz() || values.size() != nnz())
    throw DimensionMismatchError("CSR: column/value arrays must have nnz entries");
  for (std::size_t r = 0; r < rows; ++r) {
    if (offsets[r] > offsets[r + 1]) throw DimensionMismatchError("CSR: offsets must be nondecreasing");
    for (std::size_t q = offsets[r]; q < offsets[r + 1]; ++q) {
      if (columns[q] >= cols) throw DimensionMismatchError("CSR: column index out of range");
      if (q > offsets[r] && columns[q] <= columns[q - 1])
        throw DimensionMismatchError("CSR: columns must be sorted and unique within a row");
    }
  }
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t q = offsets[r]; q < offsets[r + 1]; ++q) s += values[q] * x[columns[q]];
    y[r] = s;
  }
}

void CsrMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double xr = x[r];
    for (std::size_t q = offsets[r]; q < offsets[r + 1]; ++q) y[columns[q]] += values[q] * xr;
  }
}

CsrMatrix CsrMatrix::transposed() const {
  CsrMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.offsets.assign(cols + 1, 0);
  for (std::size_t q = 0; q < nnz(); ++q) ++t.offsets[columns[q] + 1];
  for (std::size_t c = 0; c < cols; ++c) t.offsets[c + 1] += t.offsets[c];
  t.columns.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::size_t> fill(t.offsets.begin(), t.offsets.end() - 1);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t q = offsets[r]; q < offsets[r + 1]; ++q) {
      const std::size_t dst = fill[columns[q]]++;
      t.columns[dst] = r;
      t.values[dst] = values[q];
    }
  return t;
}

CsrMatrix CsrMatrix::scaled(double c) const {
  CsrMatrix out = *this;
  for (double& v : out.values) v *= c;
  return out;
}

bool operator==(const CsrMatrix& a, const CsrMatrix& b) {
  return std::tie(a.rows, a.cols, a.offsets, a.columns, a.values) ==
         std::tie(b.rows, b.cols, b.offsets, b.columns, b.values);
}

EigenSparse to_eigen(const CsrMatrix& a) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.nnz());
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t q = a.offsets[r]; q < a.offsets[r + 1]; ++q)
      trips.emplace_back(static_cast<int>(r), static_cast<int>(a.columns[q]), a.values[q]);
  EigenSparse out(static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

CsrMatrix from_eigen(const EigenSparse& a) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> rm = a;
  rm.makeCompressed();
  CsrMatrix out;
  out.rows = static_cast<std::size_t>(rm.rows());
  out.cols = static_cast<std::size_t>(rm.cols());
  out.offsets.assign(rm.outerIndexPtr(), rm.outerIndexPtr() + rm.rows() + 1);
  out.columns.assign(rm.innerIndexPtr(), rm.innerIndexPtr() + rm.nonZeros());
  out.values.assign(rm.valuePtr(), rm.valuePtr() + rm.nonZeros());
  return out;
}

Eigen::MatrixXd to_dense(const CsrMatrix& a) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols));
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t q = a.offsets[r]; q < a.offsets[r + 1]; ++q)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a.columns[q])) = a.values[q];
  return out;
}

CsrMatrix from_dense(const Eigen::MatrixXd& a) {
  CsrMatrix out;
  out.rows = static_cast<std::size_t>(a.rows());
  out.cols = static_cast<std::size_t>(a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      if (a(r, c) != 0.0) {
        out.columns.push_back(static_cast<std::size_t>(c));
        out.values.push_back(a(r, c));
      }
    out.offsets.push_back(out.columns.size());
  }
  return out;
}

namespace {

void write_comment(std::ostream& out, std::string_view comment) {
  std::size_t start = 0;
  while (start < comment.size()) {
    const std::size_t end = comment.find('\n', start);
    const auto line = comment.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    out << "% " << line << '\n';
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_matrix_market(std::ostream& out, const CsrMatrix& a, std::string_view comment) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  write_comment(out, comment);
  out << a.rows << ' ' << a.cols << ' ' << a.nnz() << '\n';
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t q = a.offsets[r]; q < a.offsets[r + 1]; ++q)
      out << r + 1 << ' ' << a.columns[q] + 1 << ' ' << format_real(a.values[q]) << '\n';
}

void write_matrix_market_vector(std::ostream& out, std::span<const double> v, std::string_view comment) {
  out << "%%MatrixMarket matrix array real general\n";
  write_comment(out, comment);
  out << v.size() << " 1\n";
  for (double x : v) out << format_real(x) << '\n';
}

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw DomainError("Matrix Market: missing banner");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || field != "real" || symmetry != "general")
    throw DomainError("Matrix Market: only 'matrix coordinate real general' is supported");

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::size_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz)) throw DomainError("Matrix Market: malformed size line");
  }

  struct Entry {
    std::size_t r, c;
    double v;
  };
  std::vector<Entry> entries;
  entries.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    Entry e{};
    std::string value;
    if (!(in >> e.r >> e.c >> value)) throw DomainError("Matrix Market: truncated entry list");
    const auto res = std::from_chars(value.data(), value.data() + value.size(), e.v);
    if (res.ec != std::errc{}) throw DomainError("Matrix Market: bad value '" + value + "'");
    if (e.r < 1 || e.r > rows || e.c < 1 || e.c > cols) throw DomainError("Matrix Market: index out of range");
    --e.r;
    --e.c;
    entries.push_back(e);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return std::tie(a.r, a.c) < std::tie(b.r, b.c); });

  CsrMatrix out;
  out.rows = rows;
  out.cols = cols;
  out.offsets.assign(rows + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    if (k > 0 && entries[k - 1].r == e.r && entries[k - 1].c == e.c) {
      out.values.back() += e.v;  // duplicates are summed
      continue;
    }
    out.columns.push_back(e.c);
    out.values.push_back(e.v);
    ++out.offsets[e.r + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) out.offsets[r + 1] += out.offsets[r];
  return out;
}

}  // namespace igalsq
