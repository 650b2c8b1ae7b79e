#include "igalsq/collocation_points.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "igalsq/errors.hpp"

namespace igalsq {

namespace {

constexpr double kMergeTolerance = 1e-12;

double map_to_span(double t, double a, double b) {
  if (t == -1.0) return a;
  if (t == 1.0) return b;
  if (t == 0.0) return 0.5 * (a + b);
  return a + 0.5 * (t + 1.0) * (b - a);
}

bool on_boundary(double v) { return v <= kBoundaryTolerance || v >= 1.0 - kBoundaryTolerance; }

}  // namespace

std::string_view to_string(PointScheme scheme) {
  switch (scheme) {
    case PointScheme::greville: return "greville";
    case PointScheme::sc: return "sc";
    case PointScheme::cg: return "cg";
  }
  return "unknown";
}

PointScheme parse_point_scheme(std::string_view name) {
  for (auto s : {PointScheme::greville, PointScheme::sc, PointScheme::cg})
    if (name == to_string(s)) return s;
  throw DomainError("unknown collocation scheme '" + std::string(name) + "'");
}

std::vector<double> greville_points(int p, int m_dir) {
  if (p < 1) throw DomainError("greville_points: degree must be >= 1");
  if (m_dir <= p)
    throw DomainError("greville_points: need more than p points per direction (p=" + std::to_string(p) +
                      ", m=" + std::to_string(m_dir) + ")");
  return greville_abscissae(KnotVector(p, m_dir - p, p - 1));
}

std::vector<double> sc_reference_points(int p) {
  switch (p) {
    case 3: {
      const double a = 1.0 / std::sqrt(3.0);
      return {-a, a};
    }
    case 4:
    case 6: return {-1.0, 0.0, 1.0};
    case 5: {
      const double a = std::sqrt(225.0 - 30.0 * std::sqrt(3.0)) / 15.0;
      return {-a, a};
    }
    case 7: return {-0.50491856751, 0.50491856751};
    default:
      throw UnsupportedDegreeError("superconvergent points are tabulated for 3 <= p <= 7 only, got p=" +
                                   std::to_string(p));
  }
}

std::vector<double> sc_points(int p, const KnotVector& kv) {
  const auto ref = sc_reference_points(p);
  const auto br = kv.breaks();
  std::vector<double> out;
  out.reserve(ref.size() * (br.size() - 1));
  for (std::size_t s = 0; s + 1 < br.size(); ++s)
    for (double t : ref) {
      const double x = map_to_span(t, br[s], br[s + 1]);
      if (out.empty() || std::abs(x - out.back()) > kMergeTolerance) out.push_back(x);
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> cg_points(int p, const KnotVector& kv) {
  const auto ref = sc_reference_points(p);
  const auto br = kv.breaks();
  const int n = static_cast<int>(br.size()) - 1;
  const bool odd = p % 2 == 1;
  const double a = odd ? ref.back() : 0.0;

  std::vector<double> out(n);
  for (int s = 0; s < (n + 1) / 2; ++s) {
    const int left = s;
    const int right = n - 1 - s;
    const bool outer = s % 2 == 0;
    if (left == right) {
      out[left] = odd ? map_to_span(-a, br[left], br[left + 1]) : map_to_span(0.0, br[left], br[left + 1]);
      break;
    }
    if (odd) {
      out[left] = map_to_span(outer ? -a : a, br[left], br[left + 1]);
      out[right] = map_to_span(outer ? a : -a, br[right], br[right + 1]);
    } else {
      out[left] = map_to_span(outer ? -1.0 : 0.0, br[left], br[left + 1]);
      out[right] = map_to_span(outer ? 1.0 : 0.0, br[right], br[right + 1]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CollocationSet tensorize(const std::vector<std::vector<double>>& per_dir, PointScheme scheme) {
  const int d = static_cast<int>(per_dir.size());
  if (d < 1 || d > 3) throw DomainError("tensorize: dimension must be 1, 2 or 3");
  CollocationSet set;
  set.scheme = scheme;
  set.dim = d;
  std::size_t total = 1;
  for (const auto& v : per_dir) {
    if (v.empty()) throw DomainError("tensorize: empty point list");
    set.per_direction.push_back(static_cast<int>(v.size()));
    total *= v.size();
  }
  set.points.reserve(total);

  std::vector<std::size_t> idx(d, 0);
  for (std::size_t q = 0; q < total; ++q) {
    std::array<double, 3> pt{0.0, 0.0, 0.0};
    bool boundary = false;
    for (int i = 0; i < d; ++i) {
      pt[i] = per_dir[i][idx[i]];
      boundary = boundary || on_boundary(pt[i]);
    }
    (boundary ? set.boundary : set.interior).push_back(set.points.size());
    set.points.push_back(pt);
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < per_dir[i].size()) break;
      idx[i] = 0;
    }
  }
  return set;
}

int oversampled_count(int n_dir, double factor, int d) {
  if (!(factor >= 1.0)) throw DomainError("oversampling factor must be >= 1");
  if (d < 1) throw DomainError("oversampled_count: dimension must be >= 1");
  const double per = std::pow(factor, 1.0 / d) * n_dir;
  // Guard against pow() landing a hair above an exact integer.
  const double rounded = std::round(per);
  if (std::abs(per - rounded) < 1e-9 * std::max(1.0, per)) return static_cast<int>(rounded);
  return static_cast<int>(std::ceil(per));
}

void write_points_csv(std::ostream& out, const CollocationSet& set, std::string_view comment) {
  std::size_t start = 0;
  while (!comment.empty() && start <= comment.size()) {
    const std::size_t end = std::min(comment.find('\n', start), comment.size());
    out << "# " << comment.substr(start, end - start) << '\n';
    start = end + 1;
  }
  out << "index";
  for (int i = 0; i < set.dim; ++i) out << ",xi" << i;
  out << ",interior\n";
  std::vector<char> is_interior(set.m(), 0);
  for (auto q : set.interior) is_interior[q] = 1;
  char buf[32];
  for (std::size_t q = 0; q < set.m(); ++q) {
    out << q;
    for (int i = 0; i < set.dim; ++i) {
      const auto res = std::to_chars(buf, buf + sizeof buf, set.points[q][i]);
      out << ',' << std::string_view(buf, res.ptr - buf);
    }
    out << ',' << int(is_interior[q]) << '\n';
  }
}

}  // namespace igalsq
