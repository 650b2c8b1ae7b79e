// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3 7        run criteria 3 and 7
//
// Exit status is the number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "igalsq/assembly.hpp"
#include "igalsq/collocation_points.hpp"
#include "igalsq/lsq_solver.hpp"
#include "igalsq/spectra.hpp"
#include "igalsq/spline_core.hpp"
#include "igalsq/sweep_lab.hpp"
#include "oracles.hpp"

using namespace igalsq;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) detail += " [x]";
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo - 1.0;
}

SweepConfig grid_1d(std::vector<int> p, std::vector<int> n, RegularityMode k, std::vector<double> factor,
                    Target target) {
  SweepConfig c;
  c.p = std::move(p);
  c.n = std::move(n);
  c.k = {k};
  c.factor = std::move(factor);
  c.targets = {target};
  return c;
}

RegularityMode fixed_k(int k) { return RegularityMode{RegularityMode::Kind::fixed, k}; }
const RegularityMode kMax{};

std::vector<SweepRecord> sweep(const SweepConfig& c, Outcome& out) {
  auto records = run_sweep(c);
  for (const auto& r : records)
    if (!r.ok()) out.check(false, fmt("p=%d n=%d k=%d %s", r.p, r.n, r.k, r.status.c_str()));
  return records;
}

std::vector<SweepRecord> select(const std::vector<SweepRecord>& all, const std::function<bool(const SweepRecord&)>& f) {
  std::vector<SweepRecord> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), f);
  return out;
}

std::vector<double> column(const std::vector<SweepRecord>& rs, double SweepRecord::*field) {
  std::vector<double> out;
  for (const auto& r : rs) out.push_back(r.*field);
  return out;
}

// ---------------------------------------------------------------------------

Outcome spline_oracles() {
  Outcome out;
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double pou = 0.0, fd1 = 0.0, fd2 = 0.0, lin = 0.0;
  const int n = 7;
  const double step = 1e-5;
  for (int p = 2; p <= 10; ++p) {
    for (int k : {1, p - 1}) {
      const auto kv = build_knot_vector(p, n, k);
      const auto g = greville_abscissae(kv);
      const auto breaks = kv.breaks();
      for (int s = 0; s < 1000; ++s) {
        const double xi = unit(rng);
        const auto e = eval_bspline(kv, xi, 2);
        double sum = 0.0, x = 0.0;
        for (std::size_t a = 0; a < e.size(); ++a) {
          sum += e.values[a];
          x += g[e.indices[a]] * e.values[a];
        }
        pou = std::max(pou, std::abs(sum - 1.0));
        lin = std::max(lin, std::abs(x - xi));

        // Richardson-extrapolated central differences, one knot span.
        const double y = oracle::away_from(breaks, 1e-3, rng);
        const auto c = eval_bspline(kv, y, 2);
        auto shifted = [&](double dx, int order) {
          const auto s2 = eval_bspline(kv, y + dx, 1);
          std::vector<double> v(c.size());
          for (std::size_t a = 0; a < c.size(); ++a)
            v[a] = order == 0 ? s2.values[a] : s2.gradients[a];
          return v;
        };
        for (int order : {0, 1}) {
          const auto p1 = shifted(step, order), m1 = shifted(-step, order);
          const auto p2 = shifted(2 * step, order), m2 = shifted(-2 * step, order);
          double scale = 1.0, err = 0.0;
          for (std::size_t a = 0; a < c.size(); ++a) {
            const double want = order == 0 ? c.gradients[a] : c.hessians[a];
            const double d = (8.0 * (p1[a] - m1[a]) - (p2[a] - m2[a])) / (12.0 * step);
            scale = std::max(scale, std::abs(want));
            err = std::max(err, std::abs(d - want));
          }
          (order == 0 ? fd1 : fd2) = std::max(order == 0 ? fd1 : fd2, err / scale);
        }
      }
    }
  }
  out.check(pou < 1e-12, fmt("partition of unity %.2e", pou));
  out.check(fd1 < 1e-6, fmt("d1 fd %.2e", fd1));
  out.check(fd2 < 1e-6, fmt("d2 fd %.2e", fd2));
  out.check(lin < 1e-12, fmt("greville linear %.2e", lin));
  return out;
}

Outcome cond_vs_h() {
  Outcome out;
  const auto rs = sweep(grid_1d({4}, {10, 20, 40, 80, 100}, kMax, {4.0}, Target::collocation), out);
  const auto fit = fit_scaling(rs, FitModel::power_in_h, Quantity::cond);
  out.check(within(fit.slope, -2.3, -1.7),
            fmt("cond ~ h^%.3f (%zu used, %zu excluded)", fit.slope, fit.x_used.size(), fit.x_excluded.size()));
  return out;
}

Outcome sigma_max_a1() {
  Outcome out;
  const auto in_p = sweep(grid_1d({2, 4, 6, 8, 10, 12}, {100}, fixed_k(1), {4.0}, Target::collocation), out);
  const auto fp = fit_scaling(in_p, FitModel::power_in_p, Quantity::sigma_max);
  out.check(within(fp.slope, 2.2, 2.8), fmt("sigma_max ~ p^%.3f", fp.slope));
  const auto in_h = sweep(grid_1d({8}, {10, 20, 40, 80, 100}, fixed_k(1), {4.0}, Target::collocation), out);
  const auto fh = fit_scaling(in_h, FitModel::power_in_h, Quantity::sigma_max);
  out.check(within(fh.slope, -2.2, -1.8),
            fmt("sigma_max ~ h^%.3f (%zu used)", fh.slope, fh.x_used.size()));
  return out;
}

Outcome sigma_min_c0() {
  Outcome out;
  const auto a = sweep(grid_1d({6}, {10, 100}, fixed_k(1), {4.0}, Target::collocation), out);
  const double var = spread(column(a, &SweepRecord::sigma_min));
  out.check(var < 0.25, fmt("sigma_min(A1) spread %.3f", var));

  std::vector<int> ps(9);
  std::iota(ps.begin(), ps.end(), 2);
  const auto m1 = sweep(grid_1d(ps, {20}, fixed_k(1), {4.0}, Target::mass), out);
  const auto f1 = fit_scaling(m1, FitModel::exp_in_p, Quantity::sigma_min);
  out.check(std::abs(f1.slope + std::log(2.0)) <= 0.15, fmt("d=1 sigma_min(M1) rate %.3f", f1.slope));

  auto c2 = grid_1d({2, 3, 4, 5, 6}, {10}, fixed_k(1), {4.0}, Target::mass);
  c2.domain = DomainTag::quarter_annulus;
  const auto m2 = sweep(c2, out);
  const auto f2 = fit_scaling(m2, FitModel::exp_in_p, Quantity::sigma_min);
  out.check(std::abs(f2.slope + std::log(4.0)) <= 0.2, fmt("d=2 sigma_min(M1) rate %.3f", f2.slope));
  return out;
}

std::vector<SweepRecord> mass_1d_grid(Outcome& out) {
  std::vector<int> ps(13);
  std::iota(ps.begin(), ps.end(), 2);
  return sweep(grid_1d(ps, {50}, kMax, {4.0}, Target::mass), out);
}

Outcome cond_mass() {
  Outcome out;
  const auto r1 = mass_1d_grid(out);
  const auto f1 = fit_scaling(r1, FitModel::exp_in_p, Quantity::cond);
  out.check(std::abs(f1.slope - 0.5) <= 0.15, fmt("d=1 cond(M) rate %.3f", f1.slope));

  auto c2 = grid_1d({2, 3, 4, 5, 6, 7, 8}, {10}, kMax, {4.0}, Target::mass);
  c2.domain = DomainTag::quarter_annulus;
  const auto r2 = sweep(c2, out);
  const auto f2 = fit_scaling(r2, FitModel::exp_in_p, Quantity::cond);
  out.check(std::abs(f2.slope - 1.0) <= 0.2, fmt("d=2 cond(M) rate %.3f", f2.slope));
  return out;
}

Outcome sigma_max_mass() {
  Outcome out;
  const double var = spread(column(mass_1d_grid(out), &SweepRecord::sigma_max));
  out.check(var < 0.25, fmt("sigma_max(M) spread %.3f", var));
  return out;
}

Outcome oversampling() {
  Outcome out;
  std::vector<double> factors;
  for (int i = 0; i <= 28; ++i) factors.push_back(1.0 + 0.25 * i);
  const auto rs = sweep(grid_1d({8}, {20}, kMax, factors, Target::collocation), out);
  const auto fp = fit_scaling(rs, FitModel::power_in_m, Quantity::sigma_max);
  out.check(within(fp.slope, 0.45, 0.65), fmt("k=p-1 sigma_max ~ m^%.3f", fp.slope));

  const auto r1 = sweep(grid_1d({8}, {20}, fixed_k(1), factors, Target::collocation), out);
  const auto f1 = fit_scaling(r1, FitModel::power_in_m, Quantity::sigma_max);
  out.check(within(f1.slope, 0.38, 0.58), fmt("k=1 sigma_max ~ m^%.3f", f1.slope));

  const auto at = [&](double f) {
    return select(r1, [f](const SweepRecord& r) { return r.factor == f; }).at(0).cond;
  };
  out.check(at(4.0) < at(1.0), fmt("k=1 cond %.4g at factor 4, %.4g at 1", at(4.0), at(1.0)));
  return out;
}

Outcome sparsity() {
  Outcome out;
  struct Pattern {
    std::size_t nnz, dof;
  };
  const auto pattern = [](int n, int k) {
    Discretization disc;
    disc.domain = DomainTag::quarter_annulus;
    disc.p = 8;
    disc.n = n;
    disc.k = k;
    disc.factor = 4.0;
    const auto sys = discretize(disc);
    return Pattern{normal_product_pattern(sys.A).nnz(), sys.dof()};
  };
  const auto datum = pattern(5, 1);
  const double rel = std::abs(static_cast<double>(datum.nnz) - 126025.0) / 126025.0;
  out.check(rel <= 0.10, fmt("nnz(AtA) %zu vs 126025%s", datum.nnz, datum.nnz == 126025 ? " exact" : ""));

  bool grows = true, denser = true;
  std::vector<Pattern> prev;
  for (int n : {5, 10, 15}) {
    const Pattern lo = n == 5 ? datum : pattern(n, 1), hi = pattern(n, 7);
    const auto fill = [](const Pattern& q) { return static_cast<double>(q.nnz) / (double(q.dof) * double(q.dof)); };
    denser = denser && fill(hi) > fill(lo);
    if (!prev.empty()) grows = grows && lo.nnz > prev[0].nnz && hi.nnz > prev[1].nnz;
    prev = {lo, hi};
  }
  out.check(grows, "nnz grows as h decreases");
  out.check(denser, "k=p-1 fill above k=1");
  return out;
}

CsrMatrix random_sparse(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cols_d(20, 500);
  std::uniform_real_distribution<double> u(-1.0, 1.0), mag(0.5, 2.0), dens(0.005, 0.05);
  const int cols = cols_d(rng);
  const int rows = cols + std::uniform_int_distribution<int>(0, cols)(rng);
  const double density = dens(rng);
  std::bernoulli_distribution keep(density);
  std::vector<Eigen::Triplet<double>> trips;
  for (int j = 0; j < cols; ++j) trips.emplace_back(j, j, mag(rng));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (keep(rng)) trips.emplace_back(i, j, u(rng));
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  CsrMatrix a;
  a.rows = rows;
  a.cols = cols;
  a.offsets.assign(m.outerIndexPtr(), m.outerIndexPtr() + rows + 1);
  a.columns.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
  a.values.assign(m.valuePtr(), m.valuePtr() + m.nonZeros());
  return a;
}

Outcome spectra_oracle() {
  Outcome out;
  std::mt19937_64 rng(9);
  double worst_max = 0.0, worst_min = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto a = random_sparse(rng);
    SpectralOptions dense, iter;
    dense.force = SpectralMethod::dense_svd;
    iter.force = SpectralMethod::iterative;
    iter.tol = 1e-14;
    iter.max_iter = 100000;
    const auto d = singular_extremes(a, dense);
    const auto i = singular_extremes(a, iter);
    worst_max = std::max(worst_max, std::abs(i.sigma_max - d.sigma_max) / d.sigma_max);
    worst_min = std::max(worst_min, std::abs(i.sigma_min - d.sigma_min) / d.sigma_min);
  }
  out.check(worst_max < 1e-6, fmt("sigma_max rel %.2e", worst_max));
  out.check(worst_min < 1e-6, fmt("sigma_min rel %.2e", worst_min));
  return out;
}

Outcome solver() {
  Outcome out;
  const auto solve_case = [&](DomainTag domain, int p, int n, int k, ManufacturedCase source, int samples) {
    Discretization disc;
    disc.domain = domain;
    disc.p = p;
    disc.n = n;
    disc.k = k;
    disc.factor = 4.0;
    disc.source = source;
    const auto sys = discretize(disc);
    const auto sol = solve_least_squares(sys);
    double bnorm = 0.0;
    for (double x : sys.b) bnorm += x * x;
    bnorm = std::sqrt(bnorm);
    const double err = max_solution_error(solution_space(disc), make_patch(domain), sol, source, samples);
    return std::pair{sol.residual_norm / bnorm, err};
  };
  for (auto [domain, name] : {std::pair{DomainTag::interval, "1D"}, std::pair{DomainTag::quarter_annulus, "2D"}}) {
    const auto [res, err] = solve_case(domain, 4, 6, 3, ManufacturedCase::polynomial, domain == DomainTag::interval ? 401 : 41);
    out.check(res < 1e-10 && err < 1e-9, fmt("%s polynomial residual %.1e error %.1e", name, res, err));
  }
  std::vector<double> errs;
  for (int n : {10, 20, 40}) errs.push_back(solve_case(DomainTag::interval, 3, n, 2, ManufacturedCase::sine, 401).second);
  out.check(errs[1] < errs[0] && errs[2] < errs[1], fmt("sine errors %.2e %.2e %.2e", errs[0], errs[1], errs[2]));
  return out;
}

Outcome parity() {
  Outcome out;
  for (auto scheme : {PointScheme::sc, PointScheme::cg}) {
    auto c = grid_1d({3, 4}, {20}, kMax, {1.0}, Target::collocation);
    c.scheme = scheme;
    const auto rs = sweep(c, out);
    const double k3 = rs.at(0).cond, k4 = rs.at(1).cond;
    if (scheme == PointScheme::sc)
      out.check(k3 < k4, fmt("SC cond p=3 %.4g, p=4 %.4g", k3, k4));
    else
      out.check(k4 < k3, fmt("CG cond p=3 %.4g, p=4 %.4g", k3, k4));
  }
  return out;
}

struct Criterion {
  const char* name;
  double budget_s;  // 0: no runtime bound
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"spline and Greville oracles", 10, spline_oracles},
    {"cond(A_{p-1}) vs h, 1D", 120, cond_vs_h},
    {"sigma_max(A_1) vs p and h, 1D", 180, sigma_max_a1},
    {"sigma_min(A_1) flat, sigma_min(M_1) decay", 0, sigma_min_c0},
    {"cond(M_{p-1}) exponential rate", 300, cond_mass},
    {"sigma_max(M) flat", 0, sigma_max_mass},
    {"oversampling, p=8 h=0.05", 0, oversampling},
    {"sparsity of AtA, annulus p=8", 0, sparsity},
    {"iterative vs dense extremes", 60, spectra_oracle},
    {"least-squares solver reproduction", 0, solver},
    {"SC/CG parity, n=20", 0, parity},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= static_cast<int>(std::size(kCriteria)); ++i) which.push_back(i);

  int failed = 0;
  for (int id : which) {
    if (id < 1 || id > static_cast<int>(std::size(kCriteria))) {
      std::fprintf(stderr, "no criterion %d\n", id);
      return 2;
    }
    const auto& c = kCriteria[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) o.check(s < c.budget_s, fmt("%.1fs of %.0fs", s, c.budget_s));
    else o.detail += fmt("; %.1fs", s);
    std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
