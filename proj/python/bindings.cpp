// Python bindings: igalsq._core.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "igalsq/errors.hpp"
#include "igalsq/experiment_config.hpp"

namespace py = pybind11;
using namespace igalsq;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Arrays are built from explicit shape vectors; the single-count
// constructor misbehaves with older pybind11 releases under C++20.
template <class T>
py::array_t<T> vector_array(std::size_t n) {
  return py::array_t<T>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(n)});
}

py::array_t<double> to_array(const std::vector<double>& v) {
  auto a = vector_array<double>(v.size());
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict csr_dict(const CsrMatrix& m) {
  auto data = vector_array<double>(m.nnz());
  auto indices = vector_array<std::int64_t>(m.nnz());
  auto indptr = vector_array<std::int64_t>(m.offsets.size());
  std::copy(m.values.begin(), m.values.end(), data.mutable_data());
  std::copy(m.columns.begin(), m.columns.end(), indices.mutable_data());
  std::copy(m.offsets.begin(), m.offsets.end(), indptr.mutable_data());
  py::dict d;
  d["data"] = data;
  d["indices"] = indices;
  d["indptr"] = indptr;
  d["shape"] = py::make_tuple(m.rows, m.cols);
  return d;
}

CsrMatrix csr_from(Array data, py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> indices,
                   py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> indptr,
                   std::pair<std::size_t, std::size_t> shape) {
  CsrMatrix m;
  m.rows = shape.first;
  m.cols = shape.second;
  m.values.assign(data.data(), data.data() + data.size());
  m.columns.assign(indices.data(), indices.data() + indices.size());
  m.offsets.assign(indptr.data(), indptr.data() + indptr.size());
  m.validate();
  return m;
}

Discretization make_disc(const std::string& domain, int p, int n, int k, const std::string& scheme, double factor,
                         const std::string& source, const std::map<std::string, double>& geometry) {
  Discretization d;
  d.domain = parse_domain_tag(domain);
  d.p = p;
  d.n = n;
  d.k = k;
  d.scheme = parse_point_scheme(scheme);
  d.factor = factor;
  d.source = parse_manufactured_case(source);
  for (const auto& [key, v] : geometry) {
    if (key == "inner_radius")
      d.geometry.inner_radius = v;
    else if (key == "outer_radius")
      d.geometry.outer_radius = v;
    else if (key == "mid_radius")
      d.geometry.mid_radius = v;
    else if (key == "thickness")
      d.geometry.thickness = v;
    else
      throw DomainError("unknown geometry parameter '" + key + "'");
  }
  check_manufactured_case(d.source, d.domain);
  return d;
}

py::dict record_dict(const SweepRecord& r) {
  py::dict d;
  d["domain"] = std::string(to_string(r.domain));
  d["d"] = r.d;
  d["p"] = r.p;
  d["n"] = r.n;
  d["h"] = r.h;
  d["k"] = r.k;
  d["scheme"] = std::string(to_string(r.scheme));
  d["factor"] = r.factor;
  d["target"] = std::string(to_string(r.target));
  d["dof"] = r.dof;
  d["m"] = r.m;
  d["m_in"] = r.m_in;
  d["sigma_max"] = r.sigma_max;
  d["sigma_min"] = r.sigma_min;
  d["cond"] = r.cond;
  d["nnz_A"] = r.nnz_A;
  d["nnz_AtA"] = r.nnz_AtA;
  d["method"] = r.method;
  d["status"] = r.status;
  d["message"] = r.message;
  d["seconds"] = r.seconds;
  return d;
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["model"] = std::string(to_string(f.model));
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["r2"] = f.r2;
  d["x_used"] = f.x_used;
  d["y_used"] = f.y_used;
  d["x_excluded"] = f.x_excluded;
  d["law"] = f.law;
  d["regime_boundary"] = f.regime_boundary ? py::cast(*f.regime_boundary) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Least-squares isogeometric collocation: splines, systems, spectra, solutions, sweeps";

  auto domain_error = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", domain_error.ptr());
  py::register_exception<DimensionMismatchError>(m, "DimensionMismatchError", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError", numerical.ptr());
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", numerical.ptr());
  py::register_exception<SingularMapError>(m, "SingularMapError", numerical.ptr());

  m.def(
      "knot_vector",
      [](int p, int n, int k) {
        const KnotVector kv(p, n, k);
        return to_array(std::vector<double>(kv.knots().begin(), kv.knots().end()));
      },
      py::arg("p"), py::arg("n"), py::arg("k"), "Open uniform knot vector with n spans and C^k continuity.");
  m.def(
      "num_basis", [](int p, int n, int k) { return KnotVector(p, n, k).num_basis(); }, py::arg("p"), py::arg("n"),
      py::arg("k"));
  m.def(
      "bspline_basis",
      [](int p, int n, int k, Array x, int deriv) {
        const KnotVector kv(p, n, k);
        const auto nb = static_cast<py::ssize_t>(kv.num_basis());
        py::array_t<double> out({static_cast<py::ssize_t>(x.size()), nb});
        auto o = out.mutable_unchecked<2>();
        for (py::ssize_t i = 0; i < x.size(); ++i) {
          for (py::ssize_t j = 0; j < nb; ++j) o(i, j) = 0.0;
          const auto jet = eval_bspline_jet(kv, x.data()[i], deriv);
          for (int a = 0; a <= p; ++a) o(i, jet.first + a) = jet.ders[deriv][a];
        }
        return out;
      },
      py::arg("p"), py::arg("n"), py::arg("k"), py::arg("x"), py::arg("deriv") = 0,
      "Matrix of shape (len(x), num_basis) with the deriv-th derivatives of every B-spline.");
  m.def(
      "greville_abscissae", [](int p, int n, int k) { return to_array(greville_abscissae(KnotVector(p, n, k))); },
      py::arg("p"), py::arg("n"), py::arg("k"));
  m.def(
      "greville_points", [](int p, int m_dir) { return to_array(greville_points(p, m_dir)); }, py::arg("p"),
      py::arg("m"), "Greville abscissae of the C^{p-1} space with m - p spans.");
  m.def(
      "sc_points", [](int p, int n, int k) { return to_array(sc_points(p, KnotVector(p, n, k))); }, py::arg("p"),
      py::arg("n"), py::arg("k"));
  m.def(
      "cg_points", [](int p, int n, int k) { return to_array(cg_points(p, KnotVector(p, n, k))); }, py::arg("p"),
      py::arg("n"), py::arg("k"));
  m.def(
      "collocation_points",
      [](const std::string& domain, int p, int n, int k, const std::string& scheme, double factor) {
        const auto set = collocation_points(make_disc(domain, p, n, k, scheme, factor, "zero", {}));
        py::array_t<double> pts({static_cast<py::ssize_t>(set.m()), static_cast<py::ssize_t>(set.dim)});
        auto o = pts.mutable_unchecked<2>();
        for (std::size_t q = 0; q < set.m(); ++q)
          for (int i = 0; i < set.dim; ++i) o(q, i) = set.points[q][i];
        auto interior = vector_array<bool>(set.m());
        std::fill(interior.mutable_data(), interior.mutable_data() + set.m(), false);
        for (auto q : set.interior) interior.mutable_data()[q] = true;
        return py::make_tuple(pts, interior);
      },
      py::arg("domain"), py::arg("p"), py::arg("n"), py::arg("k"), py::arg("scheme") = "greville",
      py::arg("factor") = 1.0, "(points of shape (m, d), interior mask)");

  m.def(
      "assemble",
      [](const std::string& domain, int p, int n, int k, const std::string& scheme, double factor,
         const std::string& source, const std::map<std::string, double>& geometry, int threads) {
        DiscreteSystem sys;
        {
          py::gil_scoped_release release;
          sys = discretize(make_disc(domain, p, n, k, scheme, factor, source, geometry), threads);
        }
        py::dict d;
        d["A"] = csr_dict(sys.A);
        d["M"] = csr_dict(sys.M);
        d["b"] = to_array(sys.b);
        d["interior_basis"] = sys.interior_basis;
        d["dof"] = sys.dof();
        d["m"] = sys.m;
        d["m_in"] = sys.m_in();
        d["nnz_AtA"] = normal_product_pattern(sys.A).nnz();
        return d;
      },
      py::arg("domain"), py::arg("p"), py::arg("n"), py::arg("k"), py::arg("scheme") = "greville",
      py::arg("factor") = 1.0, py::arg("source") = "zero", py::arg("geometry") = std::map<std::string, double>{},
      py::arg("threads") = 0,
      "Collocation matrix A, mass matrix M (CSR dicts) and load vector b.");

  m.def(
      "singular_extremes",
      [](Array data, py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> indices,
         py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> indptr,
         std::pair<std::size_t, std::size_t> shape, std::optional<std::string> method, std::size_t dense_threshold,
         double tol, int max_iter, std::uint64_t seed) {
        const CsrMatrix a = csr_from(data, indices, indptr, shape);
        SpectralOptions o;
        o.dense_threshold = dense_threshold;
        o.tol = tol;
        o.max_iter = max_iter;
        o.seed = seed;
        if (method) {
          if (*method == "dense_svd")
            o.force = SpectralMethod::dense_svd;
          else if (*method == "iterative")
            o.force = SpectralMethod::iterative;
          else
            throw DomainError("method must be 'dense_svd' or 'iterative'");
        }
        SpectralReport r;
        {
          py::gil_scoped_release release;
          r = singular_extremes(a, o);
        }
        py::dict d;
        d["sigma_max"] = r.sigma_max;
        d["sigma_min"] = r.sigma_min;
        d["cond"] = r.cond;
        d["method"] = std::string(to_string(r.method));
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("data"), py::arg("indices"), py::arg("indptr"), py::arg("shape"), py::arg("method") = py::none(),
      py::arg("dense_threshold") = 2000, py::arg("tol") = 1e-10, py::arg("max_iter") = 10000, py::arg("seed") = 1234);

  m.def(
      "solve",
      [](const std::string& domain, int p, int n, int k, const std::string& scheme, double factor,
         const std::string& source, const std::map<std::string, double>& geometry, int samples) {
        const auto disc = make_disc(domain, p, n, k, scheme, factor, source, geometry);
        Solution sol;
        double err = 0.0;
        {
          py::gil_scoped_release release;
          sol = solve_least_squares(discretize(disc, 0));
          err = max_solution_error(solution_space(disc), make_patch(disc.domain, disc.geometry), sol, disc.source,
                                   samples);
        }
        py::dict d;
        d["u"] = to_array(sol.u);
        d["interior_basis"] = sol.interior_basis;
        d["residual_norm"] = sol.residual_norm;
        d["normal_residual"] = sol.normal_residual;
        d["method"] = std::string(to_string(sol.method));
        d["max_error"] = err;
        return d;
      },
      py::arg("domain"), py::arg("p"), py::arg("n"), py::arg("k"), py::arg("scheme") = "greville",
      py::arg("factor") = 1.0, py::arg("source") = "polynomial", py::arg("geometry") = std::map<std::string, double>{},
      py::arg("samples") = 21,
      "Least-squares solution of the manufactured problem and its max error on a sample grid.");

  m.def(
      "sweep",
      [](const std::string& toml_text, const std::vector<std::string>& overrides, std::optional<int> threads) {
        const auto cfg = parse_config(toml_text, overrides);
        SweepOptions o;
        o.threads = effective_threads(cfg, threads);
        o.spectral = spectral_options(cfg);
        std::vector<SweepRecord> rs;
        {
          py::gil_scoped_release release;
          rs = run_sweep(cfg.grid, o);
        }
        py::list out;
        for (const auto& r : rs) out.append(record_dict(r));
        return out;
      },
      py::arg("config"), py::arg("overrides") = std::vector<std::string>{}, py::arg("threads") = py::none(),
      "Run the sweep described by a TOML configuration; one dict per record.");
  m.def(
      "echo_config",
      [](const std::string& toml_text, const std::vector<std::string>& overrides) {
        return echo(parse_config(toml_text, overrides));
      },
      py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
      "Validated effective configuration as TOML.");

  m.def(
      "fit_power", [](const std::vector<double>& x, const std::vector<double>& y) { return fit_dict(fit_power(x, y)); },
      py::arg("x"), py::arg("y"), "OLS of log y on log x.");
  m.def(
      "fit_exponential",
      [](const std::vector<double>& x, const std::vector<double>& y) { return fit_dict(fit_exponential(x, y)); },
      py::arg("x"), py::arg("y"), "OLS of log y on x.");
  m.def("reference_law", &reference_law, py::arg("name"), py::arg("h"), py::arg("p"), py::arg("d"));
  m.def("regime_boundary", &regime_boundary, py::arg("name"), py::arg("p"), py::arg("d"));
  m.def("reference_law_names", &reference_law_names);
}
