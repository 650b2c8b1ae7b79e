#include "igalsq/sweep_lab.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "igalsq/errors.hpp"
#include "parallel.hpp"

namespace igalsq {

namespace {

std::string real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_comment_lines(std::ostream& out, std::string_view comment) {
  if (comment.empty()) return;
  std::size_t start = 0;
  while (start <= comment.size()) {
    const std::size_t end = std::min(comment.find('\n', start), comment.size());
    out << "# " << comment.substr(start, end - start) << '\n';
    start = end + 1;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

std::string RegularityMode::label() const { return kind == Kind::max ? "p-1" : std::to_string(value); }

RegularityMode parse_regularity_mode(std::string_view text) {
  if (text == "p-1" || text == "max") return {};
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || v < 0)
    throw DomainError("regularity must be 'p-1' or a nonnegative integer, got '" + std::string(text) + "'");
  return {RegularityMode::Kind::fixed, v};
}

void validate(const SweepConfig& c) {
  if (c.p.empty()) throw ConfigError("p", "degree list is empty");
  if (c.n.empty()) throw ConfigError("n", "mesh list is empty");
  if (c.k.empty()) throw ConfigError("k", "regularity list is empty");
  if (c.factor.empty()) throw ConfigError("factor", "oversampling list is empty");
  if (c.targets.empty()) throw ConfigError("targets", "target list is empty");
  for (int p : c.p) {
    if (p < 2) throw ConfigError("p", "degree must be >= 2 for a second-order collocation problem, got " + std::to_string(p));
    if (c.scheme != PointScheme::greville && (p < 3 || p > 7))
      throw ConfigError("p", "scheme '" + std::string(to_string(c.scheme)) +
                                 "' is tabulated for 3 <= p <= 7 only, got " + std::to_string(p));
    for (const auto& k : c.k) {
      const int kv = k.resolve(p);
      if (kv < 1 || kv > p - 1)
        throw ConfigError("k", "regularity " + k.label() + " gives k=" + std::to_string(kv) + " at p=" +
                                   std::to_string(p) + "; need 1 <= k <= p-1 for C^1 collocation");
    }
  }
  for (int n : c.n)
    if (n < 1) throw ConfigError("n", "number of spans must be >= 1, got " + std::to_string(n));
  for (double f : c.factor)
    if (!(f >= 1.0)) throw ConfigError("factor", "oversampling factor must be >= 1, got " + real(f));
  if (c.geometry.inner_radius <= 0.0 || c.geometry.outer_radius <= c.geometry.inner_radius)
    throw ConfigError("domain.inner_radius", "need 0 < inner_radius < outer_radius");
  if (c.geometry.mid_radius <= 0.0 || c.geometry.thickness <= 0.0 ||
      c.geometry.thickness >= 2.0 * c.geometry.mid_radius)
    throw ConfigError("domain.thickness", "need 0 < thickness < 2 * mid_radius");
}

std::size_t grid_size(const SweepConfig& c) {
  return c.k.size() * c.p.size() * c.n.size() * c.factor.size() * c.targets.size();
}

// ---------------------------------------------------------------------------
// Running

namespace {

std::pair<std::string, std::string> classify(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const RankDeficiencyError& x) {
    return {"rank_deficient", x.what()};
  } catch (const NonConvergenceError& x) {
    return {"non_convergence", x.what()};
  } catch (const SingularMapError& x) {
    return {"singular_map", x.what()};
  } catch (const FactorizationError& x) {
    return {"factorization", x.what()};
  } catch (const DomainError& x) {
    return {"domain_error", x.what()};
  } catch (const std::exception& x) {
    return {"error", x.what()};
  }
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<SweepRecord> run_point(const Discretization& disc, const std::vector<Target>& targets,
                                   const SpectralOptions& spectral, int assembly_threads) {
  std::vector<SweepRecord> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    auto& r = out[t];
    r.domain = disc.domain;
    r.d = domain_dimension(disc.domain);
    r.p = disc.p;
    r.n = disc.n;
    r.h = 1.0 / disc.n;
    r.k = disc.k;
    r.k_mode = disc.k == disc.p - 1 ? RegularityMode{} : RegularityMode{RegularityMode::Kind::fixed, disc.k};
    r.scheme = disc.scheme;
    r.factor = disc.factor;
    r.target = targets[t];
  }
  const auto t0 = std::chrono::steady_clock::now();
  DiscreteSystem sys;
  std::size_t nnz_ata = 0;
  try {
    sys = discretize(disc, assembly_threads);
    nnz_ata = normal_product_pattern(sys.A).nnz();
  } catch (...) {
    const auto [tag, msg] = classify(std::current_exception());
    for (auto& r : out) {
      r.status = tag;
      r.message = msg;
      r.seconds = elapsed(t0);
    }
    return out;
  }
  const double setup = elapsed(t0);
  for (auto& r : out) {
    r.dof = sys.dof();
    r.m = sys.m;
    r.m_in = sys.m_in();
    r.nnz_A = sys.A.nnz();
    r.nnz_AtA = nnz_ata;
    const auto t1 = std::chrono::steady_clock::now();
    try {
      const auto entry = spectral_sweep_entry(sys, r.target, spectral);
      r.sigma_max = entry.report.sigma_max;
      r.sigma_min = entry.report.sigma_min;
      r.cond = entry.report.cond;
      r.method = std::string(to_string(entry.report.method));
    } catch (...) {
      std::tie(r.status, r.message) = classify(std::current_exception());
    }
    r.seconds = setup + elapsed(t1);
  }
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, const SweepOptions& opts) {
  validate(config);
  std::vector<Discretization> points;
  std::vector<RegularityMode> modes;
  for (const auto& k : config.k)
    for (int p : config.p)
      for (int n : config.n)
        for (double f : config.factor) {
          Discretization disc;
          disc.domain = config.domain;
          disc.geometry = config.geometry;
          disc.p = p;
          disc.n = n;
          disc.k = k.resolve(p);
          disc.scheme = config.scheme;
          disc.factor = f;
          points.push_back(disc);
          modes.push_back(k);
        }
  std::vector<std::vector<SweepRecord>> results(points.size());
  detail::parallel_for(points.size(), opts.threads, [&](std::size_t i) {
    results[i] = run_point(points[i], config.targets, opts.spectral);
    for (auto& r : results[i]) r.k_mode = modes[i];
  });
  std::vector<SweepRecord> out;
  out.reserve(grid_size(config));
  for (auto& rs : results) out.insert(out.end(), rs.begin(), rs.end());
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, std::string_view comment) {
  write_comment_lines(out, comment);
  out << kSweepCsvHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.domain) << ',' << r.d << ',' << r.p << ',' << real(r.h) << ',' << r.k << ','
        << to_string(r.scheme) << ',' << real(r.factor) << ',' << to_string(r.target) << ',' << r.dof << ',' << r.m
        << ',' << r.m_in << ',' << real(r.sigma_max) << ',' << real(r.sigma_min) << ',' << real(r.cond) << ','
        << r.nnz_A << ',' << r.nnz_AtA << ',' << r.method << ',' << r.status << ',' << real(r.seconds) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Fits

std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::power_in_h: return "power_in_h";
    case FitModel::power_in_p: return "power_in_p";
    case FitModel::power_in_m: return "power_in_m";
    case FitModel::exp_in_p: return "exp_in_p";
  }
  return "unknown";
}

FitModel parse_fit_model(std::string_view name) {
  for (auto m : {FitModel::power_in_h, FitModel::power_in_p, FitModel::power_in_m, FitModel::exp_in_p})
    if (name == to_string(m)) return m;
  throw DomainError("unknown fit model '" + std::string(name) + "'");
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::sigma_max: return "sigma_max";
    case Quantity::sigma_min: return "sigma_min";
    case Quantity::cond: return "cond";
  }
  return "unknown";
}

Quantity parse_quantity(std::string_view name) {
  for (auto q : {Quantity::sigma_max, Quantity::sigma_min, Quantity::cond})
    if (name == to_string(q)) return q;
  throw DomainError("unknown quantity '" + std::string(name) + "' (expected sigma_max, sigma_min or cond)");
}

namespace {

FitResult ols(const std::vector<double>& x, const std::vector<double>& ly) {
  const std::size_t n = x.size();
  if (n < 3) throw InsufficientDataError("scaling fit needs at least 3 points, got " + std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("scaling fit needs at least two distinct abscissae");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (f.intercept + f.slope * x[i]);
    sse += e * e;
  }
  f.r2 = syy == 0.0 ? 1.0 : std::clamp(1.0 - sse / syy, 0.0, 1.0);
  return f;
}

std::vector<double> logs(const std::vector<double>& v, const char* what) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string("scaling fit needs positive finite ") + what);
    out.push_back(std::log(x));
  }
  return out;
}

}  // namespace

FitResult fit_power(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatchError("fit_power: x and y differ in length");
  FitResult f = ols(logs(x, "abscissae"), logs(y, "values"));
  f.x_used = x;
  f.y_used = y;
  return f;
}

FitResult fit_exponential(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatchError("fit_exponential: x and y differ in length");
  FitResult f = ols(x, logs(y, "values"));
  f.model = FitModel::exp_in_p;
  f.x_used = x;
  f.y_used = y;
  return f;
}

namespace {

double quantity_of(const SweepRecord& r, Quantity q) {
  switch (q) {
    case Quantity::sigma_max: return r.sigma_max;
    case Quantity::sigma_min: return r.sigma_min;
    case Quantity::cond: return r.cond;
  }
  return 0.0;
}

double variable_of(const SweepRecord& r, FitModel m) {
  switch (m) {
    case FitModel::power_in_h: return r.h;
    case FitModel::power_in_p:
    case FitModel::exp_in_p: return r.p;
    case FitModel::power_in_m: return static_cast<double>(r.m);
  }
  return 0.0;
}

// Everything a group of records must share for a fit in `model`.
std::string group_key(const SweepRecord& r, FitModel m) {
  std::ostringstream key;
  key << "domain=" << to_string(r.domain) << " target=" << to_string(r.target) << " scheme=" << to_string(r.scheme);
  const bool in_p = m == FitModel::power_in_p || m == FitModel::exp_in_p;
  if (!in_p) key << " p=" << r.p;
  if (in_p)
    key << " k=" << r.k_mode.label();
  else
    key << " k=" << r.k;
  if (m != FitModel::power_in_h) key << " n=" << r.n;
  if (m != FitModel::power_in_m) key << " factor=" << real(r.factor);
  return key.str();
}

}  // namespace

FitResult fit_scaling(const std::vector<SweepRecord>& records, FitModel model, Quantity quantity,
                      bool exclude_pre_asymptotic) {
  if (records.empty()) throw InsufficientDataError("scaling fit needs at least 3 points, got 0");
  const std::string key = group_key(records.front(), model);
  for (const auto& r : records)
    if (group_key(r, model) != key)
      throw DomainError("fit_scaling: records vary in more than the fit variable (" + key + " vs " +
                        group_key(r, model) + ")");

  std::vector<double> xs, ys, excluded;
  std::string law;
  std::optional<double> boundary;
  for (const auto& r : records) {
    const double x = variable_of(r, model);
    if (!r.ok()) {
      excluded.push_back(x);
      continue;
    }
    if (auto name = law_name(r.target, r.p, r.k, quantity)) {
      law = *name;
      if (model == FitModel::power_in_h && exclude_pre_asymptotic) {
        boundary = regime_boundary(*name, r.p, r.d);
        if (boundary && r.h > *boundary) {
          excluded.push_back(x);
          continue;
        }
      }
    }
    xs.push_back(x);
    ys.push_back(quantity_of(r, quantity));
  }
  FitResult f = model == FitModel::exp_in_p ? fit_exponential(xs, ys) : fit_power(xs, ys);
  f.model = model;
  f.x_excluded = std::move(excluded);
  f.law = std::move(law);
  f.regime_boundary = boundary;
  return f;
}

std::vector<GroupFit> fit_groups(const std::vector<SweepRecord>& records, const FitSpec& spec) {
  std::map<std::string, std::vector<SweepRecord>> groups;
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (r.target != spec.target) continue;
    const std::string key = group_key(r, spec.model);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r);
  }
  std::vector<GroupFit> out;
  for (const auto& key : order) {
    GroupFit g;
    g.group = key;
    try {
      g.fit = fit_scaling(groups[key], spec.model, spec.quantity);
    } catch (const std::exception& e) {
      g.error = e.what();
    }
    out.push_back(std::move(g));
  }
  return out;
}

void write_fit_series(std::ostream& out, const FitResult& fit, std::string_view comment) {
  write_comment_lines(out, comment);
  out << "# model=" << to_string(fit.model) << " slope=" << real(fit.slope) << " intercept=" << real(fit.intercept)
      << " r2=" << real(fit.r2) << '\n';
  if (!fit.law.empty()) {
    out << "# law=" << fit.law;
    if (fit.regime_boundary) out << " regime_boundary=" << real(*fit.regime_boundary) << " (h <= boundary kept)";
    out << '\n';
  }
  out << "# data\n";
  for (std::size_t i = 0; i < fit.x_used.size(); ++i) out << real(fit.x_used[i]) << ' ' << real(fit.y_used[i]) << '\n';
  out << "\n# fit\n";
  const bool power = fit.model != FitModel::exp_in_p;
  for (double x : fit.x_used) {
    const double t = power ? std::log(x) : x;
    out << real(x) << ' ' << real(std::exp(fit.intercept + fit.slope * t)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Reference laws

namespace {

using std::pow;
constexpr double kE = std::numbers::e;

struct Law {
  std::function<double(double h, double p, double d)> value;
  std::function<std::optional<double>(double p, double d)> boundary;
};

std::optional<double> none(double, double) { return std::nullopt; }

const std::map<std::string, Law, std::less<>>& law_table() {
  static const std::map<std::string, Law, std::less<>> table = [] {
    std::map<std::string, Law, std::less<>> t;
    auto b_k0 = [](double p, double d) -> std::optional<double> {
      return pow(pow(p, 2.0 + d / 2.0) * pow(4.0, -d * p), 0.5);
    };
    auto b_inv_p = [](double p, double) -> std::optional<double> { return 1.0 / p; };
    auto b_exp_half = [](double p, double d) -> std::optional<double> { return std::exp(-p * d / 2.0); };
    auto b_lsq = [](double p, double d) -> std::optional<double> { return std::exp(-p * d / 4.0) * pow(p, d / 8.0); };

    // Galerkin, k = 0.
    t["iga_g.M_0.lambda_min"] = {[](double h, double p, double d) { return pow(h, d) * pow(p, -d / 2) * pow(4.0, -p * d); }, none};
    t["iga_g.M_0.lambda_max"] = {[](double h, double p, double d) { return pow(h, d) * pow(p, -d); }, none};
    t["iga_g.M_0.cond"] = {[](double, double p, double d) { return pow(p, -d / 2) * pow(4.0, p * d); }, none};
    t["iga_g.K_0.lambda_min"] = {[b_k0](double h, double p, double d) {
                                   return h <= *b_k0(p, d) ? pow(h, d) * pow(p, -d)
                                                           : pow(h, d - 2) * pow(p, 2 - d / 2) * pow(4.0, -d * p);
                                 },
                                 b_k0};
    t["iga_g.K_0.lambda_max"] = {[](double h, double p, double d) { return pow(h, d - 2) * pow(p, 2 - d); }, none};
    t["iga_g.K_0.cond"] = {[b_k0](double h, double p, double d) {
                             return h <= *b_k0(p, d) ? pow(h, -2) * p * p : pow(p, -d / 2) * pow(4.0, d * p);
                           },
                           b_k0};

    // Galerkin, k = p - 1.
    t["iga_g.M_pm1.lambda_min"] = {[](double h, double p, double d) {
                                     return h <= 1.0 / p ? pow(h, d) * std::exp(-p * d)
                                                         : pow(kE / 4, -d / h) * pow(h / p, d / 2) * pow(4.0, -p * d);
                                   },
                                   b_inv_p};
    t["iga_g.M_pm1.lambda_max"] = {[](double h, double p, double d) { return h <= 1.0 / p ? pow(h, d) : pow(p, -d); },
                                   b_inv_p};
    t["iga_g.M_pm1.cond"] = {[](double h, double p, double d) {
                               return h <= 1.0 / p ? std::exp(p * d)
                                                   : pow(kE / 4, d / h) * pow(h * p, -d / 2) * pow(4.0, p * d);
                             },
                             b_inv_p};
    t["iga_g.K_pm1.lambda_min"] = {[](double h, double p, double d) {
                                     if (h <= std::exp(-p * d / 2)) return pow(h, d);
                                     if (h <= 1.0 / p) return pow(h, d - 2) * std::exp(-p * d);
                                     return pow(kE / 4, -d / h) * pow(p, 2 - d / 2) * pow(h, d / 2) * pow(4.0, -p * d);
                                   },
                                   b_exp_half};
    t["iga_g.K_pm1.lambda_max"] = {[](double h, double p, double d) {
                                     return h <= 1.0 / p && p > 2 ? p * pow(h, d - 2) : pow(p, 2 - d) / h;
                                   },
                                   [](double p, double) -> std::optional<double> {
                                     if (p > 2) return 1.0 / p;
                                     return std::nullopt;
                                   }};
    t["iga_g.K_pm1.cond"] = {[](double h, double p, double d) {
                               if (h <= std::exp(-p * d / 2)) return pow(h, -2) * p;
                               if (h <= 1.0 / p) return p * std::exp(d * p);
                               return pow(kE / 4, d / h) * pow(p, -d / 2) * pow(h, -d / 2 - 1) * pow(4.0, d * p);
                             },
                             b_exp_half};

    // Least-squares collocation.
    t["iga_l.A_pm1.sigma_min"] = {[b_lsq](double h, double p, double d) {
                                    return h <= *b_lsq(p, d) ? 1.0
                                                             : pow(kE / 2, -2 * d * p) * pow(p, pow(4 / kE, d)) * pow(h, -2);
                                  },
                                  b_lsq};
    t["iga_l.A_pm1.sigma_max"] = {[](double h, double p, double) { return pow(h, -2) * p * p; }, none};
    t["iga_l.A_pm1.cond"] = {[b_lsq](double h, double p, double d) {
                               return h <= *b_lsq(p, d) ? pow(h, -2) * p * p
                                                        : pow(kE / 2, 2 * d * p) * pow(p, 2 - pow(4 / kE, d));
                             },
                             b_lsq};
    t["iga_l.M_pm1.sigma_min"] = {[](double, double p, double d) { return std::exp(-d * p / 2); }, none};
    t["iga_l.M_pm1.sigma_max"] = {[](double, double, double) { return 1.0; }, none};
    t["iga_l.M_pm1.cond"] = {[](double, double p, double d) { return std::exp(d * p / 2); }, none};
    t["iga_l.A_1.sigma_min"] = {[](double, double, double) { return 1.0; }, none};
    t["iga_l.A_1.sigma_max"] = {[](double h, double p, double) { return pow(h, -2) * pow(p, 2.5); }, none};
    t["iga_l.A_1.cond"] = {[](double h, double p, double) { return pow(h, -2) * pow(p, 2.5); }, none};
    t["iga_l.M_1.sigma_min"] = {[](double, double p, double d) { return pow(2 * d, -p); }, none};
    t["iga_l.M_1.sigma_max"] = {[](double, double, double) { return 1.0; }, none};
    t["iga_l.M_1.cond"] = {[](double, double p, double d) { return pow(2 * d, p); }, none};
    return t;
  }();
  return table;
}

const Law& find_law(std::string_view name) {
  const auto& t = law_table();
  const auto it = t.find(name);
  if (it == t.end()) throw UnknownLawError("unknown reference law '" + std::string(name) + "'");
  return it->second;
}

}  // namespace

double reference_law(std::string_view name, double h, int p, int d) {
  return find_law(name).value(h, static_cast<double>(p), static_cast<double>(d));
}

std::optional<double> regime_boundary(std::string_view name, int p, int d) {
  return find_law(name).boundary(static_cast<double>(p), static_cast<double>(d));
}

std::vector<std::string> reference_law_names() {
  std::vector<std::string> out;
  for (const auto& [name, law] : law_table()) out.push_back(name);
  return out;
}

std::optional<std::string> law_name(Target target, int p, int k, Quantity quantity) {
  std::string reg;
  if (k == p - 1)
    reg = "pm1";
  else if (k == 1)
    reg = "1";
  else
    return std::nullopt;
  return std::string("iga_l.") + (target == Target::collocation ? "A_" : "M_") + reg + "." +
         std::string(to_string(quantity));
}

}  // namespace igalsq
