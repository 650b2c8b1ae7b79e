#include "igalsq/experiment_config.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "igalsq/errors.hpp"
#include "toml.hpp"

namespace igalsq {

namespace {

using Keys = std::set<std::string, std::less<>>;

std::string join(std::string_view a, std::string_view b) { return std::string(a) + "." + std::string(b); }

void reject_unknown(const toml::table& t, std::string_view section, const Keys& allowed) {
  for (const auto& [key, node] : t)
    if (!allowed.contains(key.str())) throw ConfigError(join(section, key.str()), "unknown key");
}

const toml::table* section(const toml::table& root, std::string_view name, bool required) {
  const toml::node* node = root.get(name);
  if (!node) {
    if (required) throw ConfigError(std::string(name), "missing section [" + std::string(name) + "]");
    return nullptr;
  }
  if (!node->is_table()) throw ConfigError(std::string(name), "expected a table");
  return node->as_table();
}

std::int64_t as_int(const toml::node& n, const std::string& key) {
  if (auto v = n.value_exact<std::int64_t>()) return *v;
  throw ConfigError(key, "expected an integer");
}

double as_real(const toml::node& n, const std::string& key) {
  if (n.is_floating_point()) return *n.value<double>();
  if (n.is_integer()) return static_cast<double>(*n.value<std::int64_t>());
  throw ConfigError(key, "expected a number");
}

std::string as_string(const toml::node& n, const std::string& key) {
  if (auto v = n.value_exact<std::string>()) return *v;
  throw ConfigError(key, "expected a string");
}

// A scalar or an array of scalars.
template <class F>
void for_each_item(const toml::node& n, const std::string& key, F&& f) {
  if (const auto* arr = n.as_array()) {
    if (arr->empty()) throw ConfigError(key, "list is empty");
    for (const auto& item : *arr) f(item);
  } else {
    f(n);
  }
}

template <class T, class Parse>
T parse_name(const std::string& text, const std::string& key, Parse parse) {
  try {
    return parse(text);
  } catch (const DomainError& e) {
    throw ConfigError(key, e.what());
  }
}

int checked_int(std::int64_t v, const std::string& key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(key, "integer out of range");
  return static_cast<int>(v);
}

const toml::node& required(const toml::table& t, std::string_view section, std::string_view key) {
  const toml::node* n = t.get(key);
  if (!n) throw ConfigError(join(section, key), "missing required key");
  return *n;
}

void apply_override(toml::table& root, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(item, "override must have the form section.key=value");
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  const std::string path = trim(item.substr(0, eq));
  const std::string text = trim(item.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos || path.find('.', dot + 1) != std::string::npos)
    throw ConfigError(path, "override key must have the form section.key");
  const std::string sec = path.substr(0, dot), key = path.substr(dot + 1);
  if (sec == "fit") throw ConfigError(path, "[[fit]] entries cannot be overridden");

  toml::table value_table;
  try {
    value_table = toml::parse("v = " + text);
  } catch (const toml::parse_error&) {
    value_table.insert("v", text);  // bare word, taken as a string
  }
  toml::node* sub = root.get(sec);
  if (!sub) sub = root.insert(sec, toml::table{}).first->second.as_table();
  if (!sub->is_table()) throw ConfigError(sec, "expected a table");
  sub->as_table()->insert_or_assign(key, std::move(*value_table.get("v")));
}

ExperimentConfig from_table(const toml::table& root) {
  for (const auto& [key, node] : root)
    if (key != "domain" && key != "discretization" && key != "run" && key != "fit")
      throw ConfigError(std::string(key.str()), "unknown section");

  ExperimentConfig c;

  const auto& dom = *section(root, "domain", true);
  c.grid.domain = parse_name<DomainTag>(as_string(required(dom, "domain", "tag"), "domain.tag"), "domain.tag",
                                        parse_domain_tag);
  Keys dom_keys{"tag"};
  if (c.grid.domain == DomainTag::quarter_annulus) dom_keys.insert({"inner_radius", "outer_radius"});
  if (c.grid.domain == DomainTag::hollow_sphere_eighth) dom_keys.insert({"mid_radius", "thickness"});
  reject_unknown(dom, "domain", dom_keys);
  auto real_key = [&](const toml::table& t, std::string_view sec, std::string_view key, auto& target) {
    if (const toml::node* n = t.get(key)) target = as_real(*n, join(sec, key));
  };
  real_key(dom, "domain", "inner_radius", c.grid.geometry.inner_radius);
  real_key(dom, "domain", "outer_radius", c.grid.geometry.outer_radius);
  real_key(dom, "domain", "mid_radius", c.grid.geometry.mid_radius);
  real_key(dom, "domain", "thickness", c.grid.geometry.thickness);

  const auto& disc = *section(root, "discretization", true);
  reject_unknown(disc, "discretization", {"p", "n", "k", "scheme", "factor", "m"});
  c.grid.p.clear();
  for_each_item(required(disc, "discretization", "p"), "discretization.p", [&](const toml::node& v) {
    c.grid.p.push_back(checked_int(as_int(v, "discretization.p"), "discretization.p"));
  });
  c.grid.n.clear();
  for_each_item(required(disc, "discretization", "n"), "discretization.n", [&](const toml::node& v) {
    c.grid.n.push_back(checked_int(as_int(v, "discretization.n"), "discretization.n"));
  });
  if (const toml::node* k = disc.get("k")) {
    c.grid.k.clear();
    for_each_item(*k, "discretization.k", [&](const toml::node& v) {
      if (v.is_integer()) {
        const int kv = checked_int(as_int(v, "discretization.k"), "discretization.k");
        if (kv < 0) throw ConfigError("discretization.k", "regularity must be nonnegative");
        c.grid.k.push_back({RegularityMode::Kind::fixed, kv});
      } else {
        c.grid.k.push_back(parse_name<RegularityMode>(as_string(v, "discretization.k"), "discretization.k",
                                                      parse_regularity_mode));
      }
    });
  }
  if (const toml::node* s = disc.get("scheme"))
    c.grid.scheme =
        parse_name<PointScheme>(as_string(*s, "discretization.scheme"), "discretization.scheme", parse_point_scheme);
  if (const toml::node* f = disc.get("factor")) {
    c.grid.factor.clear();
    for_each_item(*f, "discretization.factor",
                  [&](const toml::node& v) { c.grid.factor.push_back(as_real(v, "discretization.factor")); });
  }
  if (const toml::node* m = disc.get("m")) {
    c.m = checked_int(as_int(*m, "discretization.m"), "discretization.m");
    if (c.grid.scheme != PointScheme::greville)
      throw ConfigError("discretization.m", "an explicit point count applies to the greville scheme only");
    for (int p : c.grid.p)
      if (*c.m <= p) throw ConfigError("discretization.m", "need m > p for the Greville construction");
  }

  if (const toml::table* run = section(root, "run", false)) {
    reject_unknown(*run, "run",
                   {"targets", "source", "dense_threshold", "seed", "tol", "max_iter", "threads", "out"});
    if (const toml::node* t = run->get("targets")) {
      c.grid.targets.clear();
      for_each_item(*t, "run.targets", [&](const toml::node& v) {
        c.grid.targets.push_back(parse_name<Target>(as_string(v, "run.targets"), "run.targets", parse_target));
      });
    }
    if (const toml::node* s = run->get("source"))
      c.source = parse_name<ManufacturedCase>(as_string(*s, "run.source"), "run.source", parse_manufactured_case);
    if (const toml::node* d = run->get("dense_threshold")) {
      const auto v = as_int(*d, "run.dense_threshold");
      if (v < 0) throw ConfigError("run.dense_threshold", "must be nonnegative");
      c.dense_threshold = static_cast<std::size_t>(v);
    }
    if (const toml::node* s = run->get("seed")) {
      const auto v = as_int(*s, "run.seed");
      if (v < 0) throw ConfigError("run.seed", "must be nonnegative");
      c.seed = static_cast<std::uint64_t>(v);
    }
    if (const toml::node* t = run->get("tol")) {
      c.tol = as_real(*t, "run.tol");
      if (!(c.tol > 0.0 && c.tol < 1.0)) throw ConfigError("run.tol", "must lie in (0, 1)");
    }
    if (const toml::node* t = run->get("max_iter")) {
      c.max_iter = checked_int(as_int(*t, "run.max_iter"), "run.max_iter");
      if (c.max_iter < 1) throw ConfigError("run.max_iter", "must be >= 1");
    }
    if (const toml::node* t = run->get("threads")) {
      c.threads = checked_int(as_int(*t, "run.threads"), "run.threads");
      if (*c.threads < 0) throw ConfigError("run.threads", "must be >= 0 (0: hardware concurrency)");
    }
    if (const toml::node* o = run->get("out")) c.out = as_string(*o, "run.out");
  }

  if (const toml::node* fits = root.get("fit")) {
    const auto* arr = fits->as_array();
    if (!arr || !arr->is_array_of_tables()) throw ConfigError("fit", "expected [[fit]] tables");
    for (const auto& item : *arr) {
      const auto& t = *item.as_table();
      reject_unknown(t, "fit", {"model", "quantity", "target"});
      FitSpec f;
      f.model = parse_name<FitModel>(as_string(required(t, "fit", "model"), "fit.model"), "fit.model", parse_fit_model);
      f.quantity =
          parse_name<Quantity>(as_string(required(t, "fit", "quantity"), "fit.quantity"), "fit.quantity", parse_quantity);
      if (const toml::node* tg = t.get("target"))
        f.target = parse_name<Target>(as_string(*tg, "fit.target"), "fit.target", parse_target);
      c.fits.push_back(f);
    }
  }

  // Module preconditions, with keys named as in the file.
  try {
    validate(c.grid);
  } catch (const ConfigError& e) {
    const std::string& k = e.key();
    const std::string key = k.find('.') != std::string::npos ? k
                            : k == "targets"                 ? "run.targets"
                                                             : "discretization." + k;
    std::string msg = e.what();
    msg = msg.substr(msg.find(": ") + 2);
    throw ConfigError(key, msg);
  }
  try {
    check_manufactured_case(c.source, c.grid.domain);
  } catch (const DomainError& e) {
    throw ConfigError("run.source", e.what());
  }
  try {
    (void)make_patch(c.grid.domain, c.grid.geometry);
  } catch (const DomainError& e) {
    throw ConfigError("domain", e.what());
  }
  return c;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides, std::string_view origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(std::string(origin), msg.str());
  }
  for (const auto& o : overrides) apply_override(root, o);
  return from_table(root);
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides, path.string());
}

std::string echo(const ExperimentConfig& c) {
  toml::table dom{{"tag", std::string(to_string(c.grid.domain))}};
  if (c.grid.domain == DomainTag::quarter_annulus) {
    dom.insert("inner_radius", c.grid.geometry.inner_radius);
    dom.insert("outer_radius", c.grid.geometry.outer_radius);
  }
  if (c.grid.domain == DomainTag::hollow_sphere_eighth) {
    dom.insert("mid_radius", c.grid.geometry.mid_radius);
    dom.insert("thickness", c.grid.geometry.thickness);
  }

  toml::array p, n, k, factor, targets;
  for (int v : c.grid.p) p.push_back(v);
  for (int v : c.grid.n) n.push_back(v);
  for (const auto& v : c.grid.k) {
    if (v.kind == RegularityMode::Kind::max)
      k.push_back("p-1");
    else
      k.push_back(v.value);
  }
  for (double v : c.grid.factor) factor.push_back(v);
  for (auto t : c.grid.targets) targets.push_back(std::string(to_string(t)));
  toml::table disc{{"p", p}, {"n", n}, {"k", k}, {"scheme", std::string(to_string(c.grid.scheme))}, {"factor", factor}};
  if (c.m) disc.insert("m", *c.m);

  toml::table run{{"targets", targets},
                  {"source", std::string(to_string(c.source))},
                  {"dense_threshold", static_cast<std::int64_t>(c.dense_threshold)},
                  {"seed", static_cast<std::int64_t>(c.seed)},
                  {"tol", c.tol},
                  {"max_iter", c.max_iter},
                  {"out", c.out}};
  if (c.threads) run.insert("threads", *c.threads);

  toml::table root{{"domain", dom}, {"discretization", disc}, {"run", run}};
  if (!c.fits.empty()) {
    toml::array fits;
    for (const auto& f : c.fits)
      fits.push_back(toml::table{{"model", std::string(to_string(f.model))},
                                 {"quantity", std::string(to_string(f.quantity))},
                                 {"target", std::string(to_string(f.target))}});
    root.insert("fit", fits);
  }
  std::ostringstream out;
  out << root << '\n';
  return out.str();
}

std::vector<Discretization> discretizations(const ExperimentConfig& c) {
  std::vector<Discretization> out;
  for (const auto& k : c.grid.k)
    for (int p : c.grid.p)
      for (int n : c.grid.n)
        for (double f : c.grid.factor) {
          Discretization d;
          d.domain = c.grid.domain;
          d.geometry = c.grid.geometry;
          d.p = p;
          d.n = n;
          d.k = k.resolve(p);
          d.scheme = c.grid.scheme;
          d.factor = f;
          d.source = c.source;
          out.push_back(d);
        }
  return out;
}

SpectralOptions spectral_options(const ExperimentConfig& c) {
  SpectralOptions o;
  o.dense_threshold = c.dense_threshold;
  o.seed = c.seed;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  return o;
}

SolverOptions solver_options(const ExperimentConfig& c) {
  SolverOptions o;
  o.dense_threshold = c.dense_threshold;
  return o;
}

int effective_threads(const ExperimentConfig& c, std::optional<int> flag) {
  if (flag) return *flag;
  if (c.threads) return *c.threads;
  if (const char* env = std::getenv("IGA_SPECTRA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0 && v <= 4096) return static_cast<int>(v);
    throw ConfigError("IGA_SPECTRA_THREADS", "expected a nonnegative integer, got '" + std::string(env) + "'");
  }
  return 0;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  auto same_k = [](const std::vector<RegularityMode>& x, const std::vector<RegularityMode>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].kind != y[i].kind || (x[i].kind == RegularityMode::Kind::fixed && x[i].value != y[i].value))
        return false;
    return true;
  };
  auto same_fits = [](const std::vector<FitSpec>& x, const std::vector<FitSpec>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].model != y[i].model || x[i].quantity != y[i].quantity || x[i].target != y[i].target) return false;
    return true;
  };
  const auto& g = a.grid.geometry;
  const auto& h = b.grid.geometry;
  return a.grid.domain == b.grid.domain && g.inner_radius == h.inner_radius && g.outer_radius == h.outer_radius &&
         g.mid_radius == h.mid_radius && g.thickness == h.thickness && a.grid.p == b.grid.p && a.grid.n == b.grid.n &&
         same_k(a.grid.k, b.grid.k) && a.grid.scheme == b.grid.scheme && a.grid.factor == b.grid.factor &&
         a.grid.targets == b.grid.targets && a.m == b.m && a.source == b.source &&
         a.dense_threshold == b.dense_threshold && a.seed == b.seed && a.tol == b.tol && a.max_iter == b.max_iter &&
         a.threads == b.threads && a.out == b.out && same_fits(a.fits, b.fits);
}

}  // namespace igalsq
