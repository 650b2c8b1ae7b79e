// iga_lab: command-line front end for least-squares isogeometric collocation
// experiments. Exit codes: 0 success, 1 I/O or unexpected failure,
// 2 invalid configuration or arguments, 3 numerical failure.

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "igalsq/errors.hpp"
#include "igalsq/experiment_config.hpp"

namespace fs = std::filesystem;
using namespace igalsq;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Args {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::size_t> dense_threshold;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

// A numerical failure at one grid point.
struct PointFailure : std::runtime_error {
  PointFailure(const std::string& what, std::string point) : std::runtime_error(what), point(std::move(point)) {}
  std::string point;
};

std::string real(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string tag(const Discretization& d) {
  return std::string(to_string(d.scheme)) + "_p" + std::to_string(d.p) + "_n" + std::to_string(d.n) + "_k" +
         std::to_string(d.k) + "_f" + real(d.factor);
}

std::string describe(const Discretization& d) {
  return "domain=" + std::string(to_string(d.domain)) + " p=" + std::to_string(d.p) + " n=" + std::to_string(d.n) +
         " k=" + std::to_string(d.k) + " scheme=" + std::string(to_string(d.scheme)) + " factor=" + real(d.factor) +
         " source=" + std::string(to_string(d.source));
}

struct Context {
  ExperimentConfig config;
  fs::path out;
  int threads = 0;
  std::string header;  // echoed configuration, no trailing newline

  std::ofstream open(const std::string& name) const {
    const fs::path path = out / name;
    std::ofstream f(path);
    if (!f) throw std::ios_base::failure("cannot write '" + path.string() + "'");
    std::cout << path.string() << '\n';
    return f;
  }

  void comment(std::ostream& f) const {
    std::istringstream lines(header);
    for (std::string l; std::getline(lines, l);) f << "# " << l << '\n';
  }
};

Context make_context(const std::string& command, const Args& args) {
  std::vector<std::string> overrides;
  if (args.out) overrides.push_back("run.out=\"" + *args.out + "\"");
  if (args.dense_threshold) overrides.push_back("run.dense_threshold=" + std::to_string(*args.dense_threshold));
  if (args.seed) overrides.push_back("run.seed=" + std::to_string(*args.seed));
  overrides.insert(overrides.end(), args.sets.begin(), args.sets.end());

  Context ctx;
  ctx.config = load_config(args.config, overrides);
  ctx.threads = effective_threads(ctx.config, args.threads);
  ctx.out = ctx.config.out;
  fs::create_directories(ctx.out);
  std::string e = echo(ctx.config);
  while (!e.empty() && e.back() == '\n') e.pop_back();
  ctx.header = "# iga_lab " + command + "\n" + e;
  return ctx;
}

int cmd_points(const Context& ctx) {
  const auto& c = ctx.config;
  const int d = domain_dimension(c.grid.domain);
  if (c.m) {
    for (int p : c.grid.p) {
      const auto line = greville_points(p, *c.m);
      const auto set = tensorize(std::vector<std::vector<double>>(d, line));
      auto f = ctx.open("points_greville_p" + std::to_string(p) + "_m" + std::to_string(*c.m) + ".csv");
      write_points_csv(f, set, ctx.header);
    }
    return 0;
  }
  for (const auto& disc : discretizations(c)) {
    const auto set = collocation_points(disc);
    auto f = ctx.open("points_" + tag(disc) + ".csv");
    write_points_csv(f, set, ctx.header);
  }
  return 0;
}

int cmd_assemble(const Context& ctx) {
  auto summary = ctx.open("assemble.csv");
  ctx.comment(summary);
  summary << "domain,d,p,h,k,scheme,factor,dof,m,m_in,nnz_A,nnz_AtA\n";
  for (const auto& disc : discretizations(ctx.config)) {
    DiscreteSystem sys;
    try {
      sys = discretize(disc, ctx.threads);
    } catch (const NumericalError& e) {
      throw PointFailure(e.what(), describe(disc));
    }
    const auto pattern = normal_product_pattern(sys.A);
    const std::string t = tag(disc);
    {
      auto f = ctx.open("A_" + t + ".mtx");
      write_matrix_market(f, sys.A, ctx.header + "\ncollocation matrix A");
    }
    {
      auto f = ctx.open("M_" + t + ".mtx");
      write_matrix_market(f, sys.M, ctx.header + "\ncollocation mass matrix M");
    }
    {
      auto f = ctx.open("b_" + t + ".mtx");
      write_matrix_market_vector(f, sys.b, ctx.header + "\nload vector b");
    }
    {
      auto f = ctx.open("AtA_" + t + ".pgm");
      write_pgm(f, occupancy_raster(pattern), ctx.header + "\nnonzero pattern of A^T A");
    }
    {
      auto f = ctx.open("AtA_" + t + ".csv");
      ctx.comment(f);
      write_occupancy_csv(f, pattern);
    }
    summary << to_string(disc.domain) << ',' << domain_dimension(disc.domain) << ',' << disc.p << ','
            << real(1.0 / disc.n) << ',' << disc.k << ',' << to_string(disc.scheme) << ',' << real(disc.factor) << ','
            << sys.dof() << ',' << sys.m << ',' << sys.m_in() << ',' << sys.A.nnz() << ',' << pattern.nnz() << '\n';
  }
  return 0;
}

int cmd_spectra(const Context& ctx) {
  std::vector<SweepRecord> records;
  std::vector<std::string> failed;
  for (const auto& disc : discretizations(ctx.config)) {
    auto rs = run_point(disc, ctx.config.grid.targets, spectral_options(ctx.config), ctx.threads);
    for (const auto& r : rs)
      if (!r.ok()) failed.push_back(describe(disc) + " target=" + std::string(to_string(r.target)) + ": " + r.status +
                                    ": " + r.message);
    records.insert(records.end(), rs.begin(), rs.end());
  }
  auto f = ctx.open("spectra.csv");
  write_sweep_csv(f, records, ctx.header);
  if (!failed.empty()) {
    std::ostringstream msg;
    for (const auto& s : failed) msg << "\n  " << s;
    throw PointFailure("spectral computation failed at " + std::to_string(failed.size()) + " point(s)", msg.str());
  }
  return 0;
}

int cmd_solve(const Context& ctx) {
  const auto& c = ctx.config;
  const int d = domain_dimension(c.grid.domain);
  const int per_dir = d == 1 ? 101 : d == 2 ? 21 : 11;
  auto summary = ctx.open("solve.csv");
  ctx.comment(summary);
  summary << "domain,d,p,h,k,scheme,factor,source,dof,m_in,method,residual_norm,normal_residual,max_error,seconds\n";
  const auto patch = make_patch(c.grid.domain, c.grid.geometry);
  for (const auto& disc : discretizations(c)) {
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    DiscreteSystem sys;
    try {
      sys = discretize(disc, ctx.threads);
      sol = solve_least_squares(sys, solver_options(c));
    } catch (const NumericalError& e) {
      throw PointFailure(e.what(), describe(disc));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto space = solution_space(disc);
    const double err = max_solution_error(space, patch, sol, disc.source, per_dir);
    const std::string t = tag(disc);
    {
      auto f = ctx.open("solution_" + t + ".csv");
      ctx.comment(f);
      write_solution_csv(f, sol);
    }
    {
      auto f = ctx.open("samples_" + t + ".csv");
      ctx.comment(f);
      write_solution_samples(f, space, patch, sol, disc.source, per_dir);
    }
    summary << to_string(disc.domain) << ',' << d << ',' << disc.p << ',' << real(1.0 / disc.n) << ',' << disc.k << ','
            << to_string(disc.scheme) << ',' << real(disc.factor) << ',' << to_string(disc.source) << ','
            << sys.dof() << ',' << sys.m_in() << ',' << to_string(sol.method) << ',' << real(sol.residual_norm) << ','
            << real(sol.normal_residual) << ',' << real(err) << ',' << real(secs) << '\n';
  }
  return 0;
}

int cmd_sweep(const Context& ctx) {
  const auto& c = ctx.config;
  SweepOptions opts;
  opts.threads = ctx.threads;
  opts.spectral = spectral_options(c);
  const auto records = run_sweep(c.grid, opts);
  {
    auto f = ctx.open("sweep.csv");
    write_sweep_csv(f, records, ctx.header);
  }
  std::size_t failures = 0;
  for (const auto& r : records) failures += r.ok() ? 0 : 1;
  if (failures > 0) std::cerr << "iga_lab: " << failures << " record(s) failed; see the status column\n";
  if (c.fits.empty()) return 0;

  auto table = ctx.open("fits.csv");
  ctx.comment(table);
  table << "fit,model,quantity,target,group,slope,intercept,r2,used,excluded,law,regime_boundary,error\n";
  for (std::size_t i = 0; i < c.fits.size(); ++i) {
    const auto& spec = c.fits[i];
    const auto groups = fit_groups(records, spec);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& gf = groups[g];
      table << i << ',' << to_string(spec.model) << ',' << to_string(spec.quantity) << ',' << to_string(spec.target)
            << ",\"" << gf.group << "\",";
      if (gf.fit) {
        const auto& fit = *gf.fit;
        table << real(fit.slope) << ',' << real(fit.intercept) << ',' << real(fit.r2) << ',' << fit.x_used.size()
              << ',' << fit.x_excluded.size() << ',' << fit.law << ','
              << (fit.regime_boundary ? real(*fit.regime_boundary) : std::string()) << ",\n";
        auto f = ctx.open("fit_" + std::to_string(i) + "_" + std::to_string(g) + ".dat");
        write_fit_series(f, fit, ctx.header + "\n" + gf.group);
      } else {
        std::string err = gf.error;
        for (auto& ch : err)
          if (ch == '"') ch = '\'';
        table << ",,,0,0,,,\"" << err << "\"\n";
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares isogeometric collocation: point sets, systems, spectra, solutions and sweeps"};
  app.require_subcommand(1);
  Args args;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", args.config, "TOML experiment configuration")->required();
    sub->add_option("-o,--out", args.out, "output directory (overrides run.out)");
    sub->add_option("-j,--threads", args.threads,
                    "worker threads, 0 = hardware concurrency (fallback: run.threads, then IGA_SPECTRA_THREADS)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--dense-threshold", args.dense_threshold, "column count up to which dense methods are used");
    sub->add_option("--seed", args.seed, "seed of the iterative eigensolvers");
    sub->add_option("-s,--set", args.sets, "override a config key, e.g. --set discretization.p=[2,3]");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Context&);
  };
  const Command commands[] = {
      {"points", "write collocation point sets (CSV)", cmd_points},
      {"assemble", "write A, M, b (Matrix Market) and the A^T A pattern", cmd_assemble},
      {"spectra", "extreme singular values of A and M (CSV)", cmd_spectra},
      {"solve", "least-squares solutions of the manufactured problem (CSV)", cmd_solve},
      {"sweep", "parameter sweep with scaling fits (CSV)", cmd_sweep},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (const auto& [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    std::string header;
    try {
      const Context ctx = make_context(cmd->name, args);
      header = ctx.header;
      return cmd->run(ctx);
    } catch (const PointFailure& e) {
      std::cerr << "iga_lab: numerical failure: " << e.what() << "\nfailing configuration: " << e.point
                << "\n--- effective config ---\n"
                << header << '\n';
      return kExitNumerical;
    } catch (const ConfigError& e) {
      std::cerr << "iga_lab: invalid configuration: " << e.what() << '\n';
      return kExitConfig;
    } catch (const DomainError& e) {
      std::cerr << "iga_lab: invalid input: " << e.what() << '\n';
      return kExitConfig;
    } catch (const NumericalError& e) {
      std::cerr << "iga_lab: numerical failure: " << e.what() << "\n--- effective config ---\n" << header << '\n';
      return kExitNumerical;
    } catch (const std::exception& e) {
      std::cerr << "iga_lab: error: " << e.what() << '\n';
      return kExitIo;
    }
  }
  return kExitIo;
}
