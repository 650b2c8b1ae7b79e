#pragma once

// Experiment configuration: a TOML file with [domain], [discretization],
// [run] and [[fit]] sections, plus "section.key=value" overrides.
//
//   [domain]
//   tag = "quarter_annulus"        # interval | quarter_annulus | unit_cube | hollow_sphere_eighth
//   inner_radius = 1.0             # optional geometry parameters
//
//   [discretization]
//   p = [2, 3, 4]                  # integer or list
//   n = [10, 20, 40]               # spans per direction, h = 1/n
//   k = "p-1"                      # "p-1", an integer, or a list of them
//   scheme = "greville"            # greville | sc | cg
//   factor = [1.0, 4.0]            # Greville oversampling
//   m = 4                          # optional, points subcommand only
//
//   [run]
//   targets = ["A", "M"]
//   source = "polynomial"          # zero | polynomial | sine
//   dense_threshold = 2000
//   seed = 1234
//   tol = 1e-10
//   max_iter = 10000
//   threads = 4                    # optional
//   out = "results"
//
//   [[fit]]
//   model = "power_in_h"           # power_in_h | power_in_p | power_in_m | exp_in_p
//   quantity = "cond"              # sigma_max | sigma_min | cond
//   target = "A"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "igalsq/assembly.hpp"
#include "igalsq/lsq_solver.hpp"
#include "igalsq/spectra.hpp"
#include "igalsq/sweep_lab.hpp"

namespace igalsq {

struct ExperimentConfig {
  SweepConfig grid;
  std::optional<int> m;
  ManufacturedCase source = ManufacturedCase::zero;
  std::size_t dense_threshold = 2000;
  std::uint64_t seed = 1234;
  double tol = 1e-10;
  int max_iter = 10000;
  std::optional<int> threads;
  std::string out = ".";
  std::vector<FitSpec> fits;
};

/// Parses TOML text, applies the overrides ("discretization.p=[2,3]",
/// "run.source=sine", ...) and validates every value. Throws ConfigError
/// naming the key on a missing, unknown or invalid entry.
ExperimentConfig parse_config(std::string_view toml_text, const std::vector<std::string>& overrides = {},
                              std::string_view origin = "config");

/// parse_config on the contents of a file. A missing file is a ConfigError
/// with key "--config".
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// The effective configuration as TOML; parse_config(echo(c)) == c.
std::string echo(const ExperimentConfig& config);

/// Every grid point in sweep order (k, p, n, factor).
std::vector<Discretization> discretizations(const ExperimentConfig& config);

SpectralOptions spectral_options(const ExperimentConfig& config);
SolverOptions solver_options(const ExperimentConfig& config);

/// Threads to use: the explicit value if any, else the config's run.threads,
/// else IGA_SPECTRA_THREADS, else 0 (hardware concurrency).
int effective_threads(const ExperimentConfig& config, std::optional<int> flag = std::nullopt);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace igalsq
