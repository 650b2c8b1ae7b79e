#pragma once

// Parameter sweeps over (domain, p, h, k, scheme, oversampling), scaling-law
// fits of the measured singular values, and the closed-form estimate laws
// they are compared against.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "igalsq/assembly.hpp"
#include "igalsq/spectra.hpp"

namespace igalsq {

/// Regularity as a rule of the degree: k = p - 1, or a fixed value.
struct RegularityMode {
  enum class Kind { max, fixed } kind = Kind::max;
  int value = 0;  // used when kind == fixed

  int resolve(int p) const noexcept { return kind == Kind::max ? p - 1 : value; }
  std::string label() const;  // "p-1" or the number
};

RegularityMode parse_regularity_mode(std::string_view text);

struct SweepConfig {
  DomainTag domain = DomainTag::interval;
  PatchParams geometry{};
  std::vector<int> p;
  std::vector<int> n;  // h = 1/n
  std::vector<RegularityMode> k{RegularityMode{}};
  PointScheme scheme = PointScheme::greville;
  std::vector<double> factor{1.0};
  std::vector<Target> targets{Target::collocation, Target::mass};
};

/// Throws ConfigError naming the offending key when a grid value violates a
/// module precondition (p < 2, n < 1, k outside [1, p-1], factor < 1,
/// SC/CG degree outside the tabulated range, empty lists).
void validate(const SweepConfig& config);

/// Number of records run_sweep produces.
std::size_t grid_size(const SweepConfig& config);

struct SweepRecord {
  DomainTag domain = DomainTag::interval;
  int d = 1;
  int p = 0;
  int n = 0;
  double h = 0.0;
  int k = 0;
  RegularityMode k_mode;  // how k was chosen; groups p-fits, where k = 1 is also p-1 at p = 2
  PointScheme scheme = PointScheme::greville;
  double factor = 1.0;
  Target target = Target::collocation;
  std::size_t dof = 0;
  std::size_t m = 0;
  std::size_t m_in = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double cond = 0.0;
  std::size_t nnz_A = 0;
  std::size_t nnz_AtA = 0;
  std::string method;
  std::string status = "ok";  // ok, rank_deficient, non_convergence, singular_map, factorization, domain_error, error
  std::string message;
  double seconds = 0.0;

  bool ok() const noexcept { return status == "ok"; }
};

struct SweepOptions {
  int threads = 0;  // <= 0: hardware concurrency
  SpectralOptions spectral{};
};

/// Runs every grid point in the order k, p, n, factor, target. Failures
/// are recorded with a status tag; only configuration errors throw.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, const SweepOptions& opts = {});

/// Single grid point, the same code path run_sweep uses (which assembles
/// with one thread per configuration).
std::vector<SweepRecord> run_point(const Discretization& disc, const std::vector<Target>& targets,
                                   const SpectralOptions& spectral, int assembly_threads = 1);

inline constexpr std::string_view kSweepCsvHeader =
    "domain,d,p,h,k,scheme,factor,target,dof,m,m_in,sigma_max,sigma_min,cond,nnz_A,nnz_AtA,method,status,seconds";

/// Header comment lines (prefixed with "# "), the fixed header, one row per
/// record. Reals use the shortest form that round-trips.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, std::string_view comment = {});

// ---------------------------------------------------------------------------
// Scaling fits

enum class FitModel { power_in_h, power_in_p, power_in_m, exp_in_p };
enum class Quantity { sigma_max, sigma_min, cond };

std::string_view to_string(FitModel m);
FitModel parse_fit_model(std::string_view name);
std::string_view to_string(Quantity q);
Quantity parse_quantity(std::string_view name);

struct FitResult {
  FitModel model = FitModel::power_in_h;
  double slope = 0.0;      // exponent (power models) or rate (exp_in_p)
  double intercept = 0.0;  // log y at x = 1 (power) or x = 0 (exp)
  double r2 = 0.0;
  std::vector<double> x_used, y_used;
  std::vector<double> x_excluded;  // pre-asymptotic or failed records
  std::string law;                 // reference law used for exclusion, if any
  std::optional<double> regime_boundary;
};

/// OLS of log y on log x. Throws InsufficientDataError below 3 points and
/// DomainError on nonpositive data.
FitResult fit_power(const std::vector<double>& x, const std::vector<double>& y);
/// OLS of log y on x.
FitResult fit_exponential(const std::vector<double>& x, const std::vector<double>& y);

/// Fits `quantity` of records that differ only in the model's variable.
/// For power_in_h fits, records with h above the regime boundary of the
/// matching reference law (if it has one) are excluded and listed.
/// Throws DomainError when the records vary in another parameter,
/// InsufficientDataError when fewer than 3 usable records remain.
FitResult fit_scaling(const std::vector<SweepRecord>& records, FitModel model, Quantity quantity,
                      bool exclude_pre_asymptotic = true);

struct FitSpec {
  FitModel model = FitModel::power_in_h;
  Quantity quantity = Quantity::cond;
  Target target = Target::collocation;
};

struct GroupFit {
  std::string group;  // e.g. "p=4 k=3 factor=4"
  std::optional<FitResult> fit;
  std::string error;
};

/// Splits records by every parameter except the fit variable and fits each
/// group; groups that cannot be fitted carry an error message.
std::vector<GroupFit> fit_groups(const std::vector<SweepRecord>& records, const FitSpec& spec);

/// "x y" lines of the used points, then a blank line and the fitted model
/// at the same x. Comment lines start with '#'.
void write_fit_series(std::ostream& out, const FitResult& fit, std::string_view comment = {});

// ---------------------------------------------------------------------------
// Reference laws

/// Names:
///   iga_g.{M_0,K_0,M_pm1,K_pm1}.{lambda_min,lambda_max,cond}
///   iga_l.{A_pm1,M_pm1,A_1,M_1}.{sigma_min,sigma_max,cond}
/// Every undetermined constant is 1. Case splits "h <~ b" are evaluated as
/// h <= b. Throws UnknownLawError.
double reference_law(std::string_view name, double h, int p, int d);

/// Threshold b of the law's first (asymptotic in h) case, if it is split.
std::optional<double> regime_boundary(std::string_view name, int p, int d);

std::vector<std::string> reference_law_names();

/// The IGA-L law for a target at regularity k (k = p-1 or k = 1).
std::optional<std::string> law_name(Target target, int p, int k, Quantity quantity);

}  // namespace igalsq
