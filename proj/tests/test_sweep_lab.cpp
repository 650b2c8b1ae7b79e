#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "igalsq/errors.hpp"
#include "igalsq/sweep_lab.hpp"

using namespace igalsq;

namespace {

SweepRecord record(double h, int p, double value) {
  SweepRecord r;
  r.p = p;
  r.k = p - 1;
  r.n = static_cast<int>(std::lround(1.0 / h));
  r.h = h;
  r.sigma_max = r.sigma_min = r.cond = value;
  return r;
}

}  // namespace

TEST_CASE("power and exponential fits of synthetic data") {
  std::vector<double> h, y;
  for (double v : {0.1, 0.05, 0.025, 0.0125}) {
    h.push_back(v);
    y.push_back(5.0 * std::pow(v, -2.0));
  }
  const auto f = fit_power(h, y);
  CHECK(std::abs(f.slope + 2.0) < 1e-12);
  CHECK(std::abs(std::exp(f.intercept) - 5.0) < 1e-10);
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> p, e;
  for (int q = 2; q <= 8; ++q) {
    p.push_back(q);
    e.push_back(std::exp(0.5 * q));
  }
  const auto g = fit_exponential(p, e);
  CHECK(std::abs(g.slope - 0.5) < 1e-12);
  CHECK(std::abs(g.intercept) < 1e-12);

  // noisy data still gives R^2 < 1
  std::vector<double> noisy = y;
  noisy[1] *= 1.3;
  CHECK(fit_power(h, noisy).r2 < 1.0);
}

TEST_CASE("fit preconditions") {
  CHECK_THROWS_AS(fit_power({1.0, 2.0}, {1.0, 2.0}), InsufficientDataError);
  CHECK_THROWS_AS(fit_power({1.0, 2.0, 3.0}, {1.0, 0.0, 3.0}), DomainError);
  CHECK_THROWS_AS(fit_power({1.0, 2.0, -3.0}, {1.0, 2.0, 3.0}), DomainError);
  CHECK_THROWS_AS(fit_power({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}), InsufficientDataError);
  CHECK_THROWS_AS(fit_exponential({1.0, 2.0, 3.0}, {1.0, 2.0}), DimensionMismatchError);
}

TEST_CASE("reference law spot values") {
  constexpr double e = std::numbers::e;
  CHECK(reference_law("iga_l.M_1.cond", 0.1, 3, 2) == doctest::Approx(64.0).epsilon(1e-15));
  CHECK(reference_law("iga_l.A_1.sigma_max", 0.1, 2, 1) == doctest::Approx(100.0 * std::pow(2.0, 2.5)).epsilon(1e-14));
  CHECK(reference_law("iga_l.A_1.sigma_max", 0.1, 2, 1) == doctest::Approx(565.685).epsilon(1e-6));
  CHECK(reference_law("iga_l.M_pm1.sigma_min", 0.1, 4, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(reference_law("iga_l.M_1.sigma_min", 0.3, 4, 3) == doctest::Approx(std::pow(6.0, -4.0)).epsilon(1e-15));
  CHECK(reference_law("iga_g.M_0.cond", 0.1, 2, 1) == doctest::Approx(16.0 / std::sqrt(2.0)).epsilon(1e-14));

  // Case splits: evaluate each branch by hand.
  CHECK(reference_law("iga_g.M_pm1.lambda_max", 0.1, 4, 2) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(reference_law("iga_g.M_pm1.lambda_max", 0.5, 4, 2) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(reference_law("iga_g.K_pm1.cond", 0.3, 3, 1) == doctest::Approx(3.0 * std::exp(3.0)).epsilon(1e-14));
  CHECK(reference_law("iga_g.K_pm1.cond", 0.2, 3, 1) == doctest::Approx(75.0).epsilon(1e-14));
  const double big = std::pow(e / 4, 1 / 0.5) * std::pow(3.0, -0.5) * std::pow(0.5, -1.5) * std::pow(4.0, 3.0);
  CHECK(reference_law("iga_g.K_pm1.cond", 0.5, 3, 1) == doctest::Approx(big).epsilon(1e-14));
  CHECK(reference_law("iga_g.K_pm1.lambda_max", 0.1, 2, 1) == doctest::Approx(20.0).epsilon(1e-15));
  CHECK(reference_law("iga_g.K_pm1.lambda_max", 0.1, 3, 1) == doctest::Approx(30.0).epsilon(1e-15));

  // A_{p-1} sigma_min: 1 below the boundary, the pre-asymptotic form above.
  const double b = *regime_boundary("iga_l.A_pm1.sigma_min", 4, 1);
  CHECK(b == doctest::Approx(std::exp(-1.0) * std::pow(4.0, 0.125)).epsilon(1e-15));
  CHECK(reference_law("iga_l.A_pm1.sigma_min", b, 4, 1) == 1.0);
  const double above = std::pow(e / 2, -8.0) * std::pow(4.0, 4.0 / e) / (0.5 * 0.5);
  CHECK(reference_law("iga_l.A_pm1.sigma_min", 0.5, 4, 1) == doctest::Approx(above).epsilon(1e-14));

  CHECK_FALSE(regime_boundary("iga_l.A_1.cond", 3, 2).has_value());
  CHECK_FALSE(regime_boundary("iga_g.K_pm1.lambda_max", 2, 1).has_value());
  CHECK(*regime_boundary("iga_g.M_pm1.cond", 5, 2) == doctest::Approx(0.2));
  CHECK(*regime_boundary("iga_g.K_0.cond", 3, 1) == doctest::Approx(std::sqrt(std::pow(3.0, 2.5) / 64.0)));
  CHECK_THROWS_AS(reference_law("iga_l.X.cond", 0.1, 2, 1), UnknownLawError);
  CHECK(reference_law_names().size() == 24);
}

TEST_CASE("a fit of a law's own values recovers its exponent") {
  std::vector<double> h, y;
  for (int n : {20, 40, 80, 160, 320}) {
    h.push_back(1.0 / n);
    y.push_back(reference_law("iga_l.A_pm1.sigma_max", 1.0 / n, 5, 2));
  }
  CHECK(std::abs(fit_power(h, y).slope + 2.0) < 1e-10);

  std::vector<double> p, s;
  for (int q = 2; q <= 9; ++q) {
    p.push_back(q);
    s.push_back(reference_law("iga_l.M_pm1.cond", 0.1, q, 3));
  }
  CHECK(std::abs(fit_exponential(p, s).slope - 1.5) < 1e-10);
  p.clear();
  s.clear();
  for (int q = 2; q <= 9; ++q) {
    p.push_back(q);
    s.push_back(reference_law("iga_l.A_1.sigma_max", 0.1, q, 1));
  }
  CHECK(std::abs(fit_power(p, s).slope - 2.5) < 1e-10);
}

TEST_CASE("fit_scaling excludes pre-asymptotic and failed records") {
  // A_{p-1} sigma_min at p=2, d=1: boundary e^{-1/2} 2^{1/8} ~ 0.661
  std::vector<SweepRecord> rs;
  for (double h : {1.0, 0.5, 0.25, 0.125, 0.0625}) rs.push_back(record(h, 2, 3.0 * h * h));
  rs[4].status = "rank_deficient";
  const auto f = fit_scaling(rs, FitModel::power_in_h, Quantity::sigma_min);
  CHECK(f.law == "iga_l.A_pm1.sigma_min");
  REQUIRE(f.regime_boundary.has_value());
  CHECK(f.x_used.size() == 3);
  CHECK(f.x_excluded.size() == 2);
  CHECK(std::abs(f.slope - 2.0) < 1e-12);

  const auto all = fit_scaling(rs, FitModel::power_in_h, Quantity::sigma_min, false);
  CHECK(all.x_used.size() == 4);

  auto mixed = rs;
  mixed[1].factor = 2.0;
  CHECK_THROWS_AS(fit_scaling(mixed, FitModel::power_in_h, Quantity::sigma_min), DomainError);
  std::vector<SweepRecord> few(rs.begin() + 2, rs.end());
  CHECK_THROWS_AS(fit_scaling(few, FitModel::power_in_h, Quantity::sigma_min), InsufficientDataError);
}

TEST_CASE("fit_groups splits by the remaining parameters") {
  std::vector<SweepRecord> rs;
  for (int p : {3, 4})
    for (double h : {0.1, 0.05, 0.025, 0.0125}) rs.push_back(record(h, p, p * std::pow(h, -2.0)));
  rs.push_back(record(0.1, 5, 1.0));
  const auto groups = fit_groups(rs, {FitModel::power_in_h, Quantity::sigma_max, Target::collocation});
  REQUIRE(groups.size() == 3);
  for (int g = 0; g < 2; ++g) {
    REQUIRE(groups[g].fit.has_value());
    CHECK(std::abs(groups[g].fit->slope + 2.0) < 1e-12);
  }
  CHECK_FALSE(groups[2].fit.has_value());
  CHECK_FALSE(groups[2].error.empty());
  CHECK(fit_groups(rs, {FitModel::power_in_h, Quantity::sigma_max, Target::mass}).empty());

  // k = p-1 across p is one group for p-fits.
  const auto by_p = fit_groups(rs, {FitModel::exp_in_p, Quantity::cond, Target::collocation});
  CHECK(by_p.size() == 4);
}

TEST_CASE("fixed k = 1 across p stays one series at p = 2") {
  SweepConfig c;
  c.p = {2, 3, 4};
  c.n = {8};
  c.k = {parse_regularity_mode("1")};
  c.targets = {Target::mass};
  const auto rs = run_sweep(c, {1, {}});
  REQUIRE(rs.size() == 3);
  CHECK(rs[0].k == 1);
  CHECK(rs[0].k_mode.label() == "1");
  CHECK(fit_scaling(rs, FitModel::exp_in_p, Quantity::sigma_min).x_used.size() == 3);
}

TEST_CASE("sweep grid, records and CSV") {
  SweepConfig c;
  c.p = {2, 3};
  c.n = {10, 12};
  c.factor = {1.0, 2.0};
  CHECK(grid_size(c) == 16);
  const auto rs = run_sweep(c, {2, {}});
  REQUIRE(rs.size() == 16);
  const auto& first = rs.front();
  CHECK(first.p == 2);
  CHECK(first.n == 10);
  CHECK(first.h == 0.1);
  CHECK(first.k == 1);
  CHECK(first.dof == 10);
  CHECK(first.target == Target::collocation);
  CHECK(rs[1].target == Target::mass);
  CHECK(rs[2].factor == 2.0);
  for (const auto& r : rs) {
    CHECK(r.ok());
    CHECK(r.sigma_max >= r.sigma_min);
    CHECK(r.cond == doctest::Approx(r.sigma_max / r.sigma_min));
    CHECK(r.m_in >= r.dof);
  }

  // Reproducible regardless of the thread count.
  const auto again = run_sweep(c, {1, {}});
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(again[i].sigma_max == rs[i].sigma_max);
    CHECK(again[i].sigma_min == rs[i].sigma_min);
  }

  std::ostringstream csv;
  write_sweep_csv(csv, rs, "config a\nconfig b");
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# config a");
  std::getline(in, line);
  CHECK(line == "# config b");
  std::getline(in, line);
  CHECK(line == kSweepCsvHeader);
  std::getline(in, line);
  CHECK(line.rfind("interval,1,2,0.1,1,greville,1,A,10,", 0) == 0);
}

TEST_CASE("interior dof count at p=2, h=0.1") {
  // N_b = n + p = 12 functions, 10 interior ones.
  SweepConfig c;
  c.p = {2};
  c.n = {10};
  c.k = {parse_regularity_mode("1")};
  c.targets = {Target::collocation};
  const auto rs = run_sweep(c);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].dof == 10);
}

TEST_CASE("failures are tagged, configuration errors throw") {
  Discretization disc;
  disc.domain = DomainTag::hollow_sphere_eighth;
  disc.p = 2;
  disc.n = 2;
  disc.k = 1;
  disc.geometry.thickness = 0.0;  // collapsed shell: singular map
  const auto rs = run_point(disc, {Target::collocation, Target::mass}, {});
  REQUIRE(rs.size() == 2);
  for (const auto& r : rs) {
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.message.empty());
  }

  SweepConfig c;
  c.p = {2};
  c.n = {4};
  CHECK_NOTHROW(validate(c));
  auto bad = c;
  bad.p = {1};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.k = {parse_regularity_mode("2")};
  try {
    validate(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "k");
  }
  bad = c;
  bad.factor = {0.5};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.scheme = PointScheme::sc;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.n = {};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  CHECK_THROWS_AS(parse_regularity_mode("p-2"), DomainError);
  CHECK(parse_regularity_mode("p-1").resolve(6) == 5);
  CHECK(parse_regularity_mode("3").resolve(6) == 3);
}
