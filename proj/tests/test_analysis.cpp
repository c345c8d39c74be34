#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qmcmc/analysis.hpp"

using namespace qmcmc;
using Catch::Approx;

namespace {

std::vector<ScalingPoint> synthetic(const std::function<double(double)>& f, double rel_sigma) {
  std::vector<ScalingPoint> pts;
  for (int n = 6; n <= 16; n += 2) {
    const double d = f(n);
    pts.push_back({static_cast<double>(n), d, rel_sigma * d});
  }
  return pts;
}

void silent(const std::string&) {}

}  // namespace

TEST_CASE("grids") {
  CHECK(default_alpha_grid().front() == 0.0);
  CHECK(default_alpha_grid().size() == 10);
  const auto g = log_grid(1e2, 1e5, 64);
  CHECK(g.size() == 64);
  CHECK(g.front() == Approx(1e2));
  CHECK(g.back() == Approx(1e5));
  CHECK(g[1] / g[0] == Approx(g[63] / g[62]));
  CHECK(default_kappa_grid() == g);
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 4), ConfigError);
}

TEST_CASE("weighted line fit matches the normal-equation oracle") {
  const std::vector<double> x{1, 2, 3, 4.5, 7, 8};
  const std::vector<double> y{0.3, 0.9, 1.1, 2.4, 3.0, 4.2};
  const std::vector<double> s{0.1, 0.2, 0.1, 0.3, 0.2, 0.5};
  const auto f = weighted_line_fit(x, y, s);
  const auto o = oracle::wls(x, y, s);
  CHECK(std::abs(f.slope - o.slope) <= 1e-10);
  CHECK(std::abs(f.intercept - o.intercept) <= 1e-10);
  CHECK(std::abs(f.slope_err - o.slope_err) <= 1e-10);
  CHECK(std::abs(f.chi2 - o.chi2) <= 1e-10);
  CHECK_THROWS_AS(weighted_line_fit({2, 2, 2}, {1, 2, 3}, {1, 1, 1}), ConfigError);
  CHECK_THROWS_AS(weighted_line_fit({1, 2}, {1, 2}, {1, 0}), ConfigError);
}

TEST_CASE("scaling fits recover synthetic exponents") {
  const auto e = fit_scaling(synthetic([](double n) { return std::pow(2.0, -0.5 * n); }, 0.01),
                             FitKind::Exponential);
  CHECK(e.exponent == Approx(0.5).margin(1e-12));
  CHECK(e.chi2_nu == Approx(0.0).margin(1e-18));
  CHECK(e.err > 0.0);
  CHECK(e.points_used == 6);

  const auto p = fit_scaling(synthetic([](double n) { return 3.0 * std::pow(n, -2.0); }, 0.02),
                             FitKind::PowerLaw);
  CHECK(p.exponent == Approx(2.0).margin(1e-12));
  CHECK(p.intercept == Approx(std::log(3.0)).margin(1e-12));

  // Power law data fits the power law better than the exponential.
  const auto pts = synthetic([](double n) { return std::pow(n, -2.0); }, 0.01);
  CHECK(fit_scaling(pts, FitKind::PowerLaw).chi2_nu < fit_scaling(pts, FitKind::Exponential).chi2_nu);

  CHECK_THROWS_AS(fit_scaling({{4, 0.1, 0.01}, {6, 0.05, 0.01}}, FitKind::Exponential), ConfigError);
  CHECK_THROWS_AS(fit_scaling({{4, 0.1, 0.01}, {6, -0.05, 0.01}, {8, 0.01, 0.001}}, FitKind::Exponential), ConfigError);
  CHECK(parse_fit_kind("power") == FitKind::PowerLaw);
  CHECK_THROWS_AS(parse_fit_kind("cubic"), ConfigError);
}

TEST_CASE("uncertainty formatting") {
  CHECK(format_uncertainty(0.6141, 0.003) == "0.614(3)");
  CHECK(format_uncertainty(0.6141, 0.0125) == "0.61(1)");
  CHECK(format_uncertainty(0.146, 0.0031) == "0.146(3)");
  CHECK(format_uncertainty(1.25, 0.5) == "1.2(5)");
  CHECK(format_uncertainty(12.0, 3.0) == "12(3)");
}

TEST_CASE("peak finding") {
  std::vector<GapPoint> pts{{0, 0.1, 0.01, 5}, {1, 0.3, 0.01, 5}, {2, 0.3, 0.01, 5}, {3, 0.2, 0.01, 5}};
  const auto p = find_peak(pts);
  CHECK(p.alpha == 1.0);
  CHECK(p.index == 1);
  CHECK_FALSE(p.at_boundary);
  pts.back().mean = 0.5;
  CHECK(find_peak(pts).at_boundary);
  CHECK_THROWS_AS(find_peak(std::vector<GapPoint>{}), ConfigError);

  const auto m = maximize_scalar([](double x) { return -(x - 2.7) * (x - 2.7); }, 0.0, 10.0);
  CHECK(m.alpha == Approx(2.7).margin(1e-3));
  CHECK_FALSE(m.at_boundary);
  CHECK(maximize_scalar([](double x) { return -x; }, 0.0, 4.0).at_boundary);
}

TEST_CASE("mean and standard error") {
  const auto m = mean_stderr({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.stderr_ == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(mean_stderr({}).count == 0);
}

TEST_CASE("aggregation is pure and skips failures") {
  std::vector<GapRecord> recs;
  for (int s = 0; s < 4; ++s) {
    recs.push_back({static_cast<std::uint64_t>(s), 0.0, {}, 0.1 * (s + 1)});
    recs.push_back({static_cast<std::uint64_t>(s), 2.0, {}, 0.2 * (s + 1)});
  }
  recs.back().ok = false;
  recs.back().error = "synthetic";
  const auto a = aggregate(recs);
  const auto b = aggregate(recs);
  REQUIRE(a.size() == 2);
  CHECK(a[0].count == 4);
  CHECK(a[1].count == 3);
  CHECK(a[0].mean == Approx(0.25));
  CHECK(a[1].mean == Approx(0.4));
  CHECK(a[0].mean == b[0].mean);
  CHECK(a[1].stderr_ == b[1].stderr_);
}

TEST_CASE("parallel map keeps order and propagates errors") {
  const auto v = parallel_map(50, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map(10, [](std::size_t i) -> int {
                    if (i == 7) throw NumericalError("boom");
                    return 0;
                  }, 3),
                  NumericalError);
}

TEST_CASE("disorder scan on small SK instances") {
  GapScanParams p;
  p.alphas = {0.0, 1.0, 2.0, 4.0};
  const DisorderSpec spec{Model::SK, 5, 7, 8};
  const auto one = disorder_scan(spec, p, 1, silent);
  const auto many = disorder_scan(spec, p, 3, silent);
  REQUIRE(one.curve.points.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one.curve.points[i].mean == many.curve.points[i].mean);
    CHECK(one.curve.points[i].count == 8);
    CHECK(one.curve.points[i].stderr_ >= 0.0);
  }
  for (const auto& r : one.records) {
    CHECK(r.ok);
    CHECK(r.db_residual <= 1e-10);
    CHECK(r.stationarity_residual <= 1e-9);
  }
  CHECK(one.curve.points[3].mean > 1.2 * one.curve.points[0].mean);
  CHECK(find_peak(one.curve).alpha > 0.0);

  p.alphas = {1.0, 0.0};
  CHECK_THROWS_AS(disorder_scan(spec, p, 1, silent), ConfigError);
  p.alphas = {0.0};
  CHECK_THROWS_AS(disorder_scan(DisorderSpec{Model::SK, 5, 7, 1}, p, 1, silent), ConfigError);
}

TEST_CASE("instance gaps agree with the direct pipeline") {
  const auto h = sample_3spin(5, 3);
  GapScanParams p;
  p.alphas = {0.0, 3.0};
  const auto recs = instance_gaps(h, p);
  const auto table = energy_table(h);
  const auto spec = diagonalize_plateau(plateau_hamiltonian(table, 5, 1.5));
  const auto u1 = ramp_propagator(table, 5, 1.5, RampSchedule::large_kappa(RampKind::Sin2, 3.0));
  const double d = spectral_gap(metropolis_transition(proposal_time_averaged(u1, spec), boltzmann(table, 5.0))).delta;
  CHECK(recs[1].delta == Approx(d).epsilon(1e-12));
  CHECK(recs[0].seed == 3);
}

TEST_CASE("kappa-averaged gap stays below the large-kappa gap") {
  const auto h = sample_sk(4, 21);
  const auto scan = kappa_scan(h, 5.0, 1.5, RampKind::Sin2, 2.0, log_grid(1e2, 1e5, 200));
  CHECK(scan.gaps.size() == 200);
  CHECK(scan.mean <= scan.large_kappa_gap + 2.0 * scan.stderr_);
  CHECK(scan.stderr_ > 0.0);
  for (const auto& [k, d] : scan.gaps) CHECK((d >= 0.0 && d <= 1.0));
  CHECK_THROWS_AS(kappa_scan(h, 5.0, 1.5, RampKind::Sin2, 2.0, {-1.0}), ConfigError);
}

TEST_CASE("alpha equals N strategy") {
  GapScanParams p;
  const auto scan = alpha_equals_n_scan(Model::SK, {3, 4, 5}, 11, 4, p, 1, silent);
  REQUIRE(scan.points.size() == 3);
  for (const auto& pt : scan.points) CHECK(pt.alpha == pt.sites);
  CHECK(std::isfinite(scan.fit.exponent));
  CHECK(scan.fit.chi2_nu >= 0.0);
}
