#pragma once

// Ising-chain fast path. The periodic chain H = -sum s_i s_{i+1} + gamma(t) h
// sum sigma^x maps to free fermions; each momentum pair (k, -k) evolves in a
// two-level space {pair occupied, pair empty} under
//
//   H_k(t) = 2 [ gamma(t) h - cos k    -i sin k              ]
//              [ i sin k               -(gamma(t) h - cos k) ]
//
// and the bottleneck bound on the first-excited manifold only needs the
// ramp transition probability eta_k of every mode.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "qmcmc/error.hpp"
#include "qmcmc/schedule.hpp"

namespace qmcmc {

/// Default RK4 steps per unit time for mode integration.
inline constexpr int kDefaultModeStepsPerUnitTime = 2000;
inline constexpr std::int64_t kMinModeSteps = 100;
inline constexpr double kModeNormTolerance = 1e-8;

/// Positive momenta of one fermion-parity sector of an even-length chain.
/// p = 0: k = (2 pi / N)(l - 1/2), l = 1..N/2.
/// p = 1: k = (2 pi / N) l,       l = 1..N/2-1  (k = 0, pi carry no transitions).
struct MomentumSector {
  int parity = 0;
  int sites = 0;
  std::vector<double> momenta;

  static MomentumSector make(int sites, int parity) {
    require(sites >= 2 && sites % 2 == 0, "MomentumSector: N must be even and >= 2");
    require(parity == 0 || parity == 1, "MomentumSector: parity must be 0 or 1");
    MomentumSector s{parity, sites, {}};
    const int count = parity == 0 ? sites / 2 : sites / 2 - 1;
    for (int l = 1; l <= count; ++l) {
      const double shift = parity == 0 ? 0.5 : 0.0;
      s.momenta.push_back(2.0 * std::numbers::pi / sites * (l - shift));
    }
    return s;
  }
};

/// sqrt((h - cos k)^2 + sin^2 k)
inline double mode_energy(double k, double h) {
  return std::hypot(h - std::cos(k), std::sin(k));
}

struct ModeResult {
  double k = 0.0;
  double eta = 0.0;
  double f = 1.0;
  std::int64_t steps = 0;
  double norm_residual = 0.0;
};

inline double f_from_eta(double eta) { return 2.0 * eta * eta - 2.0 * eta + 1.0; }

namespace detail {

using Spinor = std::array<std::complex<double>, 2>;

inline Spinor apply_mode_hamiltonian(double k, double gh, const Spinor& v) {
  using namespace std::complex_literals;
  const double a = gh - std::cos(k);
  const double s = std::sin(k);
  return {2.0 * (a * v[0] - 1i * s * v[1]), 2.0 * (1i * s * v[0] - a * v[1])};
}

}  // namespace detail

/// Ramp transition probability eta_k = |<1_k|U_1^k|0_k^c>|^2, where
/// |0_k^c> = (cos k/2, -i sin k/2) is the classical ground state of the mode
/// and |1_k> = (cos theta/2, i sin theta/2), theta = atan2(sin k, h - cos k),
/// is the excited state at full field. The ramp [0, alpha] is integrated with
/// classical RK4; the norm is checked but never renormalised.
inline ModeResult mode_eta_detail(double k, double h, const RampSchedule& s,
                                  int steps_per_unit_time = kDefaultModeStepsPerUnitTime) {
  using namespace std::complex_literals;
  require(k > 0.0 && k < std::numbers::pi, "mode_eta: need 0 < k < pi");
  require(h > 0.0 && std::isfinite(h), "mode_eta: need h > 0");
  require(steps_per_unit_time >= 1, "mode_eta: steps must be >= 1");

  detail::Spinor psi{std::cos(0.5 * k) + 0i, -1i * std::sin(0.5 * k)};
  ModeResult out;
  out.k = k;
  if (s.alpha > 0.0) {
    out.steps = std::max<std::int64_t>(
        kMinModeSteps, static_cast<std::int64_t>(std::ceil(s.alpha * steps_per_unit_time)));
    const double dt = s.alpha / static_cast<double>(out.steps);
    auto deriv = [&](double t, const detail::Spinor& v) {
      const auto hv = detail::apply_mode_hamiltonian(k, ramp_value(s, std::min(t, s.alpha)) * h, v);
      return detail::Spinor{-1i * hv[0], -1i * hv[1]};
    };
    for (std::int64_t j = 0; j < out.steps; ++j) {
      const double t = static_cast<double>(j) * dt;
      const auto k1 = deriv(t, psi);
      const auto k2 = deriv(t + 0.5 * dt, {psi[0] + 0.5 * dt * k1[0], psi[1] + 0.5 * dt * k1[1]});
      const auto k3 = deriv(t + 0.5 * dt, {psi[0] + 0.5 * dt * k2[0], psi[1] + 0.5 * dt * k2[1]});
      const auto k4 = deriv(t + dt, {psi[0] + dt * k3[0], psi[1] + dt * k3[1]});
      for (int c = 0; c < 2; ++c)
        psi[static_cast<std::size_t>(c)] +=
            dt / 6.0 * (k1[static_cast<std::size_t>(c)] + 2.0 * k2[static_cast<std::size_t>(c)] +
                        2.0 * k3[static_cast<std::size_t>(c)] + k4[static_cast<std::size_t>(c)]);
    }
  }
  out.norm_residual = std::abs(std::norm(psi[0]) + std::norm(psi[1]) - 1.0);
  if (out.norm_residual > kModeNormTolerance) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "mode_eta: norm drift %.3e exceeds 1e-8 at k=%.6f; increase the mode steps "
                  "per unit time",
                  out.norm_residual, k);
    throw NumericalError(msg);
  }

  const double theta = std::atan2(std::sin(k), h - std::cos(k));
  const std::complex<double> excited_0 = std::cos(0.5 * theta);
  const std::complex<double> excited_1 = 1i * std::sin(0.5 * theta);
  const auto amp = std::conj(excited_0) * psi[0] + std::conj(excited_1) * psi[1];
  out.eta = std::clamp(std::norm(amp), 0.0, 1.0);
  out.f = f_from_eta(out.eta);
  return out;
}

inline double mode_eta(double k, double h, const RampSchedule& s,
                       int steps_per_unit_time = kDefaultModeStepsPerUnitTime) {
  return mode_eta_detail(k, h, s, steps_per_unit_time).eta;
}

/// Landau-Zener estimate exp(-(2 pi / h) alpha Delta_k^2). For h >= 1 the
/// sweep crosses the critical point and Delta_k ~ k, valid for small k; for
/// h < 1 Delta_k is the minimum of the mode gap over gamma in [0, 1].
/// The prefactor assumes a unit sweep rate d gamma / d(t/alpha) = 1, as for
/// the linear ramp; the sin^2 ramp crosses gamma = 1/h faster.
inline double lz_eta_approx(double k, double h, double alpha) {
  require(h > 0.0, "lz_eta_approx: need h > 0");
  require(alpha >= 0.0, "lz_eta_approx: need alpha >= 0");
  if (alpha == 0.0) return 1.0;
  double gap = k;
  if (h < 1.0) {
    gap = mode_energy(k, 0.0);
    for (int i = 1; i <= 1000; ++i) gap = std::min(gap, mode_energy(k, h * i * 1e-3));
  }
  return std::exp(-(2.0 * std::numbers::pi / h) * alpha * gap * gap);
}

struct IsingBound {
  double bound = 0.0;
  double tail = 0.0;
  /// Sector contributions, already divided by N(N-1); bound = sum of the three.
  double sector0 = 0.0;
  double sector1 = 0.0;
};

/// e^{-4 beta} / (2 - N(N-1) e^{-4 beta})
inline double ising_tail_term(int sites, double beta) {
  const double z = std::exp(-4.0 * beta);
  const double denom = 2.0 - static_cast<double>(sites) * (sites - 1) * z;
  if (!(denom > 0.0))
    throw ConfigError("ising bound: 2 - N(N-1)e^{-4 beta} <= 0; beta is too small for N=" +
                      std::to_string(sites));
  return z / denom;
}

/// (prod_k f_k) * sum_k (1/f_k - 1)
inline double sector_sum(const std::vector<double>& f) {
  double prod = 1.0;
  double sum = 0.0;
  for (double v : f) {
    prod *= v;
    sum += 1.0 / v - 1.0;
  }
  return prod * sum;
}

/// Bottleneck upper bound on the spectral gap of the Ising chain with the
/// infinite-plateau ramped proposal, B = first-excited manifold.
inline IsingBound ising_bound(int sites, double beta, double h, const RampSchedule& s,
                              int steps_per_unit_time = kDefaultModeStepsPerUnitTime) {
  require(sites >= 4 && sites % 2 == 0, "ising_bound: N must be even and >= 4");
  IsingBound out;
  out.tail = ising_tail_term(sites, beta);
  const double pairs = static_cast<double>(sites) * (sites - 1);
  for (int parity = 0; parity < 2; ++parity) {
    const auto sector = MomentumSector::make(sites, parity);
    std::vector<double> f;
    f.reserve(sector.momenta.size());
    for (double k : sector.momenta) f.push_back(mode_eta_detail(k, h, s, steps_per_unit_time).f);
    (parity == 0 ? out.sector0 : out.sector1) = sector_sum(f) / pairs;
  }
  out.bound = out.sector0 + out.sector1 + out.tail;
  return out;
}

/// Composite Simpson rule for samples on a uniform grid with an even number
/// of intervals.
inline double simpson(const std::vector<double>& y, double a, double b) {
  require(y.size() >= 3 && (y.size() - 1) % 2 == 0, "simpson: need an even number of intervals");
  const std::size_t n = y.size() - 1;
  const double hstep = (b - a) / static_cast<double>(n);
  double acc = y.front() + y.back();
  for (std::size_t i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * y[i];
  return acc * hstep / 3.0;
}

struct IsingBoundIntegrals {
  double log_inverse_f = 0.0;   // int_0^pi log(1/f_k) dk
  double inverse_f_minus_1 = 0.0;  // int_0^pi (1/f_k - 1) dk
};

/// Integrals of the large-N bound from f on a uniform grid over [0, pi].
/// The endpoint modes k = 0, pi never transition (f = 1).
template <typename FOfK>
IsingBoundIntegrals ising_bound_integrals(FOfK&& f_of_k, int intervals) {
  require(intervals >= 2 && intervals % 2 == 0, "ising_bound_large_N: need an even grid");
  std::vector<double> a(static_cast<std::size_t>(intervals) + 1, 0.0);
  std::vector<double> b(a.size(), 0.0);
  for (int i = 1; i < intervals; ++i) {
    const double k = std::numbers::pi * i / intervals;
    const double f = f_of_k(k);
    a[static_cast<std::size_t>(i)] = -std::log(f);
    b[static_cast<std::size_t>(i)] = 1.0 / f - 1.0;
  }
  return {simpson(a, 0.0, std::numbers::pi), simpson(b, 0.0, std::numbers::pi)};
}

inline double ising_bound_from_integrals(int sites, double beta, const IsingBoundIntegrals& in) {
  const double n = sites;
  return std::exp(-n / (2.0 * std::numbers::pi) * in.log_inverse_f) * in.inverse_f_minus_1 /
             (std::numbers::pi * (n - 1.0)) +
         ising_tail_term(sites, beta);
}

inline constexpr int kDefaultQuadratureIntervals = 512;

/// Large-N form of ising_bound with the momentum sums replaced by integrals.
inline double ising_bound_large_N(int sites, double beta, double h, const RampSchedule& s,
                                  int quad_intervals = kDefaultQuadratureIntervals,
                                  int steps_per_unit_time = kDefaultModeStepsPerUnitTime) {
  require(sites >= 4 && sites % 2 == 0, "ising_bound_large_N: N must be even and >= 4");
  const auto integrals = ising_bound_integrals(
      [&](double k) { return mode_eta_detail(k, h, s, steps_per_unit_time).f; }, quad_intervals);
  return ising_bound_from_integrals(sites, beta, integrals);
}

/// Quench limit f_k^0 = 1 - h^2 sin^2 k / (2 eps_k^2).
inline double quench_f(double k, double h) {
  const double e = mode_energy(k, h);
  const double s = std::sin(k);
  return 1.0 - h * h * s * s / (2.0 * e * e);
}

}  // namespace qmcmc
