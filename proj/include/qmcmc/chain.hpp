#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmcmc/error.hpp"
#include "qmcmc/problems.hpp"
#include "qmcmc/quantum.hpp"

namespace qmcmc {

/// Proposals more asymmetric than this are rejected by metropolis_transition.
inline constexpr double kProposalSymmetryTolerance = 1e-6;

/// Metropolis-Hastings chain. p(y, x) is the probability of moving y -> x.
struct TransitionMatrix {
  RealMatrix p;
  BoltzmannTarget target;
  /// Most negative diagonal entry that was clamped to zero (0 if none).
  double clamped_diagonal = 0.0;

  Eigen::Index dimension() const { return p.rows(); }
};

/// max_{x,y} |pi(x) P(x,y) - pi(y) P(y,x)|
inline double detailed_balance_residual(const TransitionMatrix& t) {
  const Eigen::Map<const Eigen::VectorXd> pi(t.target.probabilities.data(), t.dimension());
  const RealMatrix flow = pi.asDiagonal() * t.p;
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

/// ||pi P - pi||_inf
inline double stationarity_residual(const TransitionMatrix& t) {
  const Eigen::Map<const Eigen::RowVectorXd> pi(t.target.probabilities.data(), t.dimension());
  return (pi * t.p - pi).cwiseAbs().maxCoeff();
}

/// P(y,x) = Q(x|y) min(1, pi(x)/pi(y)) for x != y; the diagonal takes the
/// rejected mass. The Hastings ratio is dropped, so Q must be symmetric.
inline TransitionMatrix metropolis_transition(const ProposalMatrix& proposal,
                                              const BoltzmannTarget& target) {
  const Eigen::Index dim = proposal.dimension();
  require(static_cast<Eigen::Index>(target.size()) == dim,
          "metropolis_transition: proposal and target dimensions differ");
  const double asym = (proposal.q - proposal.q.transpose()).cwiseAbs().maxCoeff();
  if (asym > kProposalSymmetryTolerance)
    throw ConfigError("metropolis_transition: proposal is not symmetric (residual " +
                      std::to_string(asym) + "); the Hastings ratio would be required");

  TransitionMatrix t;
  t.target = target;
  t.p.resize(dim, dim);
  const auto& logpi = target.log_probabilities;
  for (Eigen::Index y = 0; y < dim; ++y) {
    double off = 0.0;
    for (Eigen::Index x = 0; x < dim; ++x) {
      if (x == y) continue;
      const double log_ratio = logpi[static_cast<std::size_t>(x)] - logpi[static_cast<std::size_t>(y)];
      const double accept = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
      const double v = proposal.q(y, x) * accept;
      t.p(y, x) = v;
      off += v;
    }
    double stay = 1.0 - off;
    if (stay < 0.0) {
      if (stay < -1e-12)
        throw NumericalError("metropolis_transition: row " + std::to_string(y) +
                             " has off-diagonal mass " + std::to_string(off) + " > 1");
      t.clamped_diagonal = std::min(t.clamped_diagonal, stay);
      stay = 0.0;
    }
    t.p(y, y) = stay;
  }
  return t;
}

struct GapResult {
  double delta = 0.0;
  /// Largest |lambda| over the non-unit eigenvalues.
  double lambda2 = 0.0;
  /// Full spectrum, ascending; empty unless requested.
  std::vector<double> eigenvalues;
  double stationarity_residual = 0.0;
  double detailed_balance_residual = 0.0;
};

/// Reversibility must hold to this level before the symmetric solver is used.
inline constexpr double kReversibilityTolerance = 1e-8;

/// Spectral gap 1 - |lambda_2| of a reversible chain, from the spectrum of
/// S = D^{1/2} P D^{-1/2}, D = diag(pi), which is symmetric under detailed
/// balance and similar to P.
inline GapResult spectral_gap(const TransitionMatrix& t, bool keep_spectrum = false) {
  GapResult out;
  out.detailed_balance_residual = detailed_balance_residual(t);
  out.stationarity_residual = stationarity_residual(t);
  if (out.detailed_balance_residual > kReversibilityTolerance)
    throw NumericalError("spectral_gap: chain is not reversible (detailed-balance residual " +
                         std::to_string(out.detailed_balance_residual) + ")");

  const Eigen::Index dim = t.dimension();
  const auto& logpi = t.target.log_probabilities;
  RealMatrix s(dim, dim);
  for (Eigen::Index y = 0; y < dim; ++y)
    for (Eigen::Index x = 0; x < dim; ++x)
      s(y, x) = t.p(y, x) * std::exp(0.5 * (logpi[static_cast<std::size_t>(y)] -
                                            logpi[static_cast<std::size_t>(x)]));
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectral_gap: eigensolver did not converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();

  Eigen::Index unit = 0;
  (ev.array() - 1.0).abs().minCoeff(&unit);
  if (std::abs(ev[unit] - 1.0) > 1e-8)
    throw NumericalError("spectral_gap: no eigenvalue within 1e-8 of 1 (closest " +
                         std::to_string(ev[unit]) + ")");
  double second = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (i != unit) second = std::max(second, std::abs(ev[i]));
  out.lambda2 = std::min(second, 1.0);
  out.delta = 1.0 - out.lambda2;
  if (keep_spectrum) out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  return out;
}

struct MixingTimeBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// (1/delta - 1) ln(1/(2 eps)) <= t_mix <= (1/delta) ln(1/(eps pi_min))
inline MixingTimeBounds mixing_time_bounds(double delta, double pi_min, double eps) {
  require(delta > 0.0 && delta <= 1.0, "mixing_time_bounds: need 0 < delta <= 1");
  require(eps > 0.0 && eps < 0.5, "mixing_time_bounds: need 0 < eps < 1/2");
  require(pi_min > 0.0 && pi_min <= 1.0, "mixing_time_bounds: need 0 < pi_min <= 1");
  return {(1.0 / delta - 1.0) * std::log(1.0 / (2.0 * eps)),
          (1.0 / delta) * std::log(1.0 / (eps * pi_min))};
}

}  // namespace qmcmc
