#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmcmc/chain.hpp"
#include "qmcmc/error.hpp"
#include "qmcmc/log.hpp"
#include "qmcmc/problems.hpp"
#include "qmcmc/quantum.hpp"

namespace qmcmc {

/// A set of configurations, materialised as a sorted index list.
struct SubsetSelector {
  std::vector<std::uint64_t> indices;
  std::uint64_t universe = 0;  // 2^N
  std::string label;

  static SubsetSelector from_indices(std::vector<std::uint64_t> idx, std::uint64_t universe,
                                     std::string label = {}) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    require(idx.empty() || idx.back() < universe, "SubsetSelector: index out of range");
    return {std::move(idx), universe, std::move(label)};
  }

  static SubsetSelector from_predicate(const std::function<bool(std::uint64_t)>& pred,
                                       std::uint64_t universe, std::string label = {}) {
    std::vector<std::uint64_t> idx;
    for (std::uint64_t x = 0; x < universe; ++x)
      if (pred(x)) idx.push_back(x);
    return {std::move(idx), universe, std::move(label)};
  }

  bool is_proper() const { return !indices.empty() && indices.size() < universe; }

  std::vector<char> mask() const {
    std::vector<char> m(universe, 0);
    for (auto x : indices) m[x] = 1;
    return m;
  }

  SubsetSelector complement() const {
    const auto m = mask();
    std::vector<std::uint64_t> idx;
    idx.reserve(universe - indices.size());
    for (std::uint64_t x = 0; x < universe; ++x)
      if (!m[x]) idx.push_back(x);
    return {std::move(idx), universe, label.empty() ? std::string{} : "complement of " + label};
  }

  double probability(const BoltzmannTarget& pi) const {
    double s = 0.0;
    for (auto x : indices) s += pi[x];
    return s;
  }
};

namespace detail {
inline void require_proper(const SubsetSelector& s, Eigen::Index dim, const char* what) {
  require(static_cast<Eigen::Index>(s.universe) == dim,
          std::string(what) + ": subset universe does not match the chain");
  require(s.is_proper(), std::string(what) + ": subset must be nonempty and proper");
}
}  // namespace detail

/// E(S, S^c) = sum_{x in S, y not in S} pi(x) P(x, y)
inline double equilibrium_flow(const TransitionMatrix& t, const SubsetSelector& s) {
  detail::require_proper(s, t.dimension(), "equilibrium_flow");
  const auto in = s.mask();
  double flow = 0.0;
  for (auto x : s.indices) {
    double row = 0.0;
    for (Eigen::Index y = 0; y < t.dimension(); ++y)
      if (!in[static_cast<std::size_t>(y)]) row += t.p(static_cast<Eigen::Index>(x), y);
    flow += t.target[x] * row;
  }
  return flow;
}

/// Lambda(B) = E(B, B^c) / (pi(B) pi(B^c)), an upper bound on the spectral
/// gap. When pi(B) > 1/2 the complement is used, which leaves the value
/// unchanged for a reversible chain.
inline double lambda_bound(const TransitionMatrix& t, const SubsetSelector& b) {
  detail::require_proper(b, t.dimension(), "lambda_bound");
  const double pb = b.probability(t.target);
  if (pb > 0.5) {
    note("lambda_bound: pi(B) = " + std::to_string(pb) + " > 1/2, using the complement");
    const auto c = b.complement();
    const double pc = c.probability(t.target);
    return equilibrium_flow(t, c) / (pc * (1.0 - pc));
  }
  return equilibrium_flow(t, b) / (pb * (1.0 - pb));
}

/// Level id of every configuration: sort by energy and open a new level
/// whenever the gap to the previous energy exceeds `tolerance`.
inline std::vector<int> energy_level_ids(std::span<const double> table,
                                         double tolerance = kDegeneracyTolerance) {
  std::vector<std::uint64_t> order(table.size());
  for (std::uint64_t x = 0; x < order.size(); ++x) order[x] = x;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return table[a] < table[b]; });
  std::vector<int> ids(table.size(), 0);
  int level = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && table[order[i]] - table[order[i - 1]] > tolerance) ++level;
    ids[order[i]] = level;
  }
  return ids;
}

/// Distinct energy levels (lowest member of each group), ascending.
inline std::vector<double> energy_levels(std::span<const double> table,
                                         double tolerance = kDegeneracyTolerance) {
  const auto ids = energy_level_ids(table, tolerance);
  std::vector<double> levels;
  for (std::size_t x = 0; x < table.size(); ++x) {
    const auto k = static_cast<std::size_t>(ids[x]);
    if (levels.size() <= k) levels.resize(k + 1, std::numeric_limits<double>::infinity());
    levels[k] = std::min(levels[k], table[x]);
  }
  return levels;
}

/// All configurations on the k-th lowest energy level.
inline SubsetSelector energy_manifold(std::span<const double> table, int k,
                                      double tolerance = kDegeneracyTolerance) {
  const auto ids = energy_level_ids(table, tolerance);
  const int count = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
  require(k >= 0 && k < count, "energy_manifold: level " + std::to_string(k) +
                                   " does not exist (" + std::to_string(count) + " levels)");
  std::vector<std::uint64_t> idx;
  for (std::uint64_t x = 0; x < table.size(); ++x)
    if (ids[x] == k) idx.push_back(x);
  return {std::move(idx), table.size(), "energy manifold " + std::to_string(k)};
}

inline SubsetSelector energy_manifold(const ClassicalHamiltonian& h, int k) {
  const auto table = energy_table(h);
  return energy_manifold(table, k);
}

/// Bottleneck ratio of the infinite-plateau ramped proposal evaluated from
/// ramp overlaps C(n, x) = <n|U_1|x>:
///
///   (1 / (pi(B) pi(B^c))) sum_{x in B, y in T} pi(x) Q(x -> y)
///
/// with Q the time-averaged proposal and every B -> T move accepted. T
/// defaults to B^c. The value is lambda_bound of the Metropolis chain when
/// every configuration in T lies below every configuration in B; otherwise it
/// is a proposal-flow diagnostic. Restricting T to the lower-energy part of
/// B^c gives the downhill flow used by the Ising-chain bound.
///
/// Within a degenerate plateau level the overlaps enter coherently, matching
/// proposal_time_averaged: per level the sum is sum_nm A_nm B_nm with
/// A_nm = sum_{x in B} pi(x) C_nx conj(C_mx), B_nm = sum_{y in T} C_ny conj(C_my).
inline double ramped_lambda_from_overlaps(const ComplexMatrix& overlaps,
                                          const PlateauSpectrum& spec,
                                          const BoltzmannTarget& pi, const SubsetSelector& b,
                                          const std::optional<SubsetSelector>& target = {}) {
  const Eigen::Index dim = spec.dimension();
  require(overlaps.rows() == dim && overlaps.cols() == dim,
          "ramped_lambda_from_overlaps: dimension mismatch");
  require(static_cast<Eigen::Index>(pi.size()) == dim,
          "ramped_lambda_from_overlaps: target dimension mismatch");
  detail::require_proper(b, dim, "ramped_lambda_from_overlaps");
  const SubsetSelector to = target ? *target : b.complement();
  require(static_cast<Eigen::Index>(to.universe) == dim && !to.indices.empty(),
          "ramped_lambda_from_overlaps: target set must be nonempty");
  const auto in_b = b.mask();
  for (auto y : to.indices)
    require(!in_b[y], "ramped_lambda_from_overlaps: target set must be disjoint from B");

  const double pb = b.probability(pi);
  double total = 0.0;
  for (const auto& level : spec.blocks()) {
    const Eigen::Index d = level.size;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(d, d);
    for (auto x : b.indices) {
      const Eigen::VectorXcd c = overlaps.block(level.start, static_cast<Eigen::Index>(x), d, 1);
      a.noalias() += pi[x] * c * c.adjoint();
    }
    for (auto y : to.indices) {
      const Eigen::VectorXcd c = overlaps.block(level.start, static_cast<Eigen::Index>(y), d, 1);
      t.noalias() += c * c.adjoint();
    }
    total += a.cwiseProduct(t).sum().real();
  }
  return total / (pb * (1.0 - pb));
}

inline double ramped_lambda_from_overlaps(const RampPropagator& u1, const PlateauSpectrum& spec,
                                          const BoltzmannTarget& pi, const SubsetSelector& b,
                                          const std::optional<SubsetSelector>& target = {}) {
  return ramped_lambda_from_overlaps(plateau_overlaps(u1, spec), spec, pi, b, target);
}

}  // namespace qmcmc
