#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qmcmc/bottleneck.hpp"
#include "qmcmc/chain.hpp"

using namespace qmcmc;
using Catch::Approx;

namespace {

oracle::Matrix to_rows(const RealMatrix& m) {
  oracle::Matrix out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
  return out;
}

struct Built {
  std::vector<double> table;
  PlateauSpectrum spec;
  RampPropagator u1;
  TransitionMatrix t;
};

Built build(const ClassicalHamiltonian& h, double beta, double alpha) {
  auto table = energy_table(h);
  auto spec = diagonalize_plateau(plateau_hamiltonian(table, h.sites(), 1.5));
  auto u1 = ramp_propagator(table, h.sites(), 1.5, RampSchedule::large_kappa(RampKind::Sin2, alpha));
  auto t = metropolis_transition(proposal_time_averaged(u1, spec), boltzmann(table, beta));
  return {std::move(table), std::move(spec), std::move(u1), std::move(t)};
}

}  // namespace

TEST_CASE("equilibrium flow matches the double-sum oracle") {
  const auto b = build(ClassicalHamiltonian::ising_chain(3), 5.0, 2.0);
  const auto s1 = energy_manifold(b.table, 1);
  const auto mask = s1.mask();
  const double ref = oracle::flow(to_rows(b.t.p), b.t.target.probabilities, mask);
  CHECK(equilibrium_flow(b.t, s1) == Approx(ref).epsilon(1e-12));
  CHECK(std::abs(equilibrium_flow(b.t, s1) - equilibrium_flow(b.t, s1.complement())) <= 1e-12);

  const double lam = lambda_bound(b.t, s1);
  const double p = s1.probability(b.t.target);
  CHECK(lam == Approx(ref / (p * (1.0 - p))).epsilon(1e-12));
}

TEST_CASE("flow vanishes without off-diagonal mass") {
  const auto pi = boltzmann(std::vector<double>(8, 0.0), 1.0);
  TransitionMatrix id{RealMatrix::Identity(8, 8), pi, 0.0};
  const auto s = SubsetSelector::from_predicate([](std::uint64_t x) { return x != 5; }, 8);
  CHECK(equilibrium_flow(id, s) == 0.0);
}

TEST_CASE("improper subsets are rejected") {
  const auto pi = boltzmann(std::vector<double>(4, 0.0), 1.0);
  TransitionMatrix id{RealMatrix::Identity(4, 4), pi, 0.0};
  CHECK_THROWS_AS(equilibrium_flow(id, SubsetSelector::from_indices({}, 4)), ConfigError);
  CHECK_THROWS_AS(lambda_bound(id, SubsetSelector::from_indices({0, 1, 2, 3}, 4)), ConfigError);
  CHECK_THROWS_AS(lambda_bound(id, SubsetSelector::from_indices({0}, 8)), ConfigError);
  CHECK_THROWS_AS(SubsetSelector::from_indices({9}, 8), ConfigError);
}

TEST_CASE("uniform chain gives unit bottleneck ratio") {
  const auto pi = boltzmann(std::vector<double>(16, 0.0), 0.0);
  TransitionMatrix u{RealMatrix::Constant(16, 16, 1.0 / 16), pi, 0.0};
  for (const auto& idx : {std::vector<std::uint64_t>{3}, {0, 1, 2, 3, 4}, {1, 3, 5, 7, 9, 11, 13, 15}, {0, 2, 4, 6, 8, 9, 10, 11, 12, 13}})
    CHECK(lambda_bound(u, SubsetSelector::from_indices(idx, 16)) == Approx(1.0).margin(1e-12));
}

TEST_CASE("bound dominates the gap on random subsets") {
  std::mt19937_64 rng(2024);
  for (double beta : {1.0, 5.0}) {
    for (const auto& h : {ClassicalHamiltonian::ising_chain(4), sample_sk(4, 5)}) {
      const auto b = build(h, beta, 1.0);
      const double delta = spectral_gap(b.t).delta;
      int tested = 0;
      while (tested < 100) {
        std::vector<std::uint64_t> idx;
        for (std::uint64_t x = 0; x < 16; ++x)
          if (rng() & 1u) idx.push_back(x);
        const auto s = SubsetSelector::from_indices(idx, 16);
        if (!s.is_proper()) continue;
        ++tested;
        CHECK(lambda_bound(b.t, s) >= delta - 1e-10);
        CHECK(std::abs(equilibrium_flow(b.t, s) - equilibrium_flow(b.t, s.complement())) <= 1e-12);
      }
    }
  }
}

TEST_CASE("energy manifolds of the Ising chain") {
  const auto t4 = energy_table(ClassicalHamiltonian::ising_chain(4));
  const auto ground = energy_manifold(t4, 0);
  CHECK(ground.indices == std::vector<std::uint64_t>{0, 15});
  CHECK(energy_manifold(ClassicalHamiltonian::ising_chain(6), 1).indices.size() == 30);

  for (int n : {4, 6, 8}) {
    const auto table = energy_table(ClassicalHamiltonian::ising_chain(n));
    const auto levels = energy_levels(table);
    for (std::size_t k = 0; k < levels.size(); ++k) CHECK(levels[k] == -n + 4.0 * static_cast<double>(k));
    std::vector<int> hits(table.size(), 0);
    for (int k = 0; k < static_cast<int>(levels.size()); ++k)
      for (auto x : energy_manifold(table, k).indices) ++hits[x];
    CHECK(std::all_of(hits.begin(), hits.end(), [](int c) { return c == 1; }));
  }
  CHECK_THROWS_AS(energy_manifold(t4, 3), ConfigError);
  CHECK_THROWS_AS(energy_manifold(t4, -1), ConfigError);
}

TEST_CASE("ramped overlap route equals lambda_bound when all moves are downhill") {
  for (double alpha : {0.0, 1.0, 3.0}) {
    const auto b = build(ClassicalHamiltonian::ising_chain(3), 5.0, alpha);
    const auto s1 = energy_manifold(b.table, 1);
    const double direct = lambda_bound(b.t, s1);
    const double overlaps = ramped_lambda_from_overlaps(b.u1, b.spec, b.t.target, s1);
    CHECK(std::abs(direct - overlaps) <= 1e-9);
  }
}

TEST_CASE("ramped overlap route bounds the gap at N=4") {
  for (double alpha : {0.0, 2.0}) {
    const auto b = build(ClassicalHamiltonian::ising_chain(4), 5.0, alpha);
    const double delta = spectral_gap(b.t).delta;
    const auto s1 = energy_manifold(b.table, 1);
    CHECK(ramped_lambda_from_overlaps(b.u1, b.spec, b.t.target, s1) >= delta - 1e-10);
  }
}

TEST_CASE("alpha zero reduces to the identity-overlap expression") {
  const auto b = build(ClassicalHamiltonian::ising_chain(3), 5.0, 0.0);
  const auto s1 = energy_manifold(b.table, 1);
  const Eigen::MatrixXcd overlaps = b.spec.vectors.transpose().cast<std::complex<double>>();
  CHECK(ramped_lambda_from_overlaps(overlaps, b.spec, b.t.target, s1) ==
        Approx(ramped_lambda_from_overlaps(b.u1, b.spec, b.t.target, s1)).epsilon(1e-12));
  CHECK_THROWS_AS(ramped_lambda_from_overlaps(b.u1, b.spec, b.t.target, s1, s1), ConfigError);
}
