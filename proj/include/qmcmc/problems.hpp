#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "qmcmc/error.hpp"
#include "qmcmc/rng.hpp"
#include "qmcmc/spin.hpp"

namespace qmcmc {

enum class Model { IsingChain, SK, ThreeSpin };

inline std::string_view to_string(Model m) {
  switch (m) {
    case Model::IsingChain: return "ising";
    case Model::SK: return "sk";
    case Model::ThreeSpin: return "3spin";
  }
  return "?";
}

inline Model parse_model(std::string_view s) {
  if (s == "ising" || s == "ising_chain") return Model::IsingChain;
  if (s == "sk") return Model::SK;
  if (s == "3spin" || s == "three_spin") return Model::ThreeSpin;
  throw ConfigError("unknown model '" + std::string(s) + "' (expected ising, sk or 3spin)");
}

struct PairCoupling {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

struct TripleCoupling {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;
};

/// Periodic chain  H = -sum_i s_i s_{i+1}.
struct IsingChainTerms {};

/// H = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i.
struct SkTerms {
  std::vector<PairCoupling> couplings;
  std::vector<double> fields;
};

/// H = sum_{i<j<k} J_ijk s_i s_j s_k.
struct ThreeSpinTerms {
  std::vector<TripleCoupling> couplings;
};

/// Diagonal (classical) spin Hamiltonian. Immutable after construction.
class ClassicalHamiltonian {
 public:
  using Terms = std::variant<IsingChainTerms, SkTerms, ThreeSpinTerms>;

  static ClassicalHamiltonian ising_chain(int sites) {
    require(sites >= 2 && sites <= 63, "ising chain needs 2 <= N <= 63");
    return ClassicalHamiltonian(sites, IsingChainTerms{}, std::nullopt);
  }

  static ClassicalHamiltonian sk(int sites, std::vector<PairCoupling> couplings,
                                 std::vector<double> fields,
                                 std::optional<std::uint64_t> seed = std::nullopt) {
    require(sites >= 1 && sites <= 63, "sk needs 1 <= N <= 63");
    if (fields.empty()) fields.assign(static_cast<std::size_t>(sites), 0.0);
    require(fields.size() == static_cast<std::size_t>(sites), "sk: fields must have length N");
    std::set<std::pair<int, int>> seen;
    for (const auto& c : couplings) {
      require(0 <= c.i && c.i < c.j && c.j < sites,
              "sk: couplings must satisfy 0 <= i < j < N");
      require(seen.emplace(c.i, c.j).second, "sk: duplicate coupling");
      require(std::isfinite(c.value), "sk: non-finite coupling");
    }
    for (double f : fields) require(std::isfinite(f), "sk: non-finite field");
    return ClassicalHamiltonian(sites, SkTerms{std::move(couplings), std::move(fields)}, seed);
  }

  static ClassicalHamiltonian three_spin(int sites, std::vector<TripleCoupling> couplings,
                                         std::optional<std::uint64_t> seed = std::nullopt) {
    require(sites >= 3 && sites <= 63, "3-spin needs 3 <= N <= 63");
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& c : couplings) {
      require(0 <= c.i && c.i < c.j && c.j < c.k && c.k < sites,
              "3-spin: couplings must satisfy 0 <= i < j < k < N");
      require(seen.emplace(c.i, c.j, c.k).second, "3-spin: duplicate coupling");
      require(std::isfinite(c.value), "3-spin: non-finite coupling");
    }
    return ClassicalHamiltonian(sites, ThreeSpinTerms{std::move(couplings)}, seed);
  }

  int sites() const { return sites_; }
  const Terms& terms() const { return terms_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  Model model() const {
    return std::visit(
        [](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, IsingChainTerms>) return Model::IsingChain;
          else if constexpr (std::is_same_v<T, SkTerms>) return Model::SK;
          else return Model::ThreeSpin;
        },
        terms_);
  }

  /// Energy of the configuration with the given packed index (no range check).
  double energy_of_index(std::uint64_t x) const {
    auto s = [x](int b) { return ((x >> b) & 1U) ? -1.0 : 1.0; };
    return std::visit(
        [&](const auto& t) -> double {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, IsingChainTerms>) {
            // Anti-aligned neighbours are exactly the set bits of x ^ rot(x).
            const std::uint64_t mask = state_count(sites_) - 1;
            const std::uint64_t rot = ((x >> 1) | (x << (sites_ - 1))) & mask;
            const int broken = std::popcount(x ^ rot);
            return static_cast<double>(2 * broken - sites_);
          } else if constexpr (std::is_same_v<T, SkTerms>) {
            double e = 0.0;
            for (const auto& c : t.couplings) e += c.value * s(c.i) * s(c.j);
            for (int i = 0; i < sites_; ++i) e += t.fields[static_cast<std::size_t>(i)] * s(i);
            return e;
          } else {
            double e = 0.0;
            for (const auto& c : t.couplings) e += c.value * s(c.i) * s(c.j) * s(c.k);
            return e;
          }
        },
        terms_);
  }

 private:
  ClassicalHamiltonian(int sites, Terms terms, std::optional<std::uint64_t> seed)
      : sites_(sites), terms_(std::move(terms)), seed_(seed) {}

  int sites_;
  Terms terms_;
  std::optional<std::uint64_t> seed_;
};

inline double energy(const ClassicalHamiltonian& h, const SpinConfiguration& x) {
  require(x.sites == h.sites(), "energy: configuration has N=" + std::to_string(x.sites) +
                                    " but Hamiltonian has N=" + std::to_string(h.sites()));
  return h.energy_of_index(x.index);
}

/// Energies of all 2^N configurations, indexed by packed configuration.
inline std::vector<double> energy_table(const ClassicalHamiltonian& h,
                                        int max_sites = kMaxTableSites) {
  require(h.sites() <= max_sites, "energy_table: N=" + std::to_string(h.sites()) +
                                      " exceeds the cap of " + std::to_string(max_sites) +
                                      " sites");
  const std::uint64_t dim = state_count(h.sites());
  std::vector<double> table(dim);
  for (std::uint64_t x = 0; x < dim; ++x) table[x] = h.energy_of_index(x);
  return table;
}

/// Boltzmann distribution over the full configuration space.
struct BoltzmannTarget {
  std::vector<double> probabilities;
  std::vector<double> log_probabilities;
  double beta = 0.0;
  double log_partition = 0.0;

  std::size_t size() const { return probabilities.size(); }
  double operator[](std::size_t x) const { return probabilities[x]; }
  double min_probability() const {
    return *std::min_element(probabilities.begin(), probabilities.end());
  }
};

inline BoltzmannTarget boltzmann(std::span<const double> energies, double beta) {
  require(std::isfinite(beta), "boltzmann: beta must be finite");
  require(beta >= 0.0, "boltzmann: beta must be non-negative");
  require(!energies.empty(), "boltzmann: empty energy table");
  const double e_min = *std::min_element(energies.begin(), energies.end());
  double sum = 0.0;
  for (double e : energies) sum += std::exp(-beta * (e - e_min));
  const double log_sum = std::log(sum);

  BoltzmannTarget t;
  t.beta = beta;
  t.log_partition = -beta * e_min + log_sum;
  t.probabilities.resize(energies.size());
  t.log_probabilities.resize(energies.size());
  for (std::size_t x = 0; x < energies.size(); ++x) {
    t.log_probabilities[x] = -beta * (energies[x] - e_min) - log_sum;
    t.probabilities[x] = std::exp(t.log_probabilities[x]);
  }
  return t;
}

inline BoltzmannTarget boltzmann(const ClassicalHamiltonian& h, double beta) {
  require(std::isfinite(beta), "boltzmann: beta must be finite");
  const auto table = energy_table(h);
  return boltzmann(table, beta);
}

/// SK instance: J_ij ~ N(0, 1/N) drawn in (i, j) lexicographic order, then
/// h_i ~ U(-0.25, 0.25) for i = 0..N-1.
inline ClassicalHamiltonian sample_sk(int sites, std::uint64_t seed) {
  require(sites >= 2, "sample_sk: N must be at least 2");
  RandomStream rng(seed);
  const double sd = std::sqrt(1.0 / sites);
  std::vector<PairCoupling> couplings;
  couplings.reserve(static_cast<std::size_t>(sites * (sites - 1) / 2));
  for (int i = 0; i < sites; ++i)
    for (int j = i + 1; j < sites; ++j) couplings.push_back({i, j, rng.normal(0.0, sd)});
  std::vector<double> fields(static_cast<std::size_t>(sites));
  for (auto& f : fields) f = rng.uniform(-0.25, 0.25);
  return ClassicalHamiltonian::sk(sites, std::move(couplings), std::move(fields), seed);
}

/// 3-spin instance: J_ijk ~ N(0, 3/N^2) in (i, j, k) lexicographic order.
inline ClassicalHamiltonian sample_3spin(int sites, std::uint64_t seed) {
  require(sites >= 3, "sample_3spin: N must be at least 3");
  RandomStream rng(seed);
  const double sd = std::sqrt(3.0) / sites;
  std::vector<TripleCoupling> couplings;
  for (int i = 0; i < sites; ++i)
    for (int j = i + 1; j < sites; ++j)
      for (int k = j + 1; k < sites; ++k) couplings.push_back({i, j, k, rng.normal(0.0, sd)});
  return ClassicalHamiltonian::three_spin(sites, std::move(couplings), seed);
}

/// A reproducible disorder ensemble: instance i uses derive_seed(master_seed, i).
struct DisorderSpec {
  Model model = Model::SK;
  int sites = 0;
  std::uint64_t master_seed = 0;
  int instances = 50;

  std::uint64_t instance_seed(int i) const {
    return derive_seed(master_seed, static_cast<std::uint64_t>(i));
  }

  ClassicalHamiltonian instance(int i) const {
    require(i >= 0 && i < instances, "DisorderSpec: instance index out of range");
    return generate(model, sites, instance_seed(i));
  }

  static ClassicalHamiltonian generate(Model model, int sites, std::uint64_t seed) {
    switch (model) {
      case Model::SK: return sample_sk(sites, seed);
      case Model::ThreeSpin: return sample_3spin(sites, seed);
      case Model::IsingChain: return ClassicalHamiltonian::ising_chain(sites);
    }
    throw ConfigError("DisorderSpec: unknown model");
  }
};

}  // namespace qmcmc
