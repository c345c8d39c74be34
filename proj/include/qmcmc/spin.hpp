#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmcmc/error.hpp"

namespace qmcmc {

/// Largest site count for which a full 2^N energy table is built.
inline constexpr int kMaxTableSites = 20;

/// Largest site count for paths that hold dense 2^N x 2^N matrices.
inline constexpr int kMaxDenseSites = 14;

inline std::uint64_t state_count(int sites) { return std::uint64_t{1} << sites; }

/// Classical configuration of N Ising spins packed into an integer.
///
/// Bit b of `index` stores spin b: a clear bit is spin +1, a set bit is
/// spin -1. Every module shares this convention, so index arithmetic (bit
/// flips, complements) maps directly onto spin operations.
struct SpinConfiguration {
  std::uint64_t index = 0;
  int sites = 0;

  SpinConfiguration() = default;
  SpinConfiguration(std::uint64_t idx, int n) : index(idx), sites(n) {
    require(n >= 1 && n <= 63, "SpinConfiguration: site count must be in [1, 63]");
    require(idx < state_count(n), "SpinConfiguration: index " + std::to_string(idx) +
                                      " out of range for N=" + std::to_string(n));
  }

  int spin(int site) const { return ((index >> site) & 1U) ? -1 : 1; }

  std::vector<int> spins() const {
    std::vector<int> out(static_cast<std::size_t>(sites));
    for (int b = 0; b < sites; ++b) out[static_cast<std::size_t>(b)] = spin(b);
    return out;
  }

  static SpinConfiguration from_spins(std::span<const int> spins) {
    require(!spins.empty(), "SpinConfiguration: empty spin vector");
    std::uint64_t idx = 0;
    for (std::size_t b = 0; b < spins.size(); ++b) {
      require(spins[b] == 1 || spins[b] == -1, "SpinConfiguration: spins must be +1 or -1");
      if (spins[b] == -1) idx |= std::uint64_t{1} << b;
    }
    return {idx, static_cast<int>(spins.size())};
  }

  SpinConfiguration flipped(int site) const { return {index ^ (std::uint64_t{1} << site), sites}; }
  SpinConfiguration complement() const { return {index ^ (state_count(sites) - 1), sites}; }

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;
};

}  // namespace qmcmc
