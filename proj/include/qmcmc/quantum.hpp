#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmcmc/error.hpp"
#include "qmcmc/log.hpp"
#include "qmcmc/problems.hpp"
#include "qmcmc/schedule.hpp"

namespace qmcmc {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Eigenvalues closer than this are treated as one degenerate level.
inline constexpr double kDegeneracyTolerance = 1e-9;

/// Default Strang steps per unit time for the many-body ramp.
inline constexpr int kDefaultStepsPerUnitTime = 64;

inline void require_dense_size(int sites, const char* what) {
  require(sites <= kMaxDenseSites, std::string(what) + ": N=" + std::to_string(sites) +
                                       " exceeds the dense-matrix cap of " +
                                       std::to_string(kMaxDenseSites) + " sites");
}

/// H_c + h * sum_i sigma^x_i in the computational basis. Real symmetric.
inline RealMatrix plateau_hamiltonian(std::span<const double> energies, int sites, double field) {
  require_dense_size(sites, "plateau_hamiltonian");
  const auto dim = static_cast<Eigen::Index>(state_count(sites));
  require(static_cast<Eigen::Index>(energies.size()) == dim,
          "plateau_hamiltonian: energy table does not match N");
  RealMatrix m = RealMatrix::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    m(x, x) = energies[static_cast<std::size_t>(x)];
    for (int b = 0; b < sites; ++b) m(x, x ^ (Eigen::Index{1} << b)) = field;
  }
  return m;
}

inline RealMatrix plateau_hamiltonian(const ClassicalHamiltonian& h, double field) {
  require_dense_size(h.sites(), "plateau_hamiltonian");
  const auto table = energy_table(h);
  return plateau_hamiltonian(table, h.sites(), field);
}

/// Contiguous run [start, start + size) of (near-)equal eigenvalues.
struct EnergyBlock {
  Eigen::Index start = 0;
  Eigen::Index size = 1;
};

/// Full eigendecomposition of the plateau Hamiltonian. Column n of `vectors`
/// is |n> with energy `energies[n]`, ascending.
struct PlateauSpectrum {
  Eigen::VectorXd energies;
  RealMatrix vectors;

  Eigen::Index dimension() const { return energies.size(); }

  std::vector<EnergyBlock> blocks(double tolerance = kDegeneracyTolerance) const {
    std::vector<EnergyBlock> out;
    for (Eigen::Index n = 0; n < energies.size(); ++n) {
      if (!out.empty() && energies[n] - energies[n - 1] < tolerance)
        ++out.back().size;
      else
        out.push_back({n, 1});
    }
    return out;
  }

  std::size_t degenerate_block_count(double tolerance = kDegeneracyTolerance) const {
    const auto b = blocks(tolerance);
    return static_cast<std::size_t>(
        std::count_if(b.begin(), b.end(), [](const EnergyBlock& e) { return e.size > 1; }));
  }
};

inline PlateauSpectrum diagonalize_plateau(const RealMatrix& m) {
  require(m.rows() == m.cols() && m.rows() > 0, "diagonalize_plateau: matrix must be square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9)
    throw ConfigError("diagonalize_plateau: input is not symmetric (residual " +
                      std::to_string(asym) + ")");
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericalError("diagonalize_plateau: eigensolver did not converge");
  return PlateauSpectrum{solver.eigenvalues(), solver.eigenvectors()};
}

/// Unitary of the ramp-up segment, column x = U_1 |x>.
struct RampPropagator {
  ComplexMatrix unitary;
  std::int64_t steps = 0;
  double alpha = 0.0;
};

namespace detail {

// Rows of a row-major block of `width` complex columns, stored as interleaved doubles.
struct ColumnBlock {
  std::vector<double> data;
  std::size_t width = 0;
  double* row(std::uint64_t z) { return data.data() + z * 2 * width; }
};

inline void scale_row(double* r, std::size_t width, Complex phase) {
  const double pr = phase.real();
  const double pi = phase.imag();
  for (std::size_t k = 0; k < 2 * width; k += 2) {
    const double ar = r[k];
    const double ai = r[k + 1];
    r[k] = pr * ar - pi * ai;
    r[k + 1] = pr * ai + pi * ar;
  }
}

// (r0, r1) <- exp(-i theta sigma_x) (r0, r1) with c = cos(theta), s = sin(theta).
inline void rotate_rows(double* r0, double* r1, std::size_t width, double c, double s) {
  for (std::size_t k = 0; k < 2 * width; k += 2) {
    const double ar = r0[k];
    const double ai = r0[k + 1];
    const double br = r1[k];
    const double bi = r1[k + 1];
    r0[k] = c * ar + s * bi;
    r0[k + 1] = c * ai - s * br;
    r1[k] = c * br + s * ai;
    r1[k + 1] = c * bi - s * ar;
  }
}

}  // namespace detail

/// Integrates i d/dt psi = (H_c + gamma(t) h sum_i sigma^x_i) psi over
/// [t_begin, t_end] for every computational basis state, using `steps` Strang
/// steps: half diagonal phase, transverse rotation at the step midpoint, half
/// diagonal phase. Adjacent half phases are fused.
inline ComplexMatrix evolve_window(std::span<const double> energies, int sites, double field,
                                   const RampSchedule& schedule, double t_begin, double t_end,
                                   std::int64_t steps) {
  require_dense_size(sites, "evolve_window");
  const std::uint64_t dim = state_count(sites);
  require(energies.size() == dim, "evolve_window: energy table does not match N");
  require(t_end >= t_begin, "evolve_window: t_end < t_begin");
  require(steps >= 1, "evolve_window: need at least one step");

  const double dt = (t_end - t_begin) / static_cast<double>(steps);
  std::vector<Complex> half(dim);
  std::vector<Complex> full(dim);
  for (std::uint64_t z = 0; z < dim; ++z) {
    half[z] = std::polar(1.0, -0.5 * dt * energies[z]);
    full[z] = std::polar(1.0, -dt * energies[z]);
  }
  std::vector<std::pair<double, double>> rot(static_cast<std::size_t>(steps));
  for (std::int64_t j = 0; j < steps; ++j) {
    const double t_mid = std::min(t_begin + (static_cast<double>(j) + 0.5) * dt, t_end);
    const double theta = dt * ramp_value(schedule, t_mid) * field;
    rot[static_cast<std::size_t>(j)] = {std::cos(theta), std::sin(theta)};
  }

  ComplexMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const std::size_t width = std::clamp<std::uint64_t>(32768 / dim, 4, dim);
  detail::ColumnBlock block;
  for (std::uint64_t c0 = 0; c0 < dim; c0 += width) {
    const std::size_t w = std::min<std::uint64_t>(width, dim - c0);
    block.width = w;
    block.data.assign(2 * w * dim, 0.0);
    for (std::size_t j = 0; j < w; ++j) block.row(c0 + j)[2 * j] = 1.0;

    for (std::uint64_t z = 0; z < dim; ++z) detail::scale_row(block.row(z), w, half[z]);
    for (std::int64_t j = 0; j < steps; ++j) {
      const auto [c, s] = rot[static_cast<std::size_t>(j)];
      for (int b = 0; b < sites; ++b) {
        const std::uint64_t bit = std::uint64_t{1} << b;
        for (std::uint64_t z = 0; z < dim; ++z)
          if (!(z & bit)) detail::rotate_rows(block.row(z), block.row(z | bit), w, c, s);
      }
      const auto& phase = (j + 1 == steps) ? half : full;
      for (std::uint64_t z = 0; z < dim; ++z) detail::scale_row(block.row(z), w, phase[z]);
    }

    for (std::uint64_t z = 0; z < dim; ++z) {
      const double* r = block.row(z);
      for (std::size_t j = 0; j < w; ++j)
        out(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(c0 + j)) =
            Complex(r[2 * j], r[2 * j + 1]);
    }
  }
  return out;
}

inline RampPropagator ramp_propagator(std::span<const double> energies, int sites, double field,
                                      const RampSchedule& schedule,
                                      int steps_per_unit_time = kDefaultStepsPerUnitTime) {
  require(steps_per_unit_time >= 1, "ramp_propagator: steps_per_unit_time must be >= 1");
  require_dense_size(sites, "ramp_propagator");
  const auto dim = static_cast<Eigen::Index>(state_count(sites));
  RampPropagator out;
  out.alpha = schedule.alpha;
  if (schedule.alpha == 0.0) {
    out.unitary = ComplexMatrix::Identity(dim, dim);
    return out;
  }
  out.steps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(schedule.alpha * steps_per_unit_time - 1e-9)));
  out.unitary = evolve_window(energies, sites, field, schedule, 0.0, schedule.alpha, out.steps);
  return out;
}

inline RampPropagator ramp_propagator(const ClassicalHamiltonian& h, double field,
                                      const RampSchedule& schedule,
                                      int steps_per_unit_time = kDefaultStepsPerUnitTime) {
  require_dense_size(h.sites(), "ramp_propagator");
  const auto table = energy_table(h);
  return ramp_propagator(table, h.sites(), field, schedule, steps_per_unit_time);
}

/// Q(x|y) stored row-major by the conditioning state: q(y, x) = Q(x|y).
struct ProposalMatrix {
  enum class Kind { Quench, FiniteKappa, TimeAveraged };

  RealMatrix q;
  Kind kind = Kind::TimeAveraged;
  double time = 0.0;  // quench time or plateau duration; unused when time-averaged

  Eigen::Index dimension() const { return q.rows(); }
};

struct ProposalDiagnostics {
  double min_entry = 0.0;
  double row_sum_residual = 0.0;
  double symmetry_residual = 0.0;
};

inline ProposalDiagnostics diagnose(const ProposalMatrix& p) {
  ProposalDiagnostics d;
  d.min_entry = p.q.minCoeff();
  d.row_sum_residual = (p.q.rowwise().sum().array() - 1.0).abs().maxCoeff();
  d.symmetry_residual = (p.q - p.q.transpose()).cwiseAbs().maxCoeff();
  return d;
}

/// C(n, x) = <n|U_1|x>.
inline ComplexMatrix plateau_overlaps(const RampPropagator& u1, const PlateauSpectrum& spec) {
  require(u1.unitary.rows() == spec.dimension() && u1.unitary.cols() == spec.dimension(),
          "plateau_overlaps: propagator and spectrum dimensions differ");
  const RealMatrix vt = spec.vectors.transpose();
  if (u1.alpha == 0.0) return vt.cast<Complex>();
  ComplexMatrix c(spec.dimension(), spec.dimension());
  c.real() = vt * u1.unitary.real();
  c.imag() = vt * u1.unitary.imag();
  return c;
}

/// Infinite-plateau proposal
///   Q(x|y) = sum_E |sum_{n in E} <n|U_1|x><n|U_1|y>|^2,
/// the time average of |<x|U_1^T e^{-iH kappa} U_1|y>|^2. For a nondegenerate
/// spectrum this is sum_n |<n|U_1|x>|^2 |<n|U_1|y>|^2; inside a degenerate
/// level the coherent sum keeps the result independent of the eigenbasis.
///
/// Assembled as Q = A_re^T A_re - A_im^T A_im with one row per
/// (n, m) pair of a level, n <= m: |C_n|^2 on the diagonal, and
/// sqrt(2) C_n * conj(C_m) for n < m.
inline ProposalMatrix proposal_time_averaged(const ComplexMatrix& overlaps,
                                             const PlateauSpectrum& spec) {
  const Eigen::Index dim = spec.dimension();
  require(overlaps.rows() == dim && overlaps.cols() == dim,
          "proposal_time_averaged: dimension mismatch");
  const auto levels = spec.blocks();
  Eigen::Index pair_rows = 0;
  for (const auto& b : levels) pair_rows += b.size * (b.size - 1) / 2;

  RealMatrix diag_rows = overlaps.cwiseAbs2();
  ProposalMatrix out;
  out.kind = ProposalMatrix::Kind::TimeAveraged;
  out.q.noalias() = diag_rows.transpose() * diag_rows;

  if (pair_rows > 0) {
    note("proposal_time_averaged: " + std::to_string(spec.degenerate_block_count()) +
         " degenerate plateau level(s); using the basis-independent level sum");
    RealMatrix re(pair_rows, dim);
    RealMatrix im(pair_rows, dim);
    Eigen::Index r = 0;
    for (const auto& b : levels) {
      for (Eigen::Index n = b.start; n < b.start + b.size; ++n) {
        for (Eigen::Index m = n + 1; m < b.start + b.size; ++m, ++r) {
          const Eigen::RowVectorXcd w =
              std::sqrt(2.0) * overlaps.row(n).cwiseProduct(overlaps.row(m).conjugate());
          re.row(r) = w.real();
          im.row(r) = w.imag();
        }
      }
    }
    out.q.noalias() += re.transpose() * re;
    out.q.noalias() -= im.transpose() * im;
  }
  out.q = (0.5 * (out.q + out.q.transpose())).cwiseMax(0.0);
  return out;
}

inline ProposalMatrix proposal_time_averaged(const RampPropagator& u1,
                                             const PlateauSpectrum& spec) {
  return proposal_time_averaged(plateau_overlaps(u1, spec), spec);
}

/// Finite plateau: U = U_1^T e^{-i H kappa} U_1, Q(x|y) = |<x|U|y>|^2. The
/// ramp-down equals U_1^T because every factor of the discretised ramp is a
/// complex-symmetric matrix and the ramp-down applies them in reverse order.
inline ProposalMatrix proposal_finite_kappa(const ComplexMatrix& overlaps,
                                            const PlateauSpectrum& spec, double kappa) {
  require(kappa >= 0.0 && std::isfinite(kappa), "proposal_finite_kappa: kappa must be >= 0");
  const Eigen::Index dim = spec.dimension();
  require(overlaps.rows() == dim && overlaps.cols() == dim,
          "proposal_finite_kappa: dimension mismatch");
  ComplexMatrix phased = overlaps;
  for (Eigen::Index n = 0; n < dim; ++n) phased.row(n) *= std::polar(1.0, -spec.energies[n] * kappa);
  const ComplexMatrix u = overlaps.transpose() * phased;
  ProposalMatrix out;
  out.kind = ProposalMatrix::Kind::FiniteKappa;
  out.time = kappa;
  out.q = u.cwiseAbs2().transpose();
  return out;
}

inline ProposalMatrix proposal_finite_kappa(const RampPropagator& u1, const PlateauSpectrum& spec,
                                            double kappa) {
  return proposal_finite_kappa(plateau_overlaps(u1, spec), spec, kappa);
}

/// Fixed-field evolution for time t: Q(x|y) = |<x|e^{-iHt}|y>|^2.
inline ProposalMatrix proposal_quench(const PlateauSpectrum& spec, double t) {
  require(t >= 0.0 && std::isfinite(t), "proposal_quench: t must be >= 0");
  const RealMatrix& v = spec.vectors;
  const Eigen::ArrayXd phase = -spec.energies.array() * t;
  const RealMatrix re = v * phase.cos().matrix().asDiagonal() * v.transpose();
  const RealMatrix im = v * phase.sin().matrix().asDiagonal() * v.transpose();
  ProposalMatrix out;
  out.kind = ProposalMatrix::Kind::Quench;
  out.time = t;
  out.q = (re.cwiseAbs2() + im.cwiseAbs2()).transpose();
  return out;
}

inline ProposalMatrix proposal_quench(const ClassicalHamiltonian& h, double field, double t) {
  return proposal_quench(diagonalize_plateau(plateau_hamiltonian(h, field)), t);
}

}  // namespace qmcmc
