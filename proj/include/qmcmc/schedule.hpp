#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "qmcmc/error.hpp"

namespace qmcmc {

enum class RampKind { Sin2, Linear, Quench };

inline std::string_view to_string(RampKind k) {
  switch (k) {
    case RampKind::Sin2: return "sin2";
    case RampKind::Linear: return "linear";
    case RampKind::Quench: return "quench";
  }
  return "?";
}

inline RampKind parse_ramp_kind(std::string_view s) {
  if (s == "sin2") return RampKind::Sin2;
  if (s == "linear") return RampKind::Linear;
  if (s == "quench") return RampKind::Quench;
  throw ConfigError("unknown schedule '" + std::string(s) + "' (expected sin2, linear or quench)");
}

/// Three-stage transverse-field protocol: ramp up over `alpha`, hold at full
/// field for `kappa`, ramp down by time reversal. An empty `kappa` denotes the
/// large-plateau limit, in which only the ramp-up segment is ever integrated.
struct RampSchedule {
  RampKind kind = RampKind::Sin2;
  double alpha = 0.0;
  std::optional<double> kappa;

  static RampSchedule large_kappa(RampKind kind, double alpha) {
    return make(kind, alpha, std::nullopt);
  }
  static RampSchedule finite(RampKind kind, double alpha, double kappa) {
    return make(kind, alpha, kappa);
  }
  static RampSchedule quench(std::optional<double> kappa = std::nullopt) {
    return make(RampKind::Quench, 0.0, kappa);
  }

  static RampSchedule make(RampKind kind, double alpha, std::optional<double> kappa) {
    require(std::isfinite(alpha) && alpha >= 0.0, "RampSchedule: alpha must be finite and >= 0");
    require(kind != RampKind::Quench || alpha == 0.0, "RampSchedule: a quench has alpha = 0");
    if (kappa) require(std::isfinite(*kappa) && *kappa >= 0.0, "RampSchedule: kappa must be >= 0");
    return RampSchedule{kind, alpha, kappa};
  }

  bool is_large_kappa() const { return !kappa.has_value(); }

  /// 2*alpha + kappa, or +inf in the large-plateau limit.
  double duration() const {
    return kappa ? 2.0 * alpha + *kappa : std::numeric_limits<double>::infinity();
  }
};

/// Ramp-up profile on s = t / alpha in [0, 1].
inline double ramp_up_profile(RampKind kind, double s) {
  switch (kind) {
    case RampKind::Sin2: {
      const double inner = std::sin(0.5 * std::numbers::pi * s);
      const double outer = std::sin(0.5 * std::numbers::pi * inner * inner);
      return outer * outer;
    }
    case RampKind::Linear: return s;
    case RampKind::Quench: return 1.0;
  }
  return 1.0;
}

/// Field strength gamma(t) of the protocol. The ramp-down evaluates the
/// ramp-up at the distance to the end of the window, so gamma(t) and
/// gamma(T - t) go through the same arithmetic.
inline double ramp_value(const RampSchedule& s, double t) {
  const double end = s.duration();
  if (!(t >= 0.0 && t <= end))
    throw ConfigError("ramp_value: t=" + std::to_string(t) + " outside protocol window [0, " +
                      std::to_string(end) + "]");
  if (s.alpha == 0.0) return 1.0;
  const double from_end = s.kappa ? end - t : std::numeric_limits<double>::infinity();
  const double u = std::min(t, from_end);
  if (u >= s.alpha) return 1.0;
  if (u <= 0.0) return 0.0;
  return ramp_up_profile(s.kind, u / s.alpha);
}

}  // namespace qmcmc
