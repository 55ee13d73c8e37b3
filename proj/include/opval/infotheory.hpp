#pragma once

// Log-loss specialization: actions are joint distributions u on X x Y and
// l(x, y, u) = -log u(x, y). Under this loss the five risks become
// H(X) + H(Y), H(X, Y), H(Y), H(Y | X) and 0, and the five values become
// I(X; Y), H(X | Y), I(X; Y), H(X) and H(Y | X).

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "opval/core.hpp"

namespace opval {

enum class LogBase { kNats, kBits };

struct ShannonMeasures {
  LogBase base = LogBase::kNats;
  double hx = 0.0;
  double hy = 0.0;
  double hxy = 0.0;
  double hy_given_x = 0.0;
  double hx_given_y = 0.0;
  double mi = 0.0;
};

/// Entropies with 0 log 0 = 0. Conditional entropies weight each row by its
/// marginal, so zero-probability rows contribute nothing.
ShannonMeasures shannon_measures(const JointDistribution& d,
                                 LogBase base = LogBase::kNats);

struct IdentityCheck {
  std::string name;
  double computed = 0.0;  // plug-in evaluation of the closed-form optimizer
  double expected = 0.0;  // Shannon measure
  double difference = 0.0;
};

struct LogLossCheck {
  std::array<IdentityCheck, 5> risks;
  std::array<IdentityCheck, 5> values;
  double max_difference = 0.0;
  /// Smallest (candidate objective - optimizer objective) over all random
  /// candidates; negative means a candidate beat a closed-form optimizer.
  double worst_optimality_margin = 0.0;
  std::size_t candidates = 0;
  bool pass = false;
};

inline constexpr double kLogLossIdentityTolerance = 1e-9;

/// Evaluates the closed-form log-loss optimizers on `d` and compares every
/// risk and value with its Shannon counterpart. Each optimizer is also
/// spot-checked against `candidates` seeded random alternatives.
/// Throws ZeroSupport unless every joint entry is positive.
LogLossCheck log_loss_realization_check(const JointDistribution& d,
                                        std::uint64_t seed = 0,
                                        std::size_t candidates = 64,
                                        LogBase base = LogBase::kNats);

}  // namespace opval
