#pragma once

// Numerical verification of the curvature properties of risks and values:
// sample endpoints, walk the segment between them, and measure the Jensen
// slack f(mix) - lambda f(a) - (1 - lambda) f(b) at interior points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "opval/core.hpp"
#include "opval/sampling.hpp"

namespace opval {

enum class Curvature { kConcave, kConvex, kLinear };

std::string_view to_string(Curvature c);

inline constexpr double kPropertyTolerance = 1e-9;
inline constexpr double kDefaultLambdas[] = {0.25, 0.5, 0.75};

/// Outcome of one property clause over all sampled segments.
///
/// `worst_slack` is oriented by direction: the minimum slack for concave
/// clauses, the maximum slack for convex clauses, and the maximum absolute
/// slack for linear clauses.
struct PropertyVerdict {
  std::string name;
  Curvature direction = Curvature::kLinear;
  std::size_t trials = 0;
  std::size_t no_convergence = 0;
  double worst_slack = 0.0;
  double tolerance = kPropertyTolerance;
  bool pass = true;
  std::uint64_t seed = 0;
};

/// Folds segment slacks into a verdict.
class SlackTracker {
 public:
  explicit SlackTracker(Curvature direction) : direction_(direction) {}

  void add(double slack) {
    any_ = true;
    switch (direction_) {
      case Curvature::kConcave: worst_ = std::min(worst_, slack); break;
      case Curvature::kConvex: worst_ = std::max(worst_, slack); break;
      case Curvature::kLinear: worst_ = std::max(worst_, std::abs(slack)); break;
    }
  }

  double worst() const { return any_ ? worst_ : 0.0; }

  bool within(double tol) const {
    const double w = worst();
    switch (direction_) {
      case Curvature::kConcave: return w >= -tol;
      case Curvature::kConvex: return w <= tol;
      case Curvature::kLinear: return w <= tol;
    }
    return false;
  }

 private:
  Curvature direction_;
  bool any_ = false;
  double worst_ = direction_ == Curvature::kConcave
                      ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
};

/// Jensen slack of `fn` on the segment from `b` (lambda = 0) to `a`
/// (lambda = 1). T must support mix(a, b, lambda).
template <class T, class Fn>
PropertyVerdict check_segment(std::string name, Fn&& fn, const T& a,
                              const T& b, Curvature direction,
                              std::span<const double> lambdas,
                              double tol = kPropertyTolerance) {
  const double fa = fn(a);
  const double fb = fn(b);
  SlackTracker tracker(direction);
  for (double lambda : lambdas) {
    const double f_mix = fn(mix(a, b, lambda));
    tracker.add(f_mix - lambda * fa - (1.0 - lambda) * fb);
  }
  PropertyVerdict v;
  v.name = std::move(name);
  v.direction = direction;
  v.trials = 1;
  v.worst_slack = tracker.worst();
  v.tolerance = tol;
  v.pass = tracker.within(tol);
  return v;
}

/// Conditional kernels P(y | x) that reproduce a fixed pair of marginals:
/// sum_x px(x) k(x, y) = py(y). The set is convex.
class CouplingFamily {
 public:
  /// Throws ZeroMarginal if some px(x) is zero.
  CouplingFamily(Distribution px, Distribution py);

  const Distribution& px() const noexcept { return px_; }
  const Distribution& py() const noexcept { return py_; }

  /// max_y |sum_x px(x) k(x, y) - py(y)|.
  double membership_residual(const ConditionalKernel& k) const;
  bool contains(const ConditionalKernel& k, double tol = 1e-9) const {
    return membership_residual(k) <= tol;
  }
  /// k(x, .) = py for every x.
  ConditionalKernel independent_member() const;

 private:
  Distribution px_;
  Distribution py_;
};

inline constexpr double kCouplingTolerance = 1e-12;
inline constexpr std::size_t kMaxFittingSweeps = 10000;

/// Interior member of the family: a random positive matrix is fitted to the
/// marginals by alternating row and column scaling, then its rows are
/// divided by px. Throws NoConvergence if the column error stays above
/// 1e-12 after 10000 sweeps.
ConditionalKernel sample_coupling(const CouplingFamily& family,
                                  std::uint64_t seed);

/// Runs the ten curvature clauses on distributions sampled around `loss`:
///   L1     risk of the best constant action, concave in P_XY
///   L2.1   risk of the predictive policy, concave in P_{Y|X} (P_X fixed)
///   L2.2   risk of the predictive policy, linear in P_X (P_{Y|X} fixed)
///   L3     risk of the omniscient policy, linear in P_XY
///   L4     generalized divergence D(P, Q), convex in P (Q fixed)
///   P1     perception-and-prediction value, concave in P_X
///   P2.1   communication value, concave in P_{Y|X}
///   P2.2   communication value, linear in P_X
///   P3-common-sense, P3-prediction
///          convex in P_{Y|X} over couplings of fixed (P_X, P_Y)
/// Every verdict is reproducible from (loss, trials, seed).
std::vector<PropertyVerdict> run_property_suite(
    const LossTensor& loss, std::size_t trials, std::uint64_t seed,
    std::span<const double> lambdas = kDefaultLambdas,
    double tol = kPropertyTolerance);

}  // namespace opval
