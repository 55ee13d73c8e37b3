#include "opval/properties.hpp"

#include <functional>
#include <sstream>
#include <utility>

#include "opval/solver.hpp"
#include "opval/values.hpp"

namespace opval {

std::string_view to_string(Curvature c) {
  switch (c) {
    case Curvature::kConcave: return "concave";
    case Curvature::kConvex: return "convex";
    case Curvature::kLinear: return "linear";
  }
  return "unknown";
}

CouplingFamily::CouplingFamily(Distribution px, Distribution py)
    : px_(std::move(px)), py_(std::move(py)) {
  for (std::size_t x = 0; x < px_.size(); ++x) {
    if (!(px_[x] > 0.0)) {
      throw Error(ErrorCode::kZeroMarginal,
                  "coupling family needs a strictly positive P_X (entry " +
                      std::to_string(x) + " is zero)");
    }
  }
}

double CouplingFamily::membership_residual(const ConditionalKernel& k) const {
  if (k.nx() != px_.size() || k.ny() != py_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "kernel shape differs from family");
  }
  double worst = 0.0;
  for (std::size_t y = 0; y < py_.size(); ++y) {
    double col = 0.0;
    for (std::size_t x = 0; x < px_.size(); ++x) col += px_[x] * k.at(x, y);
    worst = std::max(worst, std::abs(col - py_[y]));
  }
  return worst;
}

ConditionalKernel CouplingFamily::independent_member() const {
  std::vector<double> k;
  k.reserve(px_.size() * py_.size());
  for (std::size_t x = 0; x < px_.size(); ++x) {
    k.insert(k.end(), py_.values().begin(), py_.values().end());
  }
  return ConditionalKernel(px_.size(), py_.size(), std::move(k));
}

ConditionalKernel sample_coupling(const CouplingFamily& family,
                                  std::uint64_t seed) {
  const std::size_t nx = family.px().size();
  const std::size_t ny = family.py().size();
  Rng rng(seed);
  std::vector<double> m(nx * ny);
  for (double& v : m) v = rng.exponential();

  std::vector<double> col(ny);
  double error = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < kMaxFittingSweeps; ++sweep) {
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) col[y] += m[x * ny + y];
    }
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        m[x * ny + y] *= family.py()[y] / col[y];
      }
    }
    for (std::size_t x = 0; x < nx; ++x) {
      double row = 0.0;
      for (std::size_t y = 0; y < ny; ++y) row += m[x * ny + y];
      const double scale = family.px()[x] / row;
      for (std::size_t y = 0; y < ny; ++y) m[x * ny + y] *= scale;
    }
    // Rows are exact after the last step; the column error decides.
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) col[y] += m[x * ny + y];
    }
    error = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      error = std::max(error, std::abs(col[y] - family.py()[y]));
    }
    if (error < kCouplingTolerance) break;
  }
  if (!(error < kCouplingTolerance)) {
    std::ostringstream msg;
    msg << "coupling fit stalled at column error " << error << " after "
        << kMaxFittingSweeps << " sweeps";
    throw Error(ErrorCode::kNoConvergence, msg.str());
  }
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) m[x * ny + y] /= family.px()[x];
  }
  return ConditionalKernel(nx, ny, std::move(m));
}

namespace {

struct Clause {
  const char* name;
  Curvature direction;
};

constexpr Clause kClauses[] = {
    {"L1", Curvature::kConcave},
    {"L2.1", Curvature::kConcave},
    {"L2.2", Curvature::kLinear},
    {"L3", Curvature::kLinear},
    {"L4", Curvature::kConvex},
    {"P1", Curvature::kConcave},
    {"P2.1", Curvature::kConcave},
    {"P2.2", Curvature::kLinear},
    {"P3-common-sense", Curvature::kConvex},
    {"P3-prediction", Curvature::kConvex},
};

class SuiteRunner {
 public:
  SuiteRunner(const LossTensor& loss, std::span<const double> lambdas)
      : loss_(loss), lambdas_(lambdas) {}

  // Slack of one sampled segment for clause `c`, folded into `tracker`.
  void run_trial(std::size_t c, Rng& rng, std::uint64_t trial_seed,
                 SlackTracker& tracker) const {
    const std::size_t nx = loss_.nx();
    const std::size_t ny = loss_.ny();
    // Draws are taken into named locals so the sampling order is fixed.
    switch (c) {
      case 0: {  // L1
        const JointDistribution a = sample_joint(nx, ny, rng);
        const JointDistribution b = sample_joint(nx, ny, rng);
        segment(tracker,
                [&](const JointDistribution& j) { return risk_u_star(j); }, a,
                b);
        break;
      }
      case 1:    // L2.1
      case 6: {  // P2.1
        const Distribution px = sample_simplex(nx, rng);
        const ConditionalKernel a = sample_kernel(nx, ny, rng);
        const ConditionalKernel b = sample_kernel(nx, ny, rng);
        segment(tracker,
                [&](const ConditionalKernel& k) {
                  const JointDistribution j = compose(px, k);
                  return c == 1 ? risk_predictive(j)
                                : values_of(j).communication;
                },
                a, b);
        break;
      }
      case 2:    // L2.2
      case 5:    // P1
      case 7: {  // P2.2
        const ConditionalKernel k = sample_kernel(nx, ny, rng);
        const Distribution a = sample_simplex(nx, rng);
        const Distribution b = sample_simplex(nx, rng);
        segment(tracker,
                [&](const Distribution& px) {
                  const JointDistribution j = compose(px, k);
                  if (c == 2) return risk_predictive(j);
                  const Values v = values_of(j);
                  return c == 5 ? v.perception_and_prediction
                                : v.communication;
                },
                a, b);
        break;
      }
      case 3: {  // L3
        const JointDistribution a = sample_joint(nx, ny, rng);
        const JointDistribution b = sample_joint(nx, ny, rng);
        segment(tracker,
                [&](const JointDistribution& j) { return risk_omniscient(j); },
                a, b);
        break;
      }
      case 4: {  // L4
        const Distribution q = sample_simplex(nx * ny, rng);
        const Distribution a = sample_simplex(nx * ny, rng);
        const Distribution b = sample_simplex(nx * ny, rng);
        segment(tracker,
                [&](const Distribution& p) {
                  return generalized_divergence(divergence_input(loss_, p, q));
                },
                a, b);
        break;
      }
      case 8:
      case 9: {  // P3: both endpoints are couplings of the same marginals
        const Distribution px = sample_simplex(nx, rng);
        const Distribution py = sample_simplex(ny, rng);
        const CouplingFamily family(px, py);
        const ConditionalKernel a =
            sample_coupling(family, mix_seed(trial_seed, 1));
        const ConditionalKernel b =
            sample_coupling(family, mix_seed(trial_seed, 2));
        segment(tracker,
                [&](const ConditionalKernel& k) {
                  const Values v = values_of(compose(family.px(), k));
                  return c == 8 ? v.common_sense : v.prediction;
                },
                a, b);
        break;
      }
      default:
        break;
    }
  }

 private:
  template <class T, class Fn>
  void segment(SlackTracker& tracker, Fn&& fn, const T& a,
               const T& b) const {
    const double fa = fn(a);
    const double fb = fn(b);
    for (double lambda : lambdas_) {
      tracker.add(fn(mix(a, b, lambda)) - lambda * fa - (1.0 - lambda) * fb);
    }
  }

  DecisionProblem problem(const JointDistribution& j) const {
    return DecisionProblem(j, loss_);
  }
  double risk_u_star(const JointDistribution& j) const {
    return best_constant_action(problem(j), j).true_risk;
  }
  double risk_predictive(const JointDistribution& j) const {
    return best_predictive_policy(problem(j)).true_risk;
  }
  double risk_omniscient(const JointDistribution& j) const {
    return best_omniscient_policy(problem(j)).true_risk;
  }
  Values values_of(const JointDistribution& j) const {
    return value_report(problem(j)).values;
  }

  const LossTensor& loss_;
  std::span<const double> lambdas_;
};

}  // namespace

std::vector<PropertyVerdict> run_property_suite(
    const LossTensor& loss, std::size_t trials, std::uint64_t seed,
    std::span<const double> lambdas, double tol) {
  if (trials == 0) throw Error(ErrorCode::kUsage, "trials must be >= 1");
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw Error(ErrorCode::kBadLambda, "lambda grid must lie in [0, 1]");
    }
  }
  const SuiteRunner runner(loss, lambdas);
  std::vector<PropertyVerdict> verdicts;
  for (std::size_t c = 0; c < std::size(kClauses); ++c) {
    SlackTracker tracker(kClauses[c].direction);
    PropertyVerdict v;
    v.name = kClauses[c].name;
    v.direction = kClauses[c].direction;
    v.tolerance = tol;
    v.seed = seed;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed = mix_seed(seed, c, t);
      Rng rng(trial_seed);
      try {
        runner.run_trial(c, rng, trial_seed, tracker);
        ++v.trials;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoConvergence) throw;
        ++v.no_convergence;
      }
    }
    v.worst_slack = tracker.worst();
    v.pass = tracker.within(tol);
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

}  // namespace opval
