#include "opval/solver.hpp"

#include <algorithm>
#include <string>

namespace opval {

namespace {

void check_measure(const DecisionProblem& p, const JointDistribution& m) {
  if (m.nx() != p.nx() || m.ny() != p.ny()) {
    throw Error(ErrorCode::kShapeMismatch,
                "measure shape does not match the problem");
  }
}

void check_action(const DecisionProblem& p, std::size_t u) {
  if (u >= p.nu()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "action " + std::to_string(u) + " outside U (|U| = " +
                    std::to_string(p.nu()) + ")");
  }
}

}  // namespace

std::size_t argmin_index(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

std::vector<double> expected_action_losses(const LossTensor& loss,
                                           const JointDistribution& measure) {
  std::vector<double> acc(loss.nu(), 0.0);
  for (std::size_t x = 0; x < loss.nx(); ++x) {
    for (std::size_t y = 0; y < loss.ny(); ++y) {
      const double w = measure.at(x, y);
      const auto col = loss.actions(x, y);
      for (std::size_t u = 0; u < loss.nu(); ++u) acc[u] += w * col[u];
    }
  }
  return acc;
}

SolvedAction best_constant_action(const DecisionProblem& p,
                                  const JointDistribution& measure) {
  check_measure(p, measure);
  const std::vector<double> objective =
      expected_action_losses(p.loss(), measure);
  SolvedAction out;
  out.action = argmin_index(objective);
  out.objective_risk = objective[out.action];
  out.true_risk = evaluate_risk(p, out.action);
  return out;
}

SolvedPolicy best_blind_policy(const DecisionProblem& p) {
  const Distribution py = marginals(p.joint()).py;
  const LossTensor& loss = p.loss();
  SolvedPolicy out;
  out.policy.map.resize(p.nx());
  std::vector<double> objective(p.nu());
  for (std::size_t x = 0; x < p.nx(); ++x) {
    std::fill(objective.begin(), objective.end(), 0.0);
    for (std::size_t y = 0; y < p.ny(); ++y) {
      const auto col = loss.actions(x, y);
      for (std::size_t u = 0; u < p.nu(); ++u) objective[u] += py[y] * col[u];
    }
    out.policy.map[x] = argmin_index(objective);
  }
  out.true_risk = evaluate_risk(p, out.policy);
  return out;
}

SolvedPolicy best_predictive_policy(const DecisionProblem& p) {
  const Distribution px = marginals(p.joint()).px;
  const ConditionalKernel k = conditional_kernel(p.joint());
  const LossTensor& loss = p.loss();
  SolvedPolicy out;
  out.policy.map.resize(p.nx());
  std::vector<double> conditional(p.nu());
  double risk = 0.0;
  for (std::size_t x = 0; x < p.nx(); ++x) {
    std::fill(conditional.begin(), conditional.end(), 0.0);
    for (std::size_t y = 0; y < p.ny(); ++y) {
      const auto col = loss.actions(x, y);
      for (std::size_t u = 0; u < p.nu(); ++u) {
        conditional[u] += k.at(x, y) * col[u];
      }
    }
    const std::size_t best = argmin_index(conditional);
    out.policy.map[x] = best;
    risk += px[x] * conditional[best];
  }
  out.true_risk = risk;
  return out;
}

SolvedJointPolicy best_omniscient_policy(const DecisionProblem& p) {
  SolvedJointPolicy out;
  out.policy.nx = p.nx();
  out.policy.ny = p.ny();
  out.policy.map.resize(p.nx() * p.ny());
  for (std::size_t x = 0; x < p.nx(); ++x) {
    for (std::size_t y = 0; y < p.ny(); ++y) {
      out.policy.map[x * p.ny() + y] = argmin_index(p.loss().actions(x, y));
    }
  }
  out.true_risk = evaluate_risk(p, out.policy);
  return out;
}

double evaluate_risk(const DecisionProblem& p, std::size_t action) {
  check_action(p, action);
  double risk = 0.0;
  for (std::size_t x = 0; x < p.nx(); ++x) {
    for (std::size_t y = 0; y < p.ny(); ++y) {
      risk += p.joint().at(x, y) * p.loss().at(x, y, action);
    }
  }
  return risk;
}

double evaluate_risk(const DecisionProblem& p, const Policy& policy) {
  if (policy.map.size() != p.nx()) {
    throw Error(ErrorCode::kIndexOutOfRange, "policy length differs from |X|");
  }
  for (std::size_t u : policy.map) check_action(p, u);
  double risk = 0.0;
  for (std::size_t x = 0; x < p.nx(); ++x) {
    for (std::size_t y = 0; y < p.ny(); ++y) {
      risk += p.joint().at(x, y) * p.loss().at(x, y, policy(x));
    }
  }
  return risk;
}

double evaluate_risk(const DecisionProblem& p, const JointPolicy& policy) {
  if (policy.nx != p.nx() || policy.ny != p.ny() ||
      policy.map.size() != p.nx() * p.ny()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "joint policy shape differs from |X| x |Y|");
  }
  for (std::size_t u : policy.map) check_action(p, u);
  double risk = 0.0;
  for (std::size_t x = 0; x < p.nx(); ++x) {
    for (std::size_t y = 0; y < p.ny(); ++y) {
      risk += p.joint().at(x, y) * p.loss().at(x, y, policy(x, y));
    }
  }
  return risk;
}

}  // namespace opval
