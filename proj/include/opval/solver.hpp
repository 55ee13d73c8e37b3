#pragma once

// Exhaustive minimizers for the five information structures of a decision
// problem: constant action under the product of marginals, constant action
// under the true joint, blind policy on X, predictive policy on X, and the
// omniscient policy on (X, Y). Every argmin breaks ties toward the smallest
// action index.

#include <cstddef>
#include <span>

#include "opval/core.hpp"

namespace opval {

struct SolvedAction {
  std::size_t action = 0;
  /// Minimum expected loss under the measure used for optimization.
  double objective_risk = 0.0;
  /// Expected loss of `action` under the problem's joint.
  double true_risk = 0.0;
};

struct SolvedPolicy {
  Policy policy;
  double true_risk = 0.0;
};

struct SolvedJointPolicy {
  JointPolicy policy;
  double true_risk = 0.0;
};

/// Index of the smallest value; first one wins on ties.
std::size_t argmin_index(std::span<const double> values);

/// Expected loss of every action under `measure`, indexed by action.
std::vector<double> expected_action_losses(const LossTensor& loss,
                                           const JointDistribution& measure);

/// argmin_u E_measure[l(X, Y, u)]. With `measure` = product of marginals
/// this is the common-sense-free action; with the true joint it is the
/// best constant action.
SolvedAction best_constant_action(const DecisionProblem& p,
                                  const JointDistribution& measure);

/// Per-x minimizer of E_{P_Y}[l(x, Y, u)], ignoring the dependence of Y on X.
SolvedPolicy best_blind_policy(const DecisionProblem& p);

/// Per-x minimizer of E[l(x, Y, u) | X = x]. The risk is accumulated as
/// sum_x P(x) min_u E[l(x, Y, u) | X = x].
SolvedPolicy best_predictive_policy(const DecisionProblem& p);

/// Pointwise minimizer of l(x, y, u).
SolvedJointPolicy best_omniscient_policy(const DecisionProblem& p);

double evaluate_risk(const DecisionProblem& p, std::size_t action);
double evaluate_risk(const DecisionProblem& p, const Policy& policy);
double evaluate_risk(const DecisionProblem& p, const JointPolicy& policy);

}  // namespace opval
