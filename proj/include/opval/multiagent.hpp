#pragma once

// Decision problems influenced by several agents. Agent i contributes an
// observable factor X_i; unobservable factors Y_j are listed separately so
// that a problem conditioned on some observed X_i keeps every Y_j.
//
// Table layout: the joint is a flat row-major table over
// X_1 x ... x X_m x Y_1 x ... x Y_k; the loss appends U as the last axis.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "opval/core.hpp"

namespace opval {

inline constexpr std::size_t kDefaultCellCap = 1'000'000;

class MultiAgentProblem {
 public:
  /// Validates sizes, normalizes the joint, and checks the loss is finite.
  /// `agent_ids` names each X factor (defaults to 0..m-1); conditioning
  /// keeps the ids of the agents that remain.
  MultiAgentProblem(std::vector<std::size_t> x_sizes,
                    std::vector<std::size_t> y_sizes, std::size_t u_size,
                    std::vector<double> joint, std::vector<double> loss,
                    std::vector<std::size_t> agent_ids = {},
                    std::size_t cell_cap = kDefaultCellCap);

  std::size_t agent_count() const noexcept { return x_sizes_.size(); }
  const std::vector<std::size_t>& x_sizes() const noexcept { return x_sizes_; }
  const std::vector<std::size_t>& y_sizes() const noexcept { return y_sizes_; }
  std::size_t u_size() const noexcept { return u_size_; }
  const std::vector<double>& joint() const noexcept { return joint_; }
  const std::vector<double>& loss() const noexcept { return loss_; }
  const std::vector<std::size_t>& agent_ids() const noexcept {
    return agent_ids_;
  }
  std::size_t cell_cap() const noexcept { return cell_cap_; }

  std::size_t x_cells() const noexcept { return x_cells_; }
  std::size_t y_cells() const noexcept { return y_cells_; }

  /// The single-agent view: X = X_1 x ... x X_m, Y = Y_1 x ... x Y_k.
  DecisionProblem flatten() const;

  friend bool operator==(const MultiAgentProblem&,
                         const MultiAgentProblem&) = default;

 private:
  std::vector<std::size_t> x_sizes_;
  std::vector<std::size_t> y_sizes_;
  std::size_t u_size_;
  std::vector<double> joint_;
  std::vector<double> loss_;
  std::vector<std::size_t> agent_ids_;
  std::size_t cell_cap_;
  std::size_t x_cells_ = 1;
  std::size_t y_cells_ = 1;
};

/// Best policy on the observables of the agents in `agents` (in the given
/// order, mixed radix with the first agent most significant).
struct SubsetPolicy {
  std::vector<std::size_t> agents;
  Policy policy;
  double risk = 0.0;
};

/// Risk of the best policy that observes exactly the agents in `s`. The
/// empty set yields the best constant action; the full set yields the
/// predictive policy on the flattened problem. Throws BadSubset on repeated
/// or out-of-range indices.
SubsetPolicy subset_policy_risk(const MultiAgentProblem& p,
                                const std::vector<std::size_t>& s);

/// risk(empty) - risk({i}).
double first_agent_value(const MultiAgentProblem& p, std::size_t i);

/// risk(all \ {i}) - risk(all).
double leave_one_out_value(const MultiAgentProblem& p, std::size_t i);

struct OrderingReport {
  std::vector<std::size_t> order;
  /// step_risks[0] is the best constant action's risk; step_risks[k] is the
  /// risk after the first k agents of `order` are observed.
  std::vector<double> step_risks;
  /// step_values[k-1] = step_risks[k-1] - step_risks[k].
  std::vector<double> step_values;
};

/// Adds, at each step, the agent whose inclusion gives the smallest risk;
/// ties go to the smallest agent index.
OrderingReport greedy_order(const MultiAgentProblem& p);

/// Diagnostic, not part of the greedy procedure: the ordering with the
/// smallest sum of step risks over all permutations (n <= 4 only). Ties go
/// to the lexicographically smallest permutation.
OrderingReport exhaustive_order(const MultiAgentProblem& p);

/// Conditions on X_i = x for every (i, x) in `observed` (agent indices
/// relative to `p`). The result keeps the unobserved agents' X factors and
/// every Y factor; the loss is sliced at the observed values.
MultiAgentProblem condition_on_observations(
    const MultiAgentProblem& p, const std::map<std::size_t, std::size_t>& observed);

/// A one-agent problem equivalent to `p` (X_1 = X, Y_1 = Y).
MultiAgentProblem as_multi_agent(const DecisionProblem& p);

}  // namespace opval
