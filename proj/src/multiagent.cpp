#include "opval/multiagent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "opval/solver.hpp"

namespace opval {

namespace {

std::size_t checked_product(const std::vector<std::size_t>& sizes,
                            std::size_t start, std::size_t cap,
                            const char* what) {
  std::size_t total = start;
  for (std::size_t s : sizes) {
    if (s == 0) {
      throw Error(ErrorCode::kShapeMismatch,
                  std::string(what) + ": every factor needs size >= 1");
    }
    if (total > cap / s) {
      throw Error(ErrorCode::kCapExceeded,
                  "problem exceeds the cell cap of " + std::to_string(cap));
    }
    total *= s;
  }
  return total;
}

// Mixed-radix digits of every flat X index, first factor most significant.
std::vector<std::vector<std::size_t>> x_digits(
    const std::vector<std::size_t>& sizes, std::size_t cells) {
  std::vector<std::vector<std::size_t>> digits(cells,
                                               std::vector<std::size_t>(sizes.size()));
  for (std::size_t flat = 0; flat < cells; ++flat) {
    std::size_t rest = flat;
    for (std::size_t i = sizes.size(); i-- > 0;) {
      digits[flat][i] = rest % sizes[i];
      rest /= sizes[i];
    }
  }
  return digits;
}

void check_agent(const MultiAgentProblem& p, std::size_t i) {
  if (i >= p.agent_count()) {
    throw Error(ErrorCode::kBadAgent,
                "agent " + std::to_string(i) + " outside 0.." +
                    std::to_string(p.agent_count()) + "-1");
  }
}

std::vector<std::size_t> all_agents(const MultiAgentProblem& p) {
  std::vector<std::size_t> s(p.agent_count());
  std::iota(s.begin(), s.end(), 0);
  return s;
}

double risk_of(const MultiAgentProblem& p, const std::vector<std::size_t>& s) {
  return subset_policy_risk(p, s).risk;
}

OrderingReport trace_order(const MultiAgentProblem& p,
                           const std::vector<std::size_t>& order) {
  OrderingReport r;
  r.order = order;
  std::vector<std::size_t> prefix;
  r.step_risks.push_back(risk_of(p, prefix));
  for (std::size_t i : order) {
    prefix.push_back(i);
    r.step_risks.push_back(risk_of(p, prefix));
    r.step_values.push_back(r.step_risks[r.step_risks.size() - 2] -
                            r.step_risks.back());
  }
  return r;
}

}  // namespace

MultiAgentProblem::MultiAgentProblem(std::vector<std::size_t> x_sizes,
                                     std::vector<std::size_t> y_sizes,
                                     std::size_t u_size,
                                     std::vector<double> joint,
                                     std::vector<double> loss,
                                     std::vector<std::size_t> agent_ids,
                                     std::size_t cell_cap)
    : x_sizes_(std::move(x_sizes)),
      y_sizes_(std::move(y_sizes)),
      u_size_(u_size),
      joint_(std::move(joint)),
      loss_(std::move(loss)),
      agent_ids_(std::move(agent_ids)),
      cell_cap_(cell_cap) {
  if (u_size_ == 0) throw Error(ErrorCode::kShapeMismatch, "u_size must be >= 1");
  x_cells_ = checked_product(x_sizes_, 1, cell_cap_, "x_sizes");
  y_cells_ = checked_product(y_sizes_, 1, cell_cap_, "y_sizes");
  checked_product({x_cells_, y_cells_, u_size_}, 1, cell_cap_, "problem");

  if (agent_ids_.empty()) {
    agent_ids_.resize(x_sizes_.size());
    std::iota(agent_ids_.begin(), agent_ids_.end(), 0);
  } else if (agent_ids_.size() != x_sizes_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "agent id count differs from x_sizes");
  }

  if (joint_.size() != x_cells_ * y_cells_) {
    throw Error(ErrorCode::kShapeMismatch,
                "joint has " + std::to_string(joint_.size()) +
                    " entries, expected " + std::to_string(x_cells_ * y_cells_));
  }
  if (loss_.size() != x_cells_ * y_cells_ * u_size_) {
    throw Error(ErrorCode::kShapeMismatch,
                "loss has " + std::to_string(loss_.size()) +
                    " entries, expected " +
                    std::to_string(x_cells_ * y_cells_ * u_size_));
  }
  // The single-agent constructors carry the validation rules.
  const JointDistribution normalized(x_cells_, y_cells_, joint_);
  joint_.assign(normalized.values().begin(), normalized.values().end());
  LossTensor(x_cells_, y_cells_, u_size_, loss_);
}

DecisionProblem MultiAgentProblem::flatten() const {
  return DecisionProblem(JointDistribution(x_cells_, y_cells_, joint_),
                         LossTensor(x_cells_, y_cells_, u_size_, loss_));
}

SubsetPolicy subset_policy_risk(const MultiAgentProblem& p,
                                const std::vector<std::size_t>& s) {
  const std::size_t n = p.agent_count();
  std::vector<bool> observed(n, false);
  for (std::size_t i : s) {
    if (i >= n || observed[i]) {
      throw Error(ErrorCode::kBadSubset,
                  "agent set must list distinct indices below " +
                      std::to_string(n));
    }
    observed[i] = true;
  }

  // Re-split the problem: X' = observed factors (in the order of `s`),
  // Y' = unobserved X factors (ascending) followed by all Y factors.
  std::size_t nx = 1;
  for (std::size_t i : s) nx *= p.x_sizes()[i];
  const std::size_t hidden_x = p.x_cells() / nx;
  const std::size_t ny = hidden_x * p.y_cells();
  const std::size_t nu = p.u_size();

  const auto digits = x_digits(p.x_sizes(), p.x_cells());
  std::vector<double> joint(nx * ny);
  std::vector<double> loss(nx * ny * nu);
  for (std::size_t flat_x = 0; flat_x < p.x_cells(); ++flat_x) {
    std::size_t xo = 0;
    for (std::size_t i : s) xo = xo * p.x_sizes()[i] + digits[flat_x][i];
    std::size_t xh = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!observed[i]) xh = xh * p.x_sizes()[i] + digits[flat_x][i];
    }
    for (std::size_t y = 0; y < p.y_cells(); ++y) {
      const std::size_t src = flat_x * p.y_cells() + y;
      const std::size_t dst = xo * ny + xh * p.y_cells() + y;
      joint[dst] = p.joint()[src];
      std::copy_n(p.loss().begin() + static_cast<std::ptrdiff_t>(src * nu), nu,
                  loss.begin() + static_cast<std::ptrdiff_t>(dst * nu));
    }
  }
  const DecisionProblem view(JointDistribution(nx, ny, std::move(joint)),
                             LossTensor(nx, ny, nu, std::move(loss)));
  SolvedPolicy solved = best_predictive_policy(view);
  return SubsetPolicy{s, std::move(solved.policy), solved.true_risk};
}

double first_agent_value(const MultiAgentProblem& p, std::size_t i) {
  check_agent(p, i);
  return risk_of(p, {}) - risk_of(p, {i});
}

double leave_one_out_value(const MultiAgentProblem& p, std::size_t i) {
  check_agent(p, i);
  const std::vector<std::size_t> all = all_agents(p);
  std::vector<std::size_t> rest;
  for (std::size_t j : all) {
    if (j != i) rest.push_back(j);
  }
  return risk_of(p, rest) - risk_of(p, all);
}

OrderingReport greedy_order(const MultiAgentProblem& p) {
  const std::size_t n = p.agent_count();
  OrderingReport r;
  std::vector<bool> used(n, false);
  r.step_risks.push_back(risk_of(p, {}));
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    double best_risk = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> candidate = r.order;
    candidate.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      candidate.back() = i;
      const double risk = risk_of(p, candidate);
      if (best == n || risk < best_risk) {
        best = i;
        best_risk = risk;
      }
    }
    used[best] = true;
    r.order.push_back(best);
    r.step_values.push_back(r.step_risks.back() - best_risk);
    r.step_risks.push_back(best_risk);
  }
  return r;
}

OrderingReport exhaustive_order(const MultiAgentProblem& p) {
  if (p.agent_count() > 4) {
    throw Error(ErrorCode::kCapExceeded,
                "exhaustive ordering is limited to 4 agents");
  }
  std::vector<std::size_t> perm = all_agents(p);
  OrderingReport best = trace_order(p, perm);
  auto area = [](const OrderingReport& r) {
    return std::accumulate(r.step_risks.begin() + 1, r.step_risks.end(), 0.0);
  };
  double best_area = area(best);
  while (std::next_permutation(perm.begin(), perm.end())) {
    OrderingReport r = trace_order(p, perm);
    const double a = area(r);
    if (a < best_area) {
      best_area = a;
      best = std::move(r);
    }
  }
  return best;
}

MultiAgentProblem condition_on_observations(
    const MultiAgentProblem& p,
    const std::map<std::size_t, std::size_t>& observed) {
  if (observed.empty()) return p;
  for (const auto& [agent, value] : observed) {
    check_agent(p, agent);
    if (value >= p.x_sizes()[agent]) {
      throw Error(ErrorCode::kBadAgent,
                  "observed value " + std::to_string(value) + " for agent " +
                      std::to_string(agent) + " outside its space");
    }
  }

  std::vector<std::size_t> x_sizes;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < p.agent_count(); ++i) {
    if (!observed.contains(i)) {
      x_sizes.push_back(p.x_sizes()[i]);
      ids.push_back(p.agent_ids()[i]);
    }
  }

  // Matching cells, visited in storage order, are already in the reduced
  // problem's row-major order.
  const auto digits = x_digits(p.x_sizes(), p.x_cells());
  const std::size_t nu = p.u_size();
  std::vector<double> joint;
  std::vector<double> loss;
  double event = 0.0;
  for (std::size_t flat_x = 0; flat_x < p.x_cells(); ++flat_x) {
    const bool match = std::all_of(
        observed.begin(), observed.end(),
        [&](const auto& kv) { return digits[flat_x][kv.first] == kv.second; });
    if (!match) continue;
    for (std::size_t y = 0; y < p.y_cells(); ++y) {
      const std::size_t src = flat_x * p.y_cells() + y;
      joint.push_back(p.joint()[src]);
      event += p.joint()[src];
      loss.insert(loss.end(),
                  p.loss().begin() + static_cast<std::ptrdiff_t>(src * nu),
                  p.loss().begin() + static_cast<std::ptrdiff_t>((src + 1) * nu));
    }
  }
  if (!(event > 0.0)) {
    throw Error(ErrorCode::kZeroProbabilityEvent,
                "the observed event has probability zero");
  }
  for (double& v : joint) v /= event;
  return MultiAgentProblem(std::move(x_sizes), p.y_sizes(), nu,
                           std::move(joint), std::move(loss), std::move(ids),
                           p.cell_cap());
}

MultiAgentProblem as_multi_agent(const DecisionProblem& p) {
  const auto j = p.joint().values();
  const auto l = p.loss().values();
  return MultiAgentProblem({p.nx()}, {p.ny()}, p.nu(), {j.begin(), j.end()},
                           {l.begin(), l.end()});
}

}  // namespace opval
