#include <gtest/gtest.h>

#include <numeric>

#include "opval/multiagent.hpp"
#include "opval/solver.hpp"
#include "opval/values.hpp"
#include "oracle.hpp"

namespace opval {
namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kUsage;
}

// Agent 0 carries the worked example's X; agent 1 is an independent fair coin
// that does not enter the loss.
MultiAgentProblem worked_with_dummy() {
  const DecisionProblem w = oracle::worked_example();
  std::vector<double> joint, loss;
  for (std::size_t x0 = 0; x0 < 2; ++x0)
    for (std::size_t x1 = 0; x1 < 2; ++x1)
      for (std::size_t y = 0; y < 2; ++y) {
        joint.push_back(0.5 * w.joint().at(x0, y));
        for (std::size_t u = 0; u < 2; ++u) loss.push_back(w.loss().at(x0, y, u));
      }
  return MultiAgentProblem({2, 2}, {2}, 2, joint, loss);
}

TEST(MultiAgentProblem, ValidationErrors) {
  EXPECT_EQ(code_of([] { MultiAgentProblem({2, 2}, {2}, 2, std::vector<double>(7, 0.125),
                                           std::vector<double>(16, 0.0)); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([] { MultiAgentProblem({2, 0}, {2}, 2, {}, {}); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([] {
              MultiAgentProblem({1000, 1000}, {10}, 2, {}, {});
            }),
            ErrorCode::kCapExceeded);
  EXPECT_EQ(code_of([] { MultiAgentProblem({2}, {2}, 1, {0.5, 0.5, 0.5, 0.5}, {0, 0, 0, 0}); }),
            ErrorCode::kBadProbability);
}

TEST(SubsetPolicyRisk, EmptyIsConstantAndFullIsPredictive) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const MultiAgentProblem p = oracle::random_multi({2, 3}, {2}, 3, rng);
    const DecisionProblem flat = p.flatten();
    EXPECT_EQ(subset_policy_risk(p, {}).risk, best_constant_action(flat, flat.joint()).true_risk);
    EXPECT_NEAR(subset_policy_risk(p, {0, 1}).risk, best_predictive_policy(flat).true_risk,
                1e-12);
  }
}

TEST(SubsetPolicyRisk, MatchesPolicyEnumeration) {
  Rng rng(2);
  const std::vector<std::vector<std::size_t>> subsets{{}, {0}, {1}, {0, 1}, {1, 0}};
  for (int t = 0; t < 50; ++t) {
    const MultiAgentProblem p = oracle::random_multi({2, 2}, {2, 2}, 3, rng);
    for (const auto& s : subsets) {
      const double r = subset_policy_risk(p, s).risk;
      ASSERT_NEAR(r, oracle::subset_risk_by_policies(p, s), 1e-12);
      ASSERT_NEAR(r, oracle::subset_risk(p, s), 1e-12);
    }
  }
}

TEST(SubsetPolicyRisk, ThreeAgentsMatchAccumulation) {
  Rng rng(3);
  const std::vector<std::vector<std::size_t>> subsets{{},     {0},    {1},    {2},      {0, 1},
                                                      {0, 2}, {1, 2}, {2, 0}, {0, 1, 2}};
  for (int t = 0; t < 50; ++t) {
    const MultiAgentProblem p = oracle::random_multi({2, 3, 2}, {3}, 4, rng);
    for (const auto& s : subsets)
      ASSERT_NEAR(subset_policy_risk(p, s).risk, oracle::subset_risk(p, s), 1e-12);
  }
}

TEST(SubsetPolicyRisk, PolicyIsIndexedInSubsetOrder) {
  Rng rng(4);
  const MultiAgentProblem p = oracle::random_multi({2, 3}, {2}, 3, rng);
  const SubsetPolicy s = subset_policy_risk(p, {1, 0});
  EXPECT_EQ(s.agents, (std::vector<std::size_t>{1, 0}));
  ASSERT_EQ(s.policy.map.size(), 6u);
  // Re-evaluate the policy directly on the flat tables.
  double r = 0;
  for (std::size_t x0 = 0; x0 < 2; ++x0)
    for (std::size_t x1 = 0; x1 < 3; ++x1)
      for (std::size_t y = 0; y < 2; ++y) {
        const std::size_t cell = (x0 * 3 + x1) * 2 + y;
        r += p.joint()[cell] * p.loss()[cell * 3 + s.policy(x1 * 2 + x0)];
      }
  EXPECT_NEAR(r, s.risk, 1e-12);
}

TEST(SubsetPolicyRisk, BadSubset) {
  Rng rng(5);
  const MultiAgentProblem p = oracle::random_multi({2, 2}, {2}, 2, rng);
  EXPECT_EQ(code_of([&] { subset_policy_risk(p, {0, 0}); }), ErrorCode::kBadSubset);
  EXPECT_EQ(code_of([&] { subset_policy_risk(p, {2}); }), ErrorCode::kBadSubset);
}

TEST(AgentValues, DummyAgentIsWorthNothing) {
  const MultiAgentProblem p = worked_with_dummy();
  EXPECT_NEAR(first_agent_value(p, 1), 0.0, 1e-15);
  EXPECT_NEAR(leave_one_out_value(p, 1), 0.0, 1e-15);
  // Agent 0 alone reproduces the worked example: u* and predictive both at 0.
  EXPECT_NEAR(first_agent_value(p, 0), 0.0, 1e-12);
}

TEST(AgentValues, RedundantCopyHasNoLeaveOneOutValue) {
  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    const DecisionProblem base = oracle::random_problem(3, 2, 3, rng);
    // X_1 is an exact copy of X_0.
    std::vector<double> joint, loss;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t y = 0; y < 2; ++y) {
          joint.push_back(a == b ? base.joint().at(a, y) : 0.0);
          for (std::size_t u = 0; u < 3; ++u) loss.push_back(base.loss().at(a, y, u));
        }
    const MultiAgentProblem p({3, 3}, {2}, 3, joint, loss);
    ASSERT_NEAR(leave_one_out_value(p, 0), 0.0, 1e-12);
    ASSERT_NEAR(leave_one_out_value(p, 1), 0.0, 1e-12);
    ASSERT_NEAR(first_agent_value(p, 0), first_agent_value(p, 1), 1e-12);
  }
}

TEST(AgentValues, SingleAgentFirstEqualsLeaveOneOut) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const MultiAgentProblem p = as_multi_agent(oracle::random_problem(3, 3, 3, rng));
    ASSERT_EQ(first_agent_value(p, 0), leave_one_out_value(p, 0));
  }
}

TEST(AgentValues, BadAgent) {
  const MultiAgentProblem p = worked_with_dummy();
  EXPECT_EQ(code_of([&] { first_agent_value(p, 2); }), ErrorCode::kBadAgent);
  EXPECT_EQ(code_of([&] { leave_one_out_value(p, 5); }), ErrorCode::kBadAgent);
}

TEST(AgentValues, SingleAgentMatchesValueReport) {
  Rng rng(8);
  std::vector<DecisionProblem> problems{oracle::worked_example()};
  for (int t = 0; t < 200; ++t)
    problems.push_back(
        oracle::random_problem(1 + rng.index(4), 1 + rng.index(4), 1 + rng.index(4), rng));
  for (const DecisionProblem& d : problems) {
    const ValueReport r = value_report(d);
    const MultiAgentProblem p = as_multi_agent(d);
    ASSERT_EQ(subset_policy_risk(p, {}).risk, r.risks.u_star);
    ASSERT_EQ(subset_policy_risk(p, {0}).risk, r.risks.predictive);
    ASSERT_EQ(subset_policy_risk(p, {0}).policy, r.predictive.policy);
    ASSERT_EQ(first_agent_value(p, 0), r.risks.u_star - r.risks.predictive);
    ASSERT_NEAR(first_agent_value(p, 0), r.values.perception_and_prediction, 1e-15);
  }
}

TEST(GreedyOrder, StepsAreArgminsAndDecrease) {
  Rng rng(9);
  for (int t = 0; t < 40; ++t) {
    const MultiAgentProblem p = oracle::random_multi({2, 2, 3}, {2}, 3, rng);
    const OrderingReport o = greedy_order(p);
    ASSERT_EQ(o.order.size(), 3u);
    ASSERT_EQ(o.step_risks.size(), 4u);
    ASSERT_EQ(o.step_values.size(), 3u);
    std::vector<std::size_t> sorted = o.order;
    std::sort(sorted.begin(), sorted.end());
    ASSERT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2}));
    std::vector<std::size_t> prefix;
    for (std::size_t k = 0; k < 3; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < 3; ++i) {
        if (std::find(prefix.begin(), prefix.end(), i) != prefix.end()) continue;
        auto s = prefix;
        s.push_back(i);
        best = std::min(best, oracle::subset_risk(p, s));
      }
      prefix.push_back(o.order[k]);
      ASSERT_NEAR(o.step_risks[k + 1], best, 1e-12);
      ASSERT_LE(o.step_risks[k + 1], o.step_risks[k] + 1e-12);
      ASSERT_EQ(o.step_values[k], o.step_risks[k] - o.step_risks[k + 1]);
    }
  }
}

TEST(GreedyOrder, ExchangeableAgentsTieToSmallestIndex) {
  // Y = X_0 xor X_1 with uniform inputs: no single agent helps, so every
  // choice ties and the order is 0, 1.
  std::vector<double> joint, loss;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t y = 0; y < 2; ++y) {
        joint.push_back(y == (a ^ b) ? 0.25 : 0.0);
        for (std::size_t u = 0; u < 2; ++u) loss.push_back(u == y ? 0.0 : 1.0);
      }
  const MultiAgentProblem p({2, 2}, {2}, 2, joint, loss);
  const OrderingReport o = greedy_order(p);
  EXPECT_EQ(o.order, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(o.step_values[0], 0.0);
  EXPECT_EQ(o.step_values[1], 0.5);
}

TEST(GreedyOrder, DummyAgentComesLast) {
  const OrderingReport o = greedy_order(worked_with_dummy());
  // Agent 0 has value 0 at the first step too; the tie goes to index 0.
  EXPECT_EQ(o.order, (std::vector<std::size_t>{0, 1}));
}

TEST(ExhaustiveOrder, NeverWorseThanGreedyInTotal) {
  Rng rng(10);
  for (int t = 0; t < 30; ++t) {
    const MultiAgentProblem p = oracle::random_multi({2, 2, 2}, {3}, 3, rng);
    const OrderingReport g = greedy_order(p);
    const OrderingReport e = exhaustive_order(p);
    const double sg = std::accumulate(g.step_risks.begin(), g.step_risks.end(), 0.0);
    const double se = std::accumulate(e.step_risks.begin(), e.step_risks.end(), 0.0);
    ASSERT_LE(se, sg + 1e-12);
    ASSERT_EQ(e.step_risks.front(), g.step_risks.front());
    ASSERT_NEAR(e.step_risks.back(), g.step_risks.back(), 1e-12);
  }
}

TEST(ExhaustiveOrder, CapAtFourAgents) {
  Rng rng(11);
  const MultiAgentProblem p = oracle::random_multi({2, 2, 2, 2, 2}, {}, 2, rng);
  EXPECT_EQ(code_of([&] { exhaustive_order(p); }), ErrorCode::kCapExceeded);
}

TEST(Conditioning, EmptyObservationIsIdentity) {
  Rng rng(12);
  const MultiAgentProblem p = oracle::random_multi({2, 3}, {2}, 2, rng);
  EXPECT_EQ(condition_on_observations(p, {}), p);
}

TEST(Conditioning, SlicesAndRenormalizes) {
  Rng rng(13);
  const MultiAgentProblem p = oracle::random_multi({2, 3}, {2}, 2, rng);
  const MultiAgentProblem c = condition_on_observations(p, {{0, 1}});
  EXPECT_EQ(c.x_sizes(), (std::vector<std::size_t>{3}));
  EXPECT_EQ(c.y_sizes(), (std::vector<std::size_t>{2}));
  EXPECT_EQ(c.agent_ids(), (std::vector<std::size_t>{1}));
  double mass = 0;
  for (std::size_t i = 6; i < 12; ++i) mass += p.joint()[i];
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(c.joint()[i], p.joint()[6 + i] / mass, 1e-12);
    for (std::size_t u = 0; u < 2; ++u)
      EXPECT_EQ(c.loss()[i * 2 + u], p.loss()[(6 + i) * 2 + u]);
  }
}

TEST(Conditioning, ObserveEveryAgent) {
  Rng rng(14);
  const MultiAgentProblem p = oracle::random_multi({2, 2}, {3}, 2, rng);
  const MultiAgentProblem c = condition_on_observations(p, {{0, 1}, {1, 0}});
  EXPECT_EQ(c.agent_count(), 0u);
  EXPECT_EQ(c.x_cells(), 1u);
  EXPECT_EQ(c.y_cells(), 3u);
  EXPECT_EQ(subset_policy_risk(c, {}).risk, greedy_order(c).step_risks[0]);
}

TEST(Conditioning, Errors) {
  const MultiAgentProblem p(
      {2}, {2}, 1, {0.5, 0.5, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0});
  EXPECT_EQ(code_of([&] { condition_on_observations(p, {{1, 0}}); }), ErrorCode::kBadAgent);
  EXPECT_EQ(code_of([&] { condition_on_observations(p, {{0, 2}}); }), ErrorCode::kBadAgent);
  EXPECT_EQ(code_of([&] { condition_on_observations(p, {{0, 1}}); }),
            ErrorCode::kZeroProbabilityEvent);
}

TEST(Conditioning, AveragedConditionalRiskMatchesSubsetRisk) {
  // Observing agent 0 and then acting optimally on the rest equals the
  // unconditioned subset risk with agent 0 prepended.
  Rng rng(15);
  for (int t = 0; t < 30; ++t) {
    const MultiAgentProblem p = oracle::random_multi({3, 2}, {2}, 3, rng);
    double mass[3] = {0, 0, 0};
    for (std::size_t i = 0; i < p.joint().size(); ++i) mass[i / 4] += p.joint()[i];
    double averaged = 0;
    for (std::size_t x = 0; x < 3; ++x) {
      const MultiAgentProblem c = condition_on_observations(p, {{0, x}});
      averaged += mass[x] * subset_policy_risk(c, {0}).risk;
    }
    ASSERT_NEAR(averaged, subset_policy_risk(p, {0, 1}).risk, 1e-12);
  }
}

}  // namespace
}  // namespace opval
