// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "opval/cli.hpp"
#include "opval/infotheory.hpp"
#include "opval/io.hpp"
#include "opval/multiagent.hpp"
#include "opval/properties.hpp"
#include "opval/solver.hpp"
#include "opval/values.hpp"
#include "../oracle.hpp"

namespace {

using namespace opval;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

Outcome worked_example() {
  Outcome o;
  const DecisionProblem p = oracle::worked_example();
  const ValueReport r = value_report(p);
  o.require(r.u_star.action == 0, "u* != 0");
  o.require(near(r.risks.u_star, 0.0, 1e-12), "risk(u*) = " + fmt(r.risks.u_star));
  o.require(r.blind.policy.map == std::vector<std::size_t>{1, 0}, "blind policy != (1,0)");
  o.require(near(r.risks.blind, 0.02, 1e-12), "risk(blind) = " + fmt(r.risks.blind));
  o.require(near(r.values.perception, -0.02, 1e-12),
            "perception = " + fmt(r.values.perception));
  o.detail = o.pass ? "u*=0, risk 0, blind (1,0) risk 0.02, perception -0.02" : o.detail;
  return o;
}

Outcome derived_report() {
  Outcome o;
  const DecisionProblem p = oracle::worked_example();
  // Enumeration first: 2 actions, 4 policies on X, 16 policies on X x Y.
  const auto b = oracle::brute_force(oracle::plain(p));
  const double cs = b.r_bar_u - b.r_u_star;
  const double pred = b.r_blind - b.r_predictive;
  const double pp = b.r_u_star - b.r_predictive;
  const double comm = b.r_predictive - b.r_omniscient;
  o.require(near(cs, 0.0, 1e-12) && near(pred, 0.02, 1e-12) && near(pp, 0.0, 1e-12) &&
                near(comm, 0.04, 1e-12) && near(b.r_omniscient, -0.04, 1e-12) &&
                b.predictive == std::vector<std::size_t>{0, 0},
            "enumeration disagrees with expected derived values");
  const ValueReport r = value_report(p);
  o.require(near(r.values.common_sense, cs, 1e-12), "common_sense " + fmt(r.values.common_sense));
  o.require(near(r.values.prediction, pred, 1e-12), "prediction " + fmt(r.values.prediction));
  o.require(near(r.values.perception_and_prediction, pp, 1e-12),
            "perception_and_prediction " + fmt(r.values.perception_and_prediction));
  o.require(near(r.values.communication, comm, 1e-12),
            "communication " + fmt(r.values.communication));
  o.require(r.predictive.policy.map == b.predictive, "predictive policy != (0,0)");
  o.require(near(r.risks.omniscient, b.r_omniscient, 1e-12),
            "risk(omniscient) " + fmt(r.risks.omniscient));
  if (o.pass) o.detail = "engine matches enumeration: 0, 0.02, 0, 0.04, (0,0), -0.04";
  return o;
}

Outcome log_loss() {
  Outcome o;
  std::vector<JointDistribution> joints{oracle::worked_example().joint()};
  Rng rng(3);
  for (int t = 0; t < 100; ++t)
    joints.push_back(sample_joint(1 + rng.index(6), 1 + rng.index(6), rng));
  double worst = 0.0;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const LogLossCheck c = log_loss_realization_check(joints[i], i);
    worst = std::max(worst, c.max_difference);
    o.require(c.pass, "joint " + std::to_string(i) + ": difference " +
                          fmt(c.max_difference) + ", margin " +
                          fmt(c.worst_optimality_margin));
  }
  if (o.pass) o.detail = "101 joints, max identity difference " + fmt(worst);
  return o;
}

Outcome nonnegativity() {
  Outcome o;
  Rng rng(2024);
  std::size_t negative = 0;
  std::vector<DecisionProblem> problems{oracle::worked_example()};
  for (int t = 0; t < 1000; ++t)
    problems.push_back(
        oracle::random_problem(1 + rng.index(5), 1 + rng.index(5), 1 + rng.index(6), rng));
  for (std::size_t t = 0; t < problems.size(); ++t) {
    const ValueReport r = value_report(problems[t]);
    const auto& v = r.values;
    const auto& k = r.risks;
    const std::string at = "problem " + std::to_string(t) + ": ";
    o.require(v.common_sense >= -1e-12 && v.prediction >= -1e-12 &&
                  v.perception_and_prediction >= -1e-12 && v.communication >= -1e-12,
              at + "negative value");
    o.require(v.perception + v.prediction == v.perception_and_prediction,
              at + "sum identity not exact");
    o.require(k.omniscient <= k.predictive + 1e-12 && k.predictive <= k.u_star + 1e-12 &&
                  k.u_star <= k.bar_u + 1e-12 && k.predictive <= k.blind + 1e-12,
              at + "risk chain violated");
    negative += v.perception < 0.0 ? 1 : 0;
  }
  o.require(negative > 0, "no negative perception value found");
  if (o.pass)
    o.detail = std::to_string(problems.size()) + " problems, " + std::to_string(negative) +
               " with negative perception";
  return o;
}

Outcome property_suite() {
  Outcome o;
  const auto verdicts = run_property_suite(oracle::worked_example().loss(), 200, 0);
  o.require(verdicts.size() == 10, "expected 10 verdicts");
  for (const auto& v : verdicts) {
    o.require(v.pass && v.trials == 200,
              v.name + " failed, worst slack " + fmt(v.worst_slack));
    if (v.direction == Curvature::kLinear)
      o.require(std::abs(v.worst_slack) <= 1e-9, v.name + " |slack| " + fmt(v.worst_slack));
  }
  if (o.pass) o.detail = "10 clauses x 200 trials, lambdas {0.25, 0.5, 0.75}";
  return o;
}

Outcome multi_agent() {
  Outcome o;
  Rng rng(6);
  for (int t = 0; t < 200 && o.pass; ++t) {
    const std::size_t n = 2 + rng.index(2);
    std::vector<std::size_t> xs(n);
    for (auto& s : xs) s = 1 + rng.index(3);
    const std::vector<std::size_t> ys{1 + rng.index(3)};
    const MultiAgentProblem p = oracle::random_multi(xs, ys, 1 + rng.index(4), rng);
    const std::string at = "problem " + std::to_string(t) + ": ";

    // Subset monotonicity over every subset and every added agent.
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) s.push_back(i);
      const double r = subset_policy_risk(p, s).risk;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) continue;
        auto bigger = s;
        bigger.push_back(i);
        o.require(subset_policy_risk(p, bigger).risk <= r + 1e-12, at + "monotonicity");
      }
    }

    const OrderingReport g = greedy_order(p);
    std::vector<std::size_t> prefix;
    for (std::size_t k = 0; k < n; ++k) {
      o.require(g.step_values[k] >= -1e-12, at + "negative step value");
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(prefix.begin(), prefix.end(), i) != prefix.end()) continue;
        auto s = prefix;
        s.push_back(i);
        best = std::min(best, oracle::subset_risk(p, s));
      }
      prefix.push_back(g.order[k]);
      o.require(near(g.step_risks[k + 1], best, 1e-12), at + "greedy step mismatch");
    }
  }

  // n = 1 against the single-agent report.
  std::vector<DecisionProblem> singles{oracle::worked_example()};
  for (int t = 0; t < 200; ++t)
    singles.push_back(oracle::random_problem(1 + rng.index(3), 1 + rng.index(3),
                                             1 + rng.index(4), rng));
  for (const DecisionProblem& d : singles) {
    const ValueReport r = value_report(d);
    const MultiAgentProblem p = as_multi_agent(d);
    o.require(subset_policy_risk(p, {}).risk == r.risks.u_star &&
                  subset_policy_risk(p, {0}).risk == r.risks.predictive &&
                  subset_policy_risk(p, {0}).policy == r.predictive.policy &&
                  first_agent_value(p, 0) == r.risks.u_star - r.risks.predictive,
              "n=1 report differs from single-agent report");
  }
  if (o.pass) o.detail = "200 random 2-3 agent problems, 201 single-agent reductions";
  return o;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(std::vector<std::string> args, const std::string& in_text = "") {
  args.insert(args.begin(), "opval");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(in_text);
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str()};
}

Outcome cli_contract() {
  Outcome o;
  const std::string dir = OPVAL_TEST_DATA;
  const std::string worked = dir + "/worked_example.json";
  const std::string multi = dir + "/dummy_agent.json";
  const std::vector<std::vector<std::string>> runs{
      {"values", worked, "--seed", "4"},
      {"values", dir + "/independent.json", "--bits"},
      {"agents", multi, "--mode", "rank-first"},
      {"agents", multi, "--mode", "rank-loo"},
      {"agents", multi, "--mode", "order", "--observed", "0=1"},
      {"check", worked, "--trials", "25", "--seed", "9"}};
  for (const auto& args : runs) {
    const CliRun a = cli(args);
    const CliRun b = cli(args);
    o.require(a.code == kExitOk && a.out == b.out && !a.out.empty(),
              args[0] + " report not reproducible");
  }

  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const DecisionProblem p = oracle::random_problem(3, 2, 3, rng);
    const std::string text = emit_problem(p);
    o.require(std::get<DecisionProblem>(parse_problem(text)) == p &&
                  emit_problem(parse_problem(text)) == text,
              "single-agent round trip");
    const MultiAgentProblem m = oracle::random_multi({2, 3}, {2}, 2, rng);
    o.require(std::get<MultiAgentProblem>(parse_problem(emit_problem(m))) == m,
              "multi-agent round trip");
  }

  struct Expect {
    std::vector<std::string> args;
    std::string in;
    int code;
  };
  const std::vector<Expect> bad{
      {{"values", dir + "/bad_sum.json"}, "", kExitInput},
      {{"values", dir + "/bad_syntax.json"}, "", kExitInput},
      {{"values", dir + "/bad_field.json"}, "", kExitInput},
      {{"values", dir + "/does_not_exist.json"}, "", kExitInput},
      {{"values", "-"}, "{\"kind\": \"single\"", kExitInput},
      {{"agents", worked}, "", kExitInput},
      {{"agents", multi, "--observed", "7=0"}, "", kExitInput},
      {{"check", worked, "--trials", "0"}, "", kExitInput},
      {{"unknown"}, "", kExitInput},
      {{"values", worked}, "", kExitOk},
  };
  for (const auto& e : bad) {
    const int code = cli(e.args, e.in).code;
    o.require(code == e.code, "exit " + std::to_string(code) + " for " + e.args[0] + " " +
                                  (e.args.size() > 1 ? e.args[1] : ""));
  }
  if (o.pass) o.detail = "6 commands reproducible, 40 round trips, 10 exit-code cases";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"worked example", worked_example},
      {"derived report vs enumeration", derived_report},
      {"log-loss identities", log_loss},
      {"nonnegativity, sum identity, risk chain", nonnegativity},
      {"curvature property suite", property_suite},
      {"multi-agent monotonicity, greedy order, n=1", multi_agent},
      {"CLI determinism, round trip, exit codes", cli_contract},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first
              << ": " << o.detail << "\n";
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
