#pragma once

#include <cstddef>
#include <vector>

#include "opval/core.hpp"
#include "opval/solver.hpp"

namespace opval {

/// Risks of the five information structures, from least to most
/// information used.
struct Risks {
  double bar_u = 0.0;        // constant action chosen under P_X P_Y
  double u_star = 0.0;       // constant action chosen under P_XY
  double blind = 0.0;        // policy on X chosen under P_Y
  double predictive = 0.0;   // policy on X chosen under P_{Y|X}
  double omniscient = 0.0;   // policy on (X, Y)
};

/// Risk reductions of the individual operations. Each is a difference of
/// two entries of `Risks`, except perception_and_prediction, which is stored
/// as perception + prediction so that identity is exact.
struct Values {
  double common_sense = 0.0;
  double perception = 0.0;
  double prediction = 0.0;
  double perception_and_prediction = 0.0;
  double communication = 0.0;
};

struct ValueReport {
  Risks risks;
  Values values;
  SolvedAction bar_u;
  SolvedAction u_star;
  SolvedPolicy blind;
  SolvedPolicy predictive;
  SolvedJointPolicy omniscient;
};

ValueReport value_report(const DecisionProblem& p);

/// Loss over an abstract finite Z with finite actions, and two measures.
struct DivergenceInput {
  std::size_t nz = 0;
  std::size_t nu = 0;
  std::vector<double> loss;  // nz x nu, z-major
  Distribution p;
  Distribution q;
};

/// E_P[l(Z, u_Q)] - E_P[l(Z, u_P)], where u_M minimizes E_M[l(Z, u)].
/// Nonnegative; zero when P = Q.
double generalized_divergence(const DivergenceInput& d);

/// Views the (x, y, u) loss as a loss over Z = X x Y (z = x * |Y| + y).
DivergenceInput divergence_input(const LossTensor& loss, const Distribution& p,
                                 const Distribution& q);

}  // namespace opval
