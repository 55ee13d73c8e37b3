#include "opval/values.hpp"

#include <cmath>

namespace opval {

ValueReport value_report(const DecisionProblem& p) {
  const Marginals m = marginals(p.joint());
  ValueReport r;
  r.bar_u = best_constant_action(p, product_joint(m.px, m.py));
  r.u_star = best_constant_action(p, p.joint());
  r.blind = best_blind_policy(p);
  r.predictive = best_predictive_policy(p);
  r.omniscient = best_omniscient_policy(p);

  r.risks.bar_u = r.bar_u.true_risk;
  r.risks.u_star = r.u_star.true_risk;
  r.risks.blind = r.blind.true_risk;
  r.risks.predictive = r.predictive.true_risk;
  r.risks.omniscient = r.omniscient.true_risk;

  r.values.common_sense = r.risks.bar_u - r.risks.u_star;
  r.values.perception = r.risks.u_star - r.risks.blind;
  r.values.prediction = r.risks.blind - r.risks.predictive;
  // Summed rather than differenced so the decomposition holds bit-exactly;
  // it agrees with u_star - predictive up to one rounding.
  r.values.perception_and_prediction = r.values.perception + r.values.prediction;
  r.values.communication = r.risks.predictive - r.risks.omniscient;
  return r;
}

namespace {

std::vector<double> expected_losses(const DivergenceInput& d,
                                    const Distribution& m) {
  std::vector<double> acc(d.nu, 0.0);
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t u = 0; u < d.nu; ++u) acc[u] += m[z] * d.loss[z * d.nu + u];
  }
  return acc;
}

}  // namespace

double generalized_divergence(const DivergenceInput& d) {
  if (d.nz == 0 || d.nu == 0 || d.loss.size() != d.nz * d.nu ||
      d.p.size() != d.nz || d.q.size() != d.nz) {
    throw Error(ErrorCode::kShapeMismatch, "divergence input shapes disagree");
  }
  for (double v : d.loss) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kBadLoss, "non-finite loss");
  }
  const std::vector<double> under_p = expected_losses(d, d.p);
  const std::size_t u_p = argmin_index(under_p);
  const std::size_t u_q = argmin_index(expected_losses(d, d.q));
  return under_p[u_q] - under_p[u_p];
}

DivergenceInput divergence_input(const LossTensor& loss, const Distribution& p,
                                 const Distribution& q) {
  const auto values = loss.values();
  return DivergenceInput{loss.nx() * loss.ny(), loss.nu(),
                         std::vector<double>(values.begin(), values.end()), p,
                         q};
}

}  // namespace opval
