#include "opval/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "opval/sampling.hpp"

namespace opval {

namespace {

double scale_for(LogBase base) {
  return base == LogBase::kBits ? 1.0 / std::log(2.0) : 1.0;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace

ShannonMeasures shannon_measures(const JointDistribution& d, LogBase base) {
  const Marginals m = marginals(d);
  const std::size_t nx = d.nx();
  const std::size_t ny = d.ny();

  double hy_given_x = 0.0;
  const ConditionalKernel y_given_x = conditional_kernel(d);
  for (std::size_t x = 0; x < nx; ++x) {
    if (m.px[x] > 0.0) hy_given_x += m.px[x] * entropy(y_given_x.row(x));
  }

  double hx_given_y = 0.0;
  std::vector<double> column(nx);
  for (std::size_t y = 0; y < ny; ++y) {
    if (m.py[y] <= 0.0) continue;
    for (std::size_t x = 0; x < nx; ++x) column[x] = d.at(x, y) / m.py[y];
    hx_given_y += m.py[y] * entropy(column);
  }

  double mi = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double p = d.at(x, y);
      if (p > 0.0) mi += p * std::log(p / (m.px[x] * m.py[y]));
    }
  }

  const double s = scale_for(base);
  ShannonMeasures out;
  out.base = base;
  out.hx = s * entropy(m.px.values());
  out.hy = s * entropy(m.py.values());
  out.hxy = s * entropy(d.values());
  out.hy_given_x = s * hy_given_x;
  out.hx_given_y = s * hx_given_y;
  out.mi = s * mi;
  return out;
}

namespace {

IdentityCheck make_check(std::string name, double computed, double expected) {
  return IdentityCheck{std::move(name), computed, expected,
                       std::abs(computed - expected)};
}

// One action of the log-loss problem: a full-support joint on X x Y.
using JointAction = std::vector<double>;

JointAction random_action(std::size_t nx, std::size_t ny, Rng& rng) {
  const Distribution u = sample_simplex(nx * ny, rng);
  return {u.values().begin(), u.values().end()};
}

}  // namespace

LogLossCheck log_loss_realization_check(const JointDistribution& d,
                                        std::uint64_t seed,
                                        std::size_t candidates, LogBase base) {
  for (double v : d.values()) {
    if (!(v > 0.0)) {
      throw Error(ErrorCode::kZeroSupport,
                  "log-loss check requires every joint entry to be positive");
    }
  }
  const std::size_t nx = d.nx();
  const std::size_t ny = d.ny();
  const Marginals m = marginals(d);
  const ConditionalKernel k = conditional_kernel(d);
  const double s = scale_for(base);
  auto nlog = [s](double v) { return -s * std::log(v); };

  // Plug-in risks of the closed-form optimizers. The one-hot factors
  // delta_x, delta_y evaluate to 1 at the realized point.
  double r_bar_u = 0.0;
  double r_u_star = 0.0;
  double r_blind = 0.0;
  double r_predictive = 0.0;
  double r_omniscient = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double p = d.at(x, y);
      r_bar_u += p * nlog(m.px[x] * m.py[y]);
      r_u_star += p * nlog(p);
      r_blind += p * nlog(m.py[y]);
      r_predictive += p * nlog(k.at(x, y));
      r_omniscient += p * nlog(1.0);
    }
  }

  const ShannonMeasures h = shannon_measures(d, base);
  LogLossCheck out;
  out.risks = {
      make_check("risk_bar_u = H(X) + H(Y)", r_bar_u, h.hx + h.hy),
      make_check("risk_u_star = H(X,Y)", r_u_star, h.hxy),
      make_check("risk_blind = H(Y)", r_blind, h.hy),
      make_check("risk_predictive = H(Y|X)", r_predictive, h.hy_given_x),
      make_check("risk_omniscient = 0", r_omniscient, 0.0),
  };
  out.values = {
      make_check("common_sense = I(X;Y)", r_bar_u - r_u_star, h.mi),
      make_check("perception = H(X|Y)", r_u_star - r_blind, h.hx_given_y),
      make_check("prediction = I(X;Y)", r_blind - r_predictive, h.mi),
      make_check("perception_and_prediction = H(X)", r_u_star - r_predictive,
                 h.hx),
      make_check("communication = H(Y|X)", r_predictive - r_omniscient,
                 h.hy_given_x),
  };
  out.max_difference = 0.0;
  for (const auto& c : out.risks) {
    out.max_difference = std::max(out.max_difference, c.difference);
  }
  for (const auto& c : out.values) {
    out.max_difference = std::max(out.max_difference, c.difference);
  }

  // Optimality spot checks: each random candidate must score at least as
  // much as the closed-form optimizer on the same objective.
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates; ++c) {
    // Constant actions, scored under P_X P_Y and under P_XY.
    const JointAction u = random_action(nx, ny, rng);
    double obj_bar = 0.0;
    double obj_star = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        obj_bar += m.px[x] * m.py[y] * nlog(u[x * ny + y]);
        obj_star += d.at(x, y) * nlog(u[x * ny + y]);
      }
    }
    worst = std::min(worst, obj_bar - r_bar_u);
    worst = std::min(worst, obj_star - r_u_star);

    // Policies on X: one joint action per x.
    double obj_blind = 0.0;
    double obj_pred = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      const JointAction ux = random_action(nx, ny, rng);
      for (std::size_t y = 0; y < ny; ++y) {
        obj_blind += m.px[x] * m.py[y] * nlog(ux[x * ny + y]);
        obj_pred += d.at(x, y) * nlog(ux[x * ny + y]);
      }
    }
    // The blind optimizer's own objective is taken under P_X P_Y as well.
    double blind_opt = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        blind_opt += m.px[x] * m.py[y] * nlog(m.py[y]);
      }
    }
    worst = std::min(worst, obj_blind - blind_opt);
    worst = std::min(worst, obj_pred - r_predictive);

    // Policies on X x Y: one joint action per cell.
    double obj_omni = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        const JointAction uxy = random_action(nx, ny, rng);
        obj_omni += d.at(x, y) * nlog(uxy[x * ny + y]);
      }
    }
    worst = std::min(worst, obj_omni - r_omniscient);
  }
  out.candidates = candidates;
  out.worst_optimality_margin = candidates == 0 ? 0.0 : worst;
  out.pass = out.max_difference <= kLogLossIdentityTolerance &&
             out.worst_optimality_margin >= -1e-12;
  return out;
}

}  // namespace opval
