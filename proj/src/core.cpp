#include "opval/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace opval {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kBadProbability: return "BadProbability";
    case ErrorCode::kBadLoss: return "BadLoss";
    case ErrorCode::kBadLambda: return "BadLambda";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kZeroSupport: return "ZeroSupport";
    case ErrorCode::kBadDim: return "BadDim";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kZeroMarginal: return "ZeroMarginal";
    case ErrorCode::kBadSubset: return "BadSubset";
    case ErrorCode::kCapExceeded: return "CapExceeded";
    case ErrorCode::kBadAgent: return "BadAgent";
    case ErrorCode::kZeroProbabilityEvent: return "ZeroProbabilityEvent";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kUsage: return "Usage";
  }
  return "Unknown";
}

namespace {

double storage_sum(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

void check_probability_table(std::span<const double> p, const char* what) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      std::ostringstream msg;
      msg << what << ": entry " << i << " is " << p[i]
          << " (must be finite and nonnegative)";
      throw Error(ErrorCode::kBadProbability, msg.str());
    }
  }
  const double s = storage_sum(p);
  if (!(std::abs(s - 1.0) <= kInputTolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": entries sum to " << s << ", expected 1";
    throw Error(ErrorCode::kBadProbability, msg.str());
  }
}

void check_shape(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, message);
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    std::ostringstream msg;
    msg << "mixing weight " << lambda << " outside [0, 1]";
    throw Error(ErrorCode::kBadLambda, msg.str());
  }
}

// a + (1 - lambda) (b - a): reproduces `a` bit-exactly at lambda = 1 and
// whenever a == b.
std::vector<double> mix_tables(std::span<const double> a,
                               std::span<const double> b, double lambda) {
  check_lambda(lambda);
  check_shape(a.size() == b.size(), "mix: operands differ in shape");
  if (lambda == 0.0) return {b.begin(), b.end()};
  const double w = 1.0 - lambda;
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + w * (b[i] - a[i]);
  return out;
}

}  // namespace

void renormalize(std::span<double> p) {
  const double s = storage_sum(p);
  if (s != 1.0) {
    for (double& v : p) v /= s;
  }
  // Division leaves the sum a few ulps off; fold the residual into the
  // largest entry until the storage-order sum is exactly one.
  // Rounding can make the residual overshoot, so after a few tries step one
  // ulp at a time; the sum is monotone in the largest entry.
  const auto largest = std::max_element(p.begin(), p.end());
  for (int pass = 0; pass < 256; ++pass) {
    const double r = 1.0 - storage_sum(p);
    if (r == 0.0) break;
    if (pass < 4) {
      *largest += r;
    } else {
      *largest = std::nextafter(*largest, r > 0 ? 2.0 : -1.0);
    }
  }
  if (storage_sum(p) == 1.0) return;
  // The sum skipped over one. Setting the last positive entry to one minus
  // its prefix sum lands on it exactly; zeros after it add nothing.
  std::size_t last = p.size();
  while (last > 0 && p[last - 1] == 0.0) --last;
  if (last == 0) return;
  double prefix = 0.0;
  for (std::size_t i = 0; i + 1 < last; ++i) prefix += p[i];
  if (1.0 - prefix > 0.0) p[last - 1] = 1.0 - prefix;
}

FiniteSpace::FiniteSpace(std::size_t size) : size_(size) {
  if (size == 0) throw Error(ErrorCode::kShapeMismatch, "empty space");
}

FiniteSpace::FiniteSpace(std::size_t size, std::vector<std::string> labels)
    : FiniteSpace(size) {
  if (!labels.empty()) {
    check_shape(labels.size() == size, "label count does not match size");
    std::set<std::string> seen(labels.begin(), labels.end());
    check_shape(seen.size() == labels.size(), "labels must be unique");
    labels_ = std::move(labels);
  }
}

std::string FiniteSpace::label(std::size_t i) const {
  return labels_.empty() ? std::to_string(i) : labels_.at(i);
}

Distribution::Distribution(std::vector<double> p) : p_(std::move(p)) {
  check_shape(!p_.empty(), "distribution over an empty space");
  check_probability_table(p_, "distribution");
  renormalize(p_);
}

Distribution Distribution::uniform(std::size_t n) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::one_hot(std::size_t n, std::size_t at) {
  if (at >= n) throw Error(ErrorCode::kIndexOutOfRange, "one_hot index");
  std::vector<double> p(n, 0.0);
  p[at] = 1.0;
  return Distribution(std::move(p));
}

JointDistribution::JointDistribution(std::size_t nx, std::size_t ny,
                                     std::vector<double> p)
    : nx_(nx), ny_(ny), p_(std::move(p)) {
  check_shape(nx > 0 && ny > 0, "joint distribution needs nonempty spaces");
  check_shape(p_.size() == nx * ny, "joint table has " +
                                        std::to_string(p_.size()) +
                                        " entries, expected " +
                                        std::to_string(nx * ny));
  check_probability_table(p_, "joint");
  renormalize(p_);
}

ConditionalKernel::ConditionalKernel(std::size_t nx, std::size_t ny,
                                     std::vector<double> k)
    : nx_(nx), ny_(ny), k_(std::move(k)) {
  check_shape(nx > 0 && ny > 0, "kernel needs nonempty spaces");
  check_shape(k_.size() == nx * ny, "kernel table has " +
                                        std::to_string(k_.size()) +
                                        " entries, expected " +
                                        std::to_string(nx * ny));
  for (std::size_t x = 0; x < nx_; ++x) {
    std::span<double> row(k_.data() + x * ny_, ny_);
    check_probability_table(row, ("kernel row " + std::to_string(x)).c_str());
    renormalize(row);
  }
}

LossTensor::LossTensor(std::size_t nx, std::size_t ny, std::size_t nu,
                       std::vector<double> l)
    : nx_(nx), ny_(ny), nu_(nu), l_(std::move(l)) {
  check_shape(nx > 0 && ny > 0 && nu > 0, "loss tensor needs nonempty spaces");
  check_shape(l_.size() == nx * ny * nu, "loss table has " +
                                             std::to_string(l_.size()) +
                                             " entries, expected " +
                                             std::to_string(nx * ny * nu));
  for (std::size_t i = 0; i < l_.size(); ++i) {
    if (!std::isfinite(l_[i])) {
      throw Error(ErrorCode::kBadLoss,
                  "loss entry " + std::to_string(i) + " is not finite");
    }
  }
}

DecisionProblem::DecisionProblem(FiniteSpace x_space, FiniteSpace y_space,
                                 FiniteSpace u_space, JointDistribution joint,
                                 LossTensor loss)
    : x_space_(std::move(x_space)),
      y_space_(std::move(y_space)),
      u_space_(std::move(u_space)),
      joint_(std::move(joint)),
      loss_(std::move(loss)) {
  check_shape(joint_.nx() == x_space_.size() && joint_.ny() == y_space_.size(),
              "joint shape does not match (|X|, |Y|)");
  check_shape(loss_.nx() == x_space_.size() && loss_.ny() == y_space_.size() &&
                  loss_.nu() == u_space_.size(),
              "loss shape does not match (|X|, |Y|, |U|)");
}

DecisionProblem::DecisionProblem(JointDistribution joint, LossTensor loss)
    : DecisionProblem(FiniteSpace(loss.nx()), FiniteSpace(loss.ny()),
                      FiniteSpace(loss.nu()), std::move(joint),
                      std::move(loss)) {}

DecisionProblem validate_problem(const RawProblem& raw) {
  check_shape(raw.nx > 0 && raw.ny > 0 && raw.nu > 0,
              "space sizes must be positive");
  return DecisionProblem(FiniteSpace(raw.nx, raw.x_labels),
                         FiniteSpace(raw.ny, raw.y_labels),
                         FiniteSpace(raw.nu, raw.u_labels),
                         JointDistribution(raw.nx, raw.ny, raw.joint),
                         LossTensor(raw.nx, raw.ny, raw.nu, raw.loss));
}

Marginals marginals(const JointDistribution& d) {
  std::vector<double> px(d.nx(), 0.0);
  std::vector<double> py(d.ny(), 0.0);
  for (std::size_t x = 0; x < d.nx(); ++x) {
    for (std::size_t y = 0; y < d.ny(); ++y) {
      px[x] += d.at(x, y);
      py[y] += d.at(x, y);
    }
  }
  return {Distribution(std::move(px)), Distribution(std::move(py))};
}

ConditionalKernel conditional_kernel(const JointDistribution& d) {
  const Marginals m = marginals(d);
  std::vector<double> k(d.nx() * d.ny());
  for (std::size_t x = 0; x < d.nx(); ++x) {
    for (std::size_t y = 0; y < d.ny(); ++y) {
      k[x * d.ny() + y] = m.px[x] > 0.0 ? d.at(x, y) / m.px[x] : m.py[y];
    }
  }
  return ConditionalKernel(d.nx(), d.ny(), std::move(k));
}

JointDistribution product_joint(const Distribution& px, const Distribution& py) {
  std::vector<double> p(px.size() * py.size());
  for (std::size_t x = 0; x < px.size(); ++x) {
    for (std::size_t y = 0; y < py.size(); ++y) {
      p[x * py.size() + y] = px[x] * py[y];
    }
  }
  return JointDistribution(px.size(), py.size(), std::move(p));
}

JointDistribution compose(const Distribution& px, const ConditionalKernel& k) {
  check_shape(px.size() == k.nx(), "compose: |X| mismatch");
  std::vector<double> p(k.nx() * k.ny());
  for (std::size_t x = 0; x < k.nx(); ++x) {
    for (std::size_t y = 0; y < k.ny(); ++y) {
      p[x * k.ny() + y] = px[x] * k.at(x, y);
    }
  }
  return JointDistribution(k.nx(), k.ny(), std::move(p));
}

Distribution mix(const Distribution& a, const Distribution& b, double lambda) {
  return Distribution(mix_tables(a.values(), b.values(), lambda));
}

JointDistribution mix(const JointDistribution& a, const JointDistribution& b,
                      double lambda) {
  check_shape(a.nx() == b.nx() && a.ny() == b.ny(),
              "mix: joint shapes differ");
  return JointDistribution(a.nx(), a.ny(),
                           mix_tables(a.values(), b.values(), lambda));
}

ConditionalKernel mix(const ConditionalKernel& a, const ConditionalKernel& b,
                      double lambda) {
  check_shape(a.nx() == b.nx() && a.ny() == b.ny(),
              "mix: kernel shapes differ");
  return ConditionalKernel(a.nx(), a.ny(),
                           mix_tables(a.values(), b.values(), lambda));
}

}  // namespace opval
