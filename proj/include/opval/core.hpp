#pragma once

// Finite probability and loss tables for a one-shot decision problem.
//
// Conventions used everywhere in the library:
//   * spaces are index ranges 0..size-1,
//   * tables are dense and row-major with axis order (x, y, u),
//   * every probability table is renormalized at construction so that its
//     entries (summed in storage order) add up to exactly 1.0.
//
// All types are immutable after construction.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opval/error.hpp"

namespace opval {

/// Input tolerance on |sum - 1| for any probability table.
inline constexpr double kInputTolerance = 1e-9;

class FiniteSpace {
 public:
  explicit FiniteSpace(std::size_t size);
  FiniteSpace(std::size_t size, std::vector<std::string> labels);

  std::size_t size() const noexcept { return size_; }
  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// Label of element `i`, or its decimal index when unlabeled.
  std::string label(std::size_t i) const;

  friend bool operator==(const FiniteSpace&, const FiniteSpace&) = default;

 private:
  std::size_t size_;
  std::vector<std::string> labels_;
};

/// Probability vector over a finite space.
class Distribution {
 public:
  explicit Distribution(std::vector<double> p);

  static Distribution uniform(std::size_t n);
  static Distribution one_hot(std::size_t n, std::size_t at);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> p_;
};

/// P(x, y), stored x-major.
class JointDistribution {
 public:
  JointDistribution(std::size_t nx, std::size_t ny, std::vector<double> p);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  double at(std::size_t x, std::size_t y) const { return p_[x * ny_ + y]; }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(p_).subspan(x * ny_, ny_);
  }
  std::span<const double> values() const noexcept { return p_; }

  friend bool operator==(const JointDistribution&,
                         const JointDistribution&) = default;

 private:
  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> p_;
};

/// P(y | x); every row is a distribution over Y.
class ConditionalKernel {
 public:
  ConditionalKernel(std::size_t nx, std::size_t ny, std::vector<double> k);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  double at(std::size_t x, std::size_t y) const { return k_[x * ny_ + y]; }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(k_).subspan(x * ny_, ny_);
  }
  std::span<const double> values() const noexcept { return k_; }

  friend bool operator==(const ConditionalKernel&,
                         const ConditionalKernel&) = default;

 private:
  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> k_;
};

/// l(x, y, u), axis order (x, y, u).
class LossTensor {
 public:
  LossTensor(std::size_t nx, std::size_t ny, std::size_t nu,
             std::vector<double> l);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t nu() const noexcept { return nu_; }
  double at(std::size_t x, std::size_t y, std::size_t u) const {
    return l_[(x * ny_ + y) * nu_ + u];
  }
  /// Losses of every action at cell (x, y).
  std::span<const double> actions(std::size_t x, std::size_t y) const {
    return std::span<const double>(l_).subspan((x * ny_ + y) * nu_, nu_);
  }
  std::span<const double> values() const noexcept { return l_; }

  friend bool operator==(const LossTensor&, const LossTensor&) = default;

 private:
  std::size_t nx_;
  std::size_t ny_;
  std::size_t nu_;
  std::vector<double> l_;
};

class DecisionProblem {
 public:
  DecisionProblem(FiniteSpace x_space, FiniteSpace y_space,
                  FiniteSpace u_space, JointDistribution joint,
                  LossTensor loss);
  /// Unlabeled spaces sized from the tables.
  DecisionProblem(JointDistribution joint, LossTensor loss);

  const FiniteSpace& x_space() const noexcept { return x_space_; }
  const FiniteSpace& y_space() const noexcept { return y_space_; }
  const FiniteSpace& u_space() const noexcept { return u_space_; }
  const JointDistribution& joint() const noexcept { return joint_; }
  const LossTensor& loss() const noexcept { return loss_; }

  std::size_t nx() const noexcept { return x_space_.size(); }
  std::size_t ny() const noexcept { return y_space_.size(); }
  std::size_t nu() const noexcept { return u_space_.size(); }

  friend bool operator==(const DecisionProblem&,
                         const DecisionProblem&) = default;

 private:
  FiniteSpace x_space_;
  FiniteSpace y_space_;
  FiniteSpace u_space_;
  JointDistribution joint_;
  LossTensor loss_;
};

/// Unvalidated problem description, e.g. as read from a file.
struct RawProblem {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nu = 0;
  std::vector<double> joint;
  std::vector<double> loss;
  std::vector<std::string> x_labels;
  std::vector<std::string> y_labels;
  std::vector<std::string> u_labels;
};

DecisionProblem validate_problem(const RawProblem& raw);

/// Deterministic decision rule X -> U.
struct Policy {
  std::vector<std::size_t> map;

  std::size_t operator()(std::size_t x) const { return map[x]; }
  friend bool operator==(const Policy&, const Policy&) = default;
};

/// Deterministic decision rule X x Y -> U, stored x-major.
struct JointPolicy {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<std::size_t> map;

  std::size_t operator()(std::size_t x, std::size_t y) const {
    return map[x * ny + y];
  }
  friend bool operator==(const JointPolicy&, const JointPolicy&) = default;
};

struct Marginals {
  Distribution px;
  Distribution py;
};

Marginals marginals(const JointDistribution& d);

/// P(y | x). Rows with P(x) = 0 fall back to the Y marginal.
ConditionalKernel conditional_kernel(const JointDistribution& d);

JointDistribution product_joint(const Distribution& px, const Distribution& py);

/// P(x) P(y | x).
JointDistribution compose(const Distribution& px, const ConditionalKernel& k);

/// Pointwise lambda * a + (1 - lambda) * b.
Distribution mix(const Distribution& a, const Distribution& b, double lambda);
JointDistribution mix(const JointDistribution& a, const JointDistribution& b,
                      double lambda);
ConditionalKernel mix(const ConditionalKernel& a, const ConditionalKernel& b,
                      double lambda);

/// Rescales `p` in place so its storage-order sum is exactly 1.0.
/// Requires a positive sum.
void renormalize(std::span<double> p);

}  // namespace opval
