#ifndef PACKBED_TYPES_HPP
#define PACKBED_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace packbed {

using Vec2 = Eigen::Vector2d;
/// Velocity gradient, grad(i, j) = d u_i / d x_j.
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct ScalarSample {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
};

struct VectorSample {
  Vec2 value = Vec2::Zero();
  Mat2 grad = Mat2::Zero();
};

/// Pointwise vector data (forcing, boundary velocity).
using VectorFn = std::function<Vec2(double x, double y)>;
/// Scalar field with gradient, e.g. porosity.
using ScalarFieldFn = std::function<ScalarSample(double x, double y)>;
/// Vector field with gradient, e.g. an analytic or finite element velocity.
using VectorFieldFn = std::function<VectorSample(double x, double y)>;

/// Argument outside the domain of a coefficient law or geometry query.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One or more violated configuration invariants.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  explicit ConfigError(const std::string& issue)
      : ConfigError(std::vector<std::string>{issue}) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

}  // namespace packbed

#endif  // PACKBED_TYPES_HPP
