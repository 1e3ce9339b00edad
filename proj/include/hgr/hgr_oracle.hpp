#ifndef HGR_HGR_ORACLE_HPP
#define HGR_HGR_ORACLE_HPP

// Exact HGR maximal correlation of a finite joint distribution.
//
// With B(x, y) = P(x, y) / sqrt(P(x) P(y)) over the support, the top singular
// value of B is 1 (constant functions) and the maximal correlation is the next
// one. f* and g* are the corresponding singular vectors divided by
// sqrt(marginal).

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgr/distributions.hpp"

namespace hgr {

/// Arbitrary nx x ny joint table.
class GenericJoint {
 public:
  explicit GenericJoint(Eigen::MatrixXd prob, double tol = kInputTol);

  const Eigen::MatrixXd& prob() const noexcept { return prob_; }
  Eigen::Index nx() const noexcept { return prob_.rows(); }
  Eigen::Index ny() const noexcept { return prob_.cols(); }
  Eigen::VectorXd x_marginal() const { return prob_.rowwise().sum(); }
  Eigen::VectorXd y_marginal() const { return prob_.colwise().sum().transpose(); }

 private:
  Eigen::MatrixXd prob_;
};

/// m^p x 2 view of a DiscreteJoint (X-states in mixed-radix order).
GenericJoint flatten(const DiscreteJoint& joint);

struct HgrResult {
  double rho = 0.0;
  Eigen::VectorXd f_star;  // length nx, 0 off the support
  Eigen::VectorXd g_star;  // length ny, 0 off the support
  std::vector<bool> x_support;
  std::vector<bool> y_support;
  /// One side has a single support point: rho is reported as 0, f*/g* are empty.
  bool degenerate = false;
  std::vector<std::string> warnings;
};

HgrResult hgr_svd(const GenericJoint& joint);

/// sqrt(Var(E[Y|X]) / Var(Y)) for binary Y. Throws DegenerateY.
double hgr_binary(const DiscreteJoint& joint);

/// Pearson correlation of numeric embeddings of the two alphabets.
/// Throws ZeroVariance, DimensionMismatch.
double pearson(const GenericJoint& joint, const Eigen::VectorXd& x_values, const Eigen::VectorXd& y_values);

}  // namespace hgr

#endif  // HGR_HGR_ORACLE_HPP
