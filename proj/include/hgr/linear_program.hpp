#ifndef HGR_LINEAR_PROGRAM_HPP
#define HGR_LINEAR_PROGRAM_HPP

#include <limits>

#include <Eigen/Dense>

namespace hgr {

/// minimize c^T x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper.
/// Empty lower/upper mean 0 and +inf respectively; use +-infinity for free sides.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index variables() const noexcept { return objective.size(); }

  static LinearProgram with_variables(Eigen::Index n);
  /// Marks every variable free (-inf, +inf).
  void make_free();
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::quiet_NaN();
};

/// Dense two-phase simplex with Bland's rule. The final basis is re-solved
/// with a pivoted LU so the returned point is as accurate as the basis allows.
/// Throws DimensionMismatch for inconsistent shapes.
LpSolution solve_lp(const LinearProgram& lp);

/// Largest violation of any constraint at x (0 when feasible).
double lp_infeasibility(const LinearProgram& lp, const Eigen::VectorXd& x);

}  // namespace hgr

#endif  // HGR_LINEAR_PROGRAM_HPP
