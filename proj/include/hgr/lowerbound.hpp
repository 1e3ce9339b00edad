#ifndef HGR_LOWERBOUND_HPP
#define HGR_LOWERBOUND_HPP

// Separable-function lower bound on the HGR maximal correlation between X and
// a binary Y, computed from pairwise marginals only.
//
// With w the one-hot indicator vector of X (block i, offset k set when X_i = k)
// and b = Y - 1/2:
//
//   E[(w^T z - b)^2] = z^T Q z - d^T z + 1/4,   Q = E[w w^T],   d = 2 E[b w],
//   gamma_lb = min_z of the above = (1 - d^T Q^+ d) / 4,
//   rho_lb   = sqrt(1 - gamma_lb / (P(Y=0) P(Y=1))).
//
// Minimizers solve 2 Q z = d; z* below is the minimum-norm one, Q^+ d / 2.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgr/distributions.hpp"

namespace hgr {

struct QdSystem {
  AlphabetSpec spec;
  Eigen::MatrixXd q;   // pm x pm, Q(i*m+k, j*m+l) = P(X_i=k, X_j=l)
  Eigen::VectorXd d;   // d(i*m+k) = P(X_i=k, Y=1) - P(X_i=k, Y=0)
  Eigen::VectorXd ew;  // E[w], the univariate marginals
  double p_y1 = 0.0;

  double p_y0() const noexcept { return 1.0 - p_y1; }
  /// z^T Q z - d^T z + 1/4.
  double objective(const Eigen::VectorXd& z) const { return z.dot(q * z) - d.dot(z) + 0.25; }
};

/// Throws InconsistentMarginals when validate_marginals reports anything.
QdSystem assemble_qd(const PairwiseMarginalSet& marginals);

enum class LowerBoundMethod { ClosedForm, Iterative };

struct LowerBoundResult {
  double gamma_lb = 0.0;
  double rho_lb = 0.0;  // NaN when Y is degenerate
  Eigen::VectorXd z_star;
  LowerBoundMethod method = LowerBoundMethod::ClosedForm;
  std::vector<std::string> warnings;
};

/// (1 - d^T Q^+ d) / 4 via the SVD pseudoinverse. Throws DInconsistentWithQ when
/// d is not in the column space of Q (relative residual > 1e-8).
double gamma_lb_closed(const QdSystem& system);

/// Conjugate gradients on 2 Q z = d from z = 0, which stays in range(Q) and
/// therefore lands on the minimum-norm minimizer; gamma is the objective there.
LowerBoundResult gamma_lb_iterative(const QdSystem& system);

/// Closed-form gamma plus z* = Q^+ d / 2 and rho_lb.
LowerBoundResult lower_bound(const QdSystem& system);

/// sqrt(1 - gamma_lb / (P(Y=0) P(Y=1))); throws DegenerateY. Evaluated in a
/// cancellation-free form so independent X, Y give 0 rather than sqrt(eps).
double rho_lb(const QdSystem& system);
double rho_from_gamma(double gamma, double p_y1, std::vector<std::string>* warnings = nullptr);

/// Regression data: one indicator row per sample.
struct DesignSystem {
  Eigen::MatrixXd w;  // n x pm, entries in {0, 1}
  Eigen::VectorXd b;  // n entries in {-1/2, +1/2}
};

DesignSystem design_matrix(const Dataset& data);

/// ||W z - b||^2. Divided by n it equals QdSystem::objective for the empirical
/// Q and d of the same data.
double lsq_objective(const DesignSystem& design, const Eigen::VectorXd& z);

}  // namespace hgr

#endif  // HGR_LOWERBOUND_HPP
