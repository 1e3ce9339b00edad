#ifndef HGR_GAUSSIAN_HPP
#define HGR_GAUSSIAN_HPP

// Continuous case: among all distributions of (X, Y) with given first and
// second moments, the jointly Gaussian one has the smallest maximal
// correlation, equal to sqrt(Var(a^T X) / Var(Y)) with a the regression vector
// of Y on X.

#include <Eigen/Dense>

#include "hgr/hgr_oracle.hpp"

namespace hgr {

/// First and second raw moments of (X_1..X_p, Y), Y last.
class GaussianMoments {
 public:
  /// Throws DimensionMismatch, NotSymmetric, InconsistentMoments (covariance not PSD).
  GaussianMoments(Eigen::VectorXd mu, Eigen::MatrixXd lambda);

  int p() const noexcept { return static_cast<int>(mu_.size()) - 1; }
  const Eigen::VectorXd& mu() const noexcept { return mu_; }
  const Eigen::MatrixXd& lambda() const noexcept { return lambda_; }
  const Eigen::MatrixXd& covariance() const noexcept { return sigma_; }

  auto sigma_xx() const { return sigma_.topLeftCorner(p(), p()); }
  auto sigma_xy() const { return sigma_.topRightCorner(p(), 1); }
  double var_y() const { return sigma_(p(), p()); }

  /// Moments of a zero-mean vector with the given covariance.
  static GaussianMoments from_covariance(const Eigen::MatrixXd& covariance);

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd lambda_;
  Eigen::MatrixXd sigma_;
};

/// a = pinv(Sigma_XX) Sigma_XY. Throws InconsistentMoments when Sigma_XY leaves range(Sigma_XX).
Eigen::VectorXd regression_vector(const GaussianMoments& moments);

/// sqrt(a^T Sigma_XX a / Var(Y)). Throws DegenerateY, InconsistentMoments.
double min_hgr_gaussian(const GaussianMoments& moments);

enum class CellMass {
  Midpoint,    // density at the cell center times cell area, renormalized
  Integrated,  // exact probability of each cell; mass outside the box folded into the edge cells
};

struct DiscretizedGaussian {
  GenericJoint joint;
  double tail_mass = 0.0;  // probability outside [-half_width, half_width]^2 (Midpoint: 1 - raw total)
};

/// Standard bivariate normal with correlation rho on a grid_n x grid_n grid
/// over [-half_width, half_width]^2. Integrated mass is a quantization of the
/// pair, so doubling grid_n can only raise the maximal correlation toward |rho|;
/// Midpoint mass converges to the truncated density instead.
/// Throws InvalidRho, InvalidArgument.
DiscretizedGaussian discretize_bivariate_gaussian(double rho, int grid_n, double half_width = 5.0,
                                                  CellMass rule = CellMass::Midpoint);

}  // namespace hgr

#endif  // HGR_GAUSSIAN_HPP
