#include "hgr/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hgr/numerics.hpp"

namespace hgr {

namespace {

constexpr double kPsdTol = 1e-10;
constexpr double kRangeTol = 1e-8;
constexpr double kExcessTol = 1e-9;

}  // namespace

GaussianMoments::GaussianMoments(Eigen::VectorXd mu, Eigen::MatrixXd lambda)
    : mu_(std::move(mu)), lambda_(std::move(lambda)) {
  const Eigen::Index n = mu_.size();
  if (n < 2) throw Error(Errc::DimensionMismatch, "mu needs at least one X coordinate and Y");
  if (lambda_.rows() != n || lambda_.cols() != n) throw Error(Errc::DimensionMismatch, "lambda must be (p+1) x (p+1)");
  require_finite(mu_);
  require_finite(lambda_);
  const double scale = std::max(1.0, lambda_.cwiseAbs().maxCoeff());
  if ((lambda_ - lambda_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(Errc::NotSymmetric, "lambda is not symmetric");
  sigma_ = lambda_ - mu_ * mu_.transpose();
  sigma_ = (0.5 * (sigma_ + sigma_.transpose())).eval();
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma_, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (min_eig < -kPsdTol * scale) {
    std::ostringstream os;
    os << "covariance has eigenvalue " << min_eig;
    throw Error(Errc::InconsistentMoments, os.str());
  }
}

GaussianMoments GaussianMoments::from_covariance(const Eigen::MatrixXd& covariance) {
  return GaussianMoments(Eigen::VectorXd::Zero(covariance.rows()), covariance);
}

Eigen::VectorXd regression_vector(const GaussianMoments& g) {
  const Eigen::MatrixXd sxx = g.sigma_xx();
  const Eigen::VectorXd sxy = g.sigma_xy();
  const Eigen::VectorXd a = pseudoinverse(sxx) * sxy;
  const double residual = (sxx * a - sxy).norm();
  if (residual > kRangeTol * std::max(1.0, sxy.norm())) {
    std::ostringstream os;
    os << "Sigma_XY leaves the range of Sigma_XX (residual " << residual << ")";
    throw Error(Errc::InconsistentMoments, os.str());
  }
  return a;
}

double min_hgr_gaussian(const GaussianMoments& g) {
  const double var_y = g.var_y();
  if (!(var_y > 0)) throw Error(Errc::DegenerateY, "Var(Y) must be positive");
  const Eigen::VectorXd a = regression_vector(g);
  const double explained = a.dot(g.sigma_xx() * a);
  const double ratio = std::max(0.0, explained / var_y);
  if (ratio > 1.0 + kExcessTol) {
    std::ostringstream os;
    os.precision(17);
    os << "Var(a^T X) / Var(Y) = " << ratio << " exceeds 1";
    throw Error(Errc::InconsistentMoments, os.str());
  }
  return std::sqrt(std::min(ratio, 1.0));
}

namespace {

// Gauss-Legendre rule on [-1, 1] via the Golub-Welsch eigenproblem.
struct GaussRule {
  Eigen::VectorXd nodes, weights;
};

GaussRule gauss_legendre(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  return {eig.eigenvalues(), 2.0 * eig.eigenvectors().row(0).transpose().cwiseAbs2()};
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

DiscretizedGaussian midpoint_mass(double rho, int grid_n, double half_width) {
  const double h = 2.0 * half_width / grid_n;
  const double one_minus = 1.0 - rho * rho;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(one_minus));
  Eigen::VectorXd centers(grid_n);
  for (int k = 0; k < grid_n; ++k) centers(k) = -half_width + (k + 0.5) * h;

  Eigen::MatrixXd mass(grid_n, grid_n);
  for (int a = 0; a < grid_n; ++a) {
    for (int b = 0; b < grid_n; ++b) {
      const double x = centers(a), y = centers(b);
      const double q = (x * x - 2.0 * rho * x * y + y * y) / one_minus;
      mass(a, b) = norm * std::exp(-0.5 * q) * h * h;
    }
  }
  const double total = mass.sum();
  return {GenericJoint(mass / total, kInternalTol), 1.0 - total};
}

// P(X in row a, Y in column b) = int phi(x) [Phi((e_{b+1} - rho x)/s) - Phi((e_b - rho x)/s)] dx,
// Gauss-Legendre in x, exact in y.
DiscretizedGaussian integrated_mass(double rho, int grid_n, double half_width) {
  const double h = 2.0 * half_width / grid_n;
  const double s = std::sqrt(1.0 - rho * rho);
  const double reach = 12.0;  // standard deviations beyond the box; phi(12) ~ 1e-32
  Eigen::VectorXd edges(grid_n + 1);
  for (int k = 0; k <= grid_n; ++k) edges(k) = -half_width + k * h;

  const GaussRule inner = gauss_legendre(16), outer = gauss_legendre(48);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(grid_n, grid_n);
  Eigen::VectorXd cdf(grid_n + 1);
  double tail = 0.0;

  auto integrate = [&](double lo, double hi, const GaussRule& rule, int row, bool outside_box) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
      const double x = mid + half * rule.nodes(q);
      const double w = half * rule.weights(q) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      for (int k = 0; k <= grid_n; ++k) cdf(k) = normal_cdf((edges(k) - rho * x) / s);
      for (int b = 0; b < grid_n; ++b) mass(row, b) += w * (cdf(b + 1) - cdf(b));
      const double below = cdf(0), above = 1.0 - cdf(grid_n);
      mass(row, 0) += w * below;
      mass(row, grid_n - 1) += w * above;
      tail += outside_box ? w : w * (below + above);
    }
  };

  integrate(-half_width - reach, -half_width, outer, 0, true);
  for (int a = 0; a < grid_n; ++a) integrate(edges(a), edges(a + 1), inner, a, false);
  integrate(half_width, half_width + reach, outer, grid_n - 1, true);

  return {GenericJoint(mass / mass.sum(), kInternalTol), tail};
}

}  // namespace

DiscretizedGaussian discretize_bivariate_gaussian(double rho, int grid_n, double half_width, CellMass rule) {
  if (!(std::abs(rho) < 1)) throw Error(Errc::InvalidRho, "|rho| must be < 1");
  if (grid_n < 16) throw Error(Errc::InvalidArgument, "grid_n must be >= 16");
  if (!(half_width > 0) || !std::isfinite(half_width)) throw Error(Errc::InvalidArgument, "half_width must be positive");
  return rule == CellMass::Integrated ? integrated_mass(rho, grid_n, half_width) : midpoint_mass(rho, grid_n, half_width);
}

}  // namespace hgr
