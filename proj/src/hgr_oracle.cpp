#include "hgr/hgr_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hgr/numerics.hpp"

namespace hgr {

namespace {

// Singular values of the deflated matrix below this are roundoff of an exact 0.
constexpr double kZeroCorrelation = 1e-12;
constexpr double kClampLogTol = 1e-9;

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& marginal, std::vector<bool>& mask) {
  std::vector<Eigen::Index> idx;
  mask.assign(marginal.size(), false);
  for (Eigen::Index k = 0; k < marginal.size(); ++k) {
    if (marginal(k) > 0) {
      idx.push_back(k);
      mask[k] = true;
    }
  }
  return idx;
}

// Unit vector orthogonal to `anchor` (itself unit), closest to `v`.
Eigen::VectorXd orthogonalize(Eigen::VectorXd v, const Eigen::VectorXd& anchor) {
  v -= anchor.dot(v) * anchor;
  const double n = v.norm();
  return n > 0 ? Eigen::VectorXd(v / n) : v;
}

}  // namespace

GenericJoint::GenericJoint(Eigen::MatrixXd prob, double tol) : prob_(std::move(prob)) {
  if (prob_.size() == 0) throw Error(Errc::DimensionMismatch, "empty joint table");
  if (!prob_.allFinite()) throw Error(Errc::NonFinite, "joint table has non-finite entries");
  if (prob_.minCoeff() < 0) throw Error(Errc::NegativeProbability, "joint has a negative atom");
  if (std::abs(prob_.sum() - 1.0) > tol) throw Error(Errc::NotNormalized, "joint does not sum to 1");
}

GenericJoint flatten(const DiscreteJoint& joint) { return GenericJoint(joint.prob(), kInternalTol); }

HgrResult hgr_svd(const GenericJoint& joint) {
  HgrResult out;
  out.f_star = Eigen::VectorXd::Zero(joint.nx());
  out.g_star = Eigen::VectorXd::Zero(joint.ny());
  // Renormalize so input slack in the total does not leak into the deflation.
  const Eigen::MatrixXd prob = joint.prob() / joint.prob().sum();
  const Eigen::VectorXd px = prob.rowwise().sum();
  const Eigen::VectorXd py = prob.colwise().sum().transpose();
  const auto xs = support_of(px, out.x_support);
  const auto ys = support_of(py, out.y_support);
  if (xs.size() < 2 || ys.size() < 2) {
    out.degenerate = true;
    out.f_star.resize(0);
    out.g_star.resize(0);
    out.warnings.push_back("one-point marginal support; maximal correlation reported as 0");
    return out;
  }

  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto ny = static_cast<Eigen::Index>(ys.size());
  Eigen::VectorXd sx(nx), sy(ny);
  for (Eigen::Index a = 0; a < nx; ++a) sx(a) = std::sqrt(px(xs[a]));
  for (Eigen::Index b = 0; b < ny; ++b) sy(b) = std::sqrt(py(ys[b]));
  sx.normalize();
  sy.normalize();

  Eigen::MatrixXd deflated(nx, ny);
  for (Eigen::Index a = 0; a < nx; ++a)
    for (Eigen::Index b = 0; b < ny; ++b)
      deflated(a, b) = prob(xs[a], ys[b]) / std::sqrt(px(xs[a]) * py(ys[b])) - sx(a) * sy(b);

  const auto dec = svd(deflated);
  double rho = dec.singular_values(0);
  const Eigen::VectorXd u = orthogonalize(dec.u.col(0), sx);
  const Eigen::VectorXd v = orthogonalize(dec.v.col(0), sy);

  if (rho > 1.0 + kClampLogTol) {
    std::ostringstream os;
    os.precision(17);
    os << "maximal correlation " << rho << " clamped to 1";
    out.warnings.push_back(os.str());
  }
  rho = std::min(rho, 1.0);
  if (rho < kZeroCorrelation) rho = 0.0;
  out.rho = rho;
  for (Eigen::Index a = 0; a < nx; ++a) out.f_star(xs[a]) = u(a) / std::sqrt(px(xs[a]));
  for (Eigen::Index b = 0; b < ny; ++b) out.g_star(ys[b]) = v(b) / std::sqrt(py(ys[b]));
  return out;
}

double hgr_binary(const DiscreteJoint& joint) {
  const double p1 = joint.p_y1();
  if (!(p1 > 0 && p1 < 1)) throw Error(Errc::DegenerateY, "P(Y=1) must lie strictly between 0 and 1");
  const ConditionalTable cond = conditional_expectation(joint);
  const Eigen::VectorXd px = joint.x_marginal();
  double between = 0.0;
  for (Eigen::Index s = 0; s < px.size(); ++s)
    if (cond.support[s]) between += px(s) * (cond.value(s) - p1) * (cond.value(s) - p1);
  const double rho = std::sqrt(std::clamp(between / (p1 * (1.0 - p1)), 0.0, 1.0));
  return rho < kZeroCorrelation ? 0.0 : rho;
}

double pearson(const GenericJoint& joint, const Eigen::VectorXd& xv, const Eigen::VectorXd& yv) {
  if (xv.size() != joint.nx() || yv.size() != joint.ny())
    throw Error(Errc::DimensionMismatch, "embedding lengths must match the alphabets");
  const Eigen::VectorXd px = joint.x_marginal();
  const Eigen::VectorXd py = joint.y_marginal();
  const double mx = px.dot(xv), my = py.dot(yv);
  const Eigen::VectorXd cx = xv.array() - mx;
  const Eigen::VectorXd cy = yv.array() - my;
  const double vx = px.dot(cx.cwiseProduct(cx));
  const double vy = py.dot(cy.cwiseProduct(cy));
  if (!(vx > 0) || !(vy > 0)) throw Error(Errc::ZeroVariance, "embedded variable has zero variance");
  return cx.dot(joint.prob() * cy) / std::sqrt(vx * vy);
}

}  // namespace hgr
