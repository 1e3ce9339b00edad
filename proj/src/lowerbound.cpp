#include "hgr/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hgr/numerics.hpp"

namespace hgr {

namespace {

constexpr double kRangeTol = 1e-8;
constexpr double kClampLogTol = 1e-10;

void require_in_range(const QdSystem& s, const Eigen::VectorXd& u) {
  const double dn = s.d.norm();
  if (dn == 0) return;
  const double rel = (s.q * u - s.d).norm() / dn;
  if (rel > kRangeTol) {
    std::ostringstream os;
    os << "relative residual " << rel << " of Q u = d; the marginals admit no joint";
    throw Error(Errc::DInconsistentWithQ, os.str());
  }
}

double clamp_gamma(double gamma, std::vector<std::string>* warnings) {
  const double clamped = std::clamp(gamma, 0.0, 0.25);
  if (warnings && std::abs(clamped - gamma) > kClampLogTol) {
    std::ostringstream os;
    os.precision(17);
    os << "gamma_lb " << gamma << " clamped to " << clamped;
    warnings->push_back(os.str());
  }
  return clamped;
}

double closed_form(const QdSystem& s, Eigen::VectorXd* z_star, std::vector<std::string>* warnings) {
  const Eigen::MatrixXd q_pinv = pseudoinverse(s.q);
  const Eigen::VectorXd u = q_pinv * s.d;
  require_in_range(s, u);
  if (z_star) *z_star = 0.5 * u;
  return clamp_gamma(0.25 * (1.0 - s.d.dot(u)), warnings);
}

// 1 - gamma / (p0 p1) loses everything to cancellation when X and Y are nearly
// independent. With c = d - (p1 - p0) E[w] (twice the covariance of w with
// 1{Y=1}) and Q (1/p) = E[w], every stationary point z gives
//   1 - gamma / (p0 p1) = c^T z / (2 p0 p1),
// which is small exactly when c is.
double rho_from_stationary(const QdSystem& s, const Eigen::VectorXd& z, std::vector<std::string>* warnings) {
  if (!(s.p_y1 > 0 && s.p_y1 < 1)) return std::numeric_limits<double>::quiet_NaN();
  const double p1 = s.p_y1, p0 = s.p_y0();
  const Eigen::VectorXd c = s.d - (p1 - p0) * s.ew;
  const double squared = c.dot(z) / (2.0 * p0 * p1);
  if (warnings && (squared < -kClampLogTol || squared > 1.0 + kClampLogTol)) {
    std::ostringstream os;
    os.precision(17);
    os << "rho_lb^2 = " << squared << " clamped into [0, 1]";
    warnings->push_back(os.str());
  }
  return std::sqrt(std::clamp(squared, 0.0, 1.0));
}

// Same quantity as a norm: c^T z = c^T Q^+ c / 2, so
// rho_lb = |Lambda^{-1/2} U^T c| / (2 sqrt(p0 p1)) over the nonzero eigenpairs of Q.
// Roundoff stays at the scale of rho rather than rho^2.
double rho_by_whitening(const QdSystem& s, std::vector<std::string>* warnings) {
  if (!(s.p_y1 > 0 && s.p_y1 < 1)) return std::numeric_limits<double>::quiet_NaN();
  const double p1 = s.p_y1, p0 = s.p_y0();
  const Eigen::VectorXd c = s.d - (p1 - p0) * s.ew;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.q);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double cut = kRankTol * lambda.cwiseAbs().maxCoeff();
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * c;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (lambda(k) > cut) sum += proj(k) * proj(k) / lambda(k);
  const double rho = std::sqrt(sum) / (2.0 * std::sqrt(p0 * p1));
  if (warnings && rho > 1.0 + kClampLogTol) {
    std::ostringstream os;
    os.precision(17);
    os << "rho_lb = " << rho << " clamped to 1";
    warnings->push_back(os.str());
  }
  return std::min(rho, 1.0);
}

}  // namespace

QdSystem assemble_qd(const PairwiseMarginalSet& mg) {
  const ValidationReport report = validate_marginals(mg);
  if (!report.ok()) {
    std::string msg = report.violations.front().detail;
    if (report.violations.size() > 1) msg += " (+" + std::to_string(report.violations.size() - 1) + " more)";
    throw Error(Errc::InconsistentMarginals, msg);
  }
  QdSystem s{mg.spec, mg.xx, mg.xy.col(1) - mg.xy.col(0), mg.xy.rowwise().sum(), mg.with_y(0).col(1).sum()};
  // Exact symmetry; validation already bounded the asymmetry by the input tolerance.
  s.q = 0.5 * (s.q + s.q.transpose()).eval();
  return s;
}

double gamma_lb_closed(const QdSystem& system) { return closed_form(system, nullptr, nullptr); }

LowerBoundResult gamma_lb_iterative(const QdSystem& s) {
  const Eigen::Index n = s.d.size();
  const Eigen::MatrixXd a = 2.0 * s.q;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  const double target = 1e-15 * std::max(1.0, s.d.norm());

  // Restarted CG; each restart recomputes the true residual.
  for (int restart = 0; restart < 4; ++restart) {
    Eigen::VectorXd r = s.d - a * z;
    if (r.norm() <= target) break;
    Eigen::VectorXd dir = r;
    double rr = r.squaredNorm();
    for (Eigen::Index it = 0; it < 2 * n + 2 && std::sqrt(rr) > target; ++it) {
      const Eigen::VectorXd ad = a * dir;
      const double curvature = dir.dot(ad);
      if (curvature <= 0) break;
      const double step = rr / curvature;
      z += step * dir;
      r -= step * ad;
      const double rr_next = r.squaredNorm();
      dir = r + (rr_next / rr) * dir;
      rr = rr_next;
    }
  }
  require_in_range(s, 2.0 * z);

  LowerBoundResult out;
  out.method = LowerBoundMethod::Iterative;
  out.z_star = z;
  out.gamma_lb = clamp_gamma(s.objective(z), &out.warnings);
  out.rho_lb = rho_from_stationary(s, z, &out.warnings);
  return out;
}

LowerBoundResult lower_bound(const QdSystem& s) {
  LowerBoundResult out;
  out.method = LowerBoundMethod::ClosedForm;
  out.gamma_lb = closed_form(s, &out.z_star, &out.warnings);
  out.rho_lb = rho_by_whitening(s, &out.warnings);
  return out;
}

double rho_from_gamma(double gamma, double p_y1, std::vector<std::string>* warnings) {
  if (!(p_y1 > 0 && p_y1 < 1)) throw Error(Errc::DegenerateY, "P(Y=1) must lie strictly between 0 and 1");
  const double ratio = gamma / (p_y1 * (1.0 - p_y1));
  const double squared = 1.0 - ratio;
  if (warnings && (squared < -kClampLogTol || squared > 1.0 + kClampLogTol)) {
    std::ostringstream os;
    os.precision(17);
    os << "rho_lb^2 = " << squared << " clamped into [0, 1]";
    warnings->push_back(os.str());
  }
  return std::sqrt(std::clamp(squared, 0.0, 1.0));
}

double rho_lb(const QdSystem& s) {
  if (!(s.p_y1 > 0 && s.p_y1 < 1)) throw Error(Errc::DegenerateY, "P(Y=1) must lie strictly between 0 and 1");
  return rho_by_whitening(s, nullptr);
}

DesignSystem design_matrix(const Dataset& data) {
  const auto& spec = data.spec();
  const Eigen::Index n = data.size();
  DesignSystem out{Eigen::MatrixXd::Zero(n, spec.indicator_size()), Eigen::VectorXd(n)};
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int i = 0; i < spec.p(); ++i) out.w(r, Eigen::Index{i} * spec.m() + data.x()(r, i)) = 1.0;
    out.b(r) = data.y()(r) == 1 ? 0.5 : -0.5;
  }
  return out;
}

double lsq_objective(const DesignSystem& design, const Eigen::VectorXd& z) {
  if (z.size() != design.w.cols()) throw Error(Errc::DimensionMismatch, "z length must equal p*m");
  return (design.w * z - design.b).squaredNorm();
}

}  // namespace hgr
