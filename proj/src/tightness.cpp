#include "hgr/tightness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hgr/hgr_oracle.hpp"
#include "hgr/linear_program.hpp"
#include "hgr/numerics.hpp"
#include "hgr/random.hpp"

namespace hgr {

namespace {

constexpr double kStationaryTol = 1e-8;
constexpr double kMarginalMatchTol = 1e-9;
constexpr double kMinimizerTol = 1e-9;

void require_nondegenerate(double p_y1) {
  if (!(p_y1 > 0 && p_y1 < 1)) throw Error(Errc::DegenerateY, "P(Y=1) must lie strictly between 0 and 1");
}

}  // namespace

double h_value(const Eigen::VectorXd& z, const AlphabetSpec& spec) {
  if (z.size() != spec.indicator_size()) throw Error(Errc::DimensionMismatch, "z length must equal p*m");
  double total = 0.0;
  for (int i = 0; i < spec.p(); ++i) total += z.segment(Eigen::Index{i} * spec.m(), spec.m()).maxCoeff();
  return total;
}

TightnessCertificate check_tightness(const QdSystem& s, double tol) {
  require_nondegenerate(s.p_y1);
  const int p = s.spec.p(), m = s.spec.m();
  const Eigen::Index pm = s.spec.indicator_size();

  LowerBoundResult base = lower_bound(s);
  const Eigen::VectorXd& z0 = base.z_star;
  const Eigen::MatrixXd null = nullspace_basis(s.q);
  const Eigen::Index nc = null.cols();

  // Variables: [c (nc) | t (p) | s (p) | u].
  const Eigen::Index n_var = nc + 2 * p + 1;
  const Eigen::Index t0 = nc, s0 = nc + p, u_idx = nc + 2 * p;
  LinearProgram lp = LinearProgram::with_variables(n_var);
  lp.make_free();
  lp.objective(u_idx) = 1.0;
  lp.a_ub = Eigen::MatrixXd::Zero(2 * pm + 2, n_var);
  lp.b_ub = Eigen::VectorXd::Zero(2 * pm + 2);
  for (int i = 0; i < p; ++i) {
    for (int k = 0; k < m; ++k) {
      const Eigen::Index a = Eigen::Index{i} * m + k;
      // z_a - t_i <= 0
      lp.a_ub.row(2 * a).head(nc) = null.row(a);
      lp.a_ub(2 * a, t0 + i) = -1.0;
      lp.b_ub(2 * a) = -z0(a);
      // -z_a - s_i <= 0
      lp.a_ub.row(2 * a + 1).head(nc) = -null.row(a);
      lp.a_ub(2 * a + 1, s0 + i) = -1.0;
      lp.b_ub(2 * a + 1) = z0(a);
    }
    lp.a_ub(2 * pm, t0 + i) = 1.0;
    lp.a_ub(2 * pm + 1, s0 + i) = 1.0;
  }
  lp.a_ub(2 * pm, u_idx) = -1.0;
  lp.a_ub(2 * pm + 1, u_idx) = -1.0;

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) throw Error(Errc::LpFailure, "tightness LP did not reach an optimum");

  TightnessCertificate cert;
  cert.tol = tol;
  cert.gamma_lb = base.gamma_lb;
  cert.z_star = z0 + null * sol.x.head(nc);
  cert.h_pos = h_value(cert.z_star, s.spec);
  cert.h_neg = h_value(-cert.z_star, s.spec);
  cert.lp_value = std::max(cert.h_pos, cert.h_neg);
  cert.verdict = cert.lp_value <= 0.5 + tol ? Verdict::Tight : Verdict::NotTight;
  if (cert.tight() && std::abs(s.objective(cert.z_star) - cert.gamma_lb) > kMinimizerTol)
    throw Error(Errc::LpFailure, "tightness witness drifted off the minimizer set");
  return cert;
}

double AdditiveDecomposition::evaluate(const AlphabetSpec& spec, Eigen::Index state) const {
  double v = 0.0;
  for (int i = 0; i < spec.p(); ++i) v += f(spec.label(state, i), i);
  return v;
}

AdditiveDecomposition is_additive(const DiscreteJoint& joint, double tol) {
  require_nondegenerate(joint.p_y1());
  const auto& spec = joint.spec();
  const ConditionalTable cond = conditional_expectation(joint);
  const Eigen::VectorXd px = joint.x_marginal();

  std::vector<Eigen::Index> support;
  for (Eigen::Index s = 0; s < px.size(); ++s)
    if (cond.support[s]) support.push_back(s);
  const auto rows = static_cast<Eigen::Index>(support.size());

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, spec.indicator_size());
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index s = support[r];
    const double weight = std::sqrt(px(s));
    for (int i = 0; i < spec.p(); ++i) a(r, Eigen::Index{i} * spec.m() + spec.label(s, i)) = weight;
    rhs(r) = weight * cond.value(s);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd coef = cod.solve(rhs);

  AdditiveDecomposition out;
  out.f = Eigen::Map<const Eigen::MatrixXd>(coef.data(), spec.m(), spec.p());
  for (const Eigen::Index s : support)
    out.residual = std::max(out.residual, std::abs(cond.value(s) - out.evaluate(spec, s)));
  out.additive = out.residual <= tol;
  return out;
}

DiscreteJoint construct_additive(const Eigen::VectorXd& z, const DiscreteJoint& base, const QdSystem& s, double tol) {
  const auto& spec = base.spec();
  if (!(spec == s.spec) || z.size() != spec.indicator_size())
    throw Error(Errc::DimensionMismatch, "z*, base joint and system disagree on p and m");

  const PairwiseMarginalSet base_marginals = pairwise_from_joint(base);
  const double mismatch = (base_marginals.xx - s.q).cwiseAbs().maxCoeff();
  if (mismatch > kMarginalMatchTol) {
    std::ostringstream os;
    os << "base joint X-pairwise marginals differ from the system by " << mismatch;
    throw Error(Errc::MarginalMismatch, os.str());
  }
  const double stationarity = (2.0 * s.q * z - s.d).norm();
  if (stationarity > kStationaryTol) {
    std::ostringstream os;
    os << "||2Qz - d|| = " << stationarity;
    throw Error(Errc::NotStationary, os.str());
  }
  const double hp = h_value(z, spec), hn = h_value(-z, spec);
  if (hp > 0.5 + tol || hn > 0.5 + tol) {
    std::ostringstream os;
    os.precision(17);
    os << "h(z) = " << hp << ", h(-z) = " << hn << "; P* would have negative atoms";
    throw Error(Errc::HConstraintViolated, os.str());
  }

  const Eigen::VectorXd px = base.x_marginal();
  Eigen::MatrixX2d prob(px.size(), 2);
  for (Eigen::Index st = 0; st < px.size(); ++st) {
    double lin = 0.0;
    for (int i = 0; i < spec.p(); ++i) lin += z(Eigen::Index{i} * spec.m() + spec.label(st, i));
    const double cond = std::clamp(0.5 + lin, 0.0, 1.0);
    prob(st, 1) = cond * px(st);
    prob(st, 0) = (1.0 - cond) * px(st);
  }
  return DiscreteJoint(spec, std::move(prob), kInternalTol);
}

TightnessGap tightness_gap(const DiscreteJoint& joint) {
  require_nondegenerate(joint.p_y1());
  TightnessGap out;
  out.rho_oracle = hgr_svd(flatten(joint)).rho;
  out.rho_lb = rho_lb(assemble_qd(pairwise_from_joint(joint)));
  out.gap = out.rho_oracle - out.rho_lb;
  return out;
}

double near_uniform_probe(const AlphabetSpec& spec, double epsilon, int trials, std::uint64_t seed,
                          std::span<const DiscreteJoint> extra) {
  if (!std::isfinite(epsilon) || epsilon < 0) throw Error(Errc::InvalidEpsilon, "epsilon must be finite and >= 0");
  if (trials < 1) throw Error(Errc::InvalidArgument, "trials must be >= 1");
  const DiscreteJoint uniform = uniform_joint(spec);
  auto tight = [](const DiscreteJoint& j) { return check_tightness(assemble_qd(pairwise_from_joint(j))).tight(); };

  int count = 0;
  for (int t = 0; t < trials; ++t)
    if (tight(perturb_joint(uniform, epsilon, derive_seed(seed, static_cast<std::uint64_t>(t))))) ++count;
  for (const auto& j : extra)
    if (tight(j)) ++count;
  return static_cast<double>(count) / static_cast<double>(trials + static_cast<int>(extra.size()));
}

}  // namespace hgr
