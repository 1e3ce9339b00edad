#ifndef HGR_TIGHTNESS_HPP
#define HGR_TIGHTNESS_HPP

// Deciding whether the separable lower bound is attained within the class of
// joints sharing the given pairwise marginals, and building the attaining joint.
//
// The bound is attained iff some minimizer z of z^T Q z - d^T z + 1/4 has
// h(z) <= 1/2 and h(-z) <= 1/2, where h sums the per-block maxima of z. The
// attaining joint is then
//
//   P*(x, y) = (1/2 + (2y - 1) z^T w_x) Q(x)
//
// for any member Q(x) of the class, and P*(Y=1 | x) = 1/2 + z^T w_x is additive.

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "hgr/distributions.hpp"
#include "hgr/lowerbound.hpp"

namespace hgr {

inline constexpr double kTightTol = 1e-9;

/// Sum over blocks of the block maximum. Throws DimensionMismatch.
double h_value(const Eigen::VectorXd& z, const AlphabetSpec& spec);

enum class Verdict { Tight, NotTight };

struct TightnessCertificate {
  Verdict verdict = Verdict::NotTight;
  Eigen::VectorXd z_star;
  double h_pos = 0.0;     // h(z*)
  double h_neg = 0.0;     // h(-z*)
  double lp_value = 0.0;  // min over minimizers of max(h(z), h(-z))
  double gamma_lb = 0.0;
  double tol = kTightTol;

  bool tight() const noexcept { return verdict == Verdict::Tight; }
};

/// Searches the whole minimizer set {Q^+ d / 2 + N c} (N spans null(Q)) with an
/// LP: minimize u subject to u >= sum_i t_i, u >= sum_i s_i, t_i >= z_ik, s_i >= -z_ik.
/// Throws DegenerateY, LpFailure.
TightnessCertificate check_tightness(const QdSystem& system, double tol = kTightTol);

/// f_i tables (m x p, column i) with E[Y | X = x] ~ sum_i f_i(x_i) on the support.
struct AdditiveDecomposition {
  Eigen::MatrixXd f;
  double residual = 0.0;  // max over support of |E[Y|x] - sum_i f_i(x_i)|
  bool additive = false;  // residual <= tol

  double evaluate(const AlphabetSpec& spec, Eigen::Index state) const;
};

/// Probability-weighted least-squares fit of an additive function to E[Y | X]
/// over the support of X. Throws DegenerateY.
AdditiveDecomposition is_additive(const DiscreteJoint& joint, double tol = kTightTol);

/// Builds P* from a minimizer z* and a base joint whose X-pairwise marginals
/// match `system`. Throws HConstraintViolated, MarginalMismatch, NotStationary.
DiscreteJoint construct_additive(const Eigen::VectorXd& z_star, const DiscreteJoint& base, const QdSystem& system,
                                 double tol = kTightTol);

struct TightnessGap {
  double rho_oracle = 0.0;
  double rho_lb = 0.0;
  double gap = 0.0;
};

/// Exact HGR of `joint` against the separable bound of its own marginals.
TightnessGap tightness_gap(const DiscreteJoint& joint);

/// Fraction of `trials` random perturbations (L1 radius epsilon) of the uniform
/// joint whose marginal class passes check_tightness. `extra` joints are
/// evaluated as additional trials.
double near_uniform_probe(const AlphabetSpec& spec, double epsilon, int trials, std::uint64_t seed,
                          std::span<const DiscreteJoint> extra = {});

}  // namespace hgr

#endif  // HGR_TIGHTNESS_HPP
