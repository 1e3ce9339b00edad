#ifndef HGR_DISTRIBUTIONS_HPP
#define HGR_DISTRIBUTIONS_HPP

// Joint distributions over categorical X = (X_1..X_p) and a binary Y,
// datasets, and pairwise marginal tables.
//
// X-states are encoded mixed-radix with x_1 least significant:
//   state = x_1 + m*x_2 + m^2*x_3 + ...
// Every table indexed by X-state uses this order.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgr/error.hpp"

namespace hgr {

inline constexpr double kInputTol = 1e-9;
inline constexpr double kInternalTol = 1e-12;
/// Upper bound on m^p * 2 for any operation that materializes a full joint.
inline constexpr std::int64_t kAtomCap = std::int64_t{1} << 22;

class AlphabetSpec {
 public:
  /// Throws InvalidAlphabet unless p >= 1 and m >= 2.
  AlphabetSpec(int p, int m);

  int p() const noexcept { return p_; }
  int m() const noexcept { return m_; }
  /// Length of the indicator vector w, i.e. p*m.
  Eigen::Index indicator_size() const noexcept { return Eigen::Index{p_} * m_; }

  /// True when m^p * 2 <= kAtomCap.
  bool within_atom_cap() const noexcept;
  /// m^p; throws AtomCapExceeded when the full joint would exceed the cap.
  Eigen::Index x_states() const;

  /// Label of variable i (0-based) in mixed-radix state `state`.
  int label(Eigen::Index state, int i) const noexcept;
  std::vector<int> decode(Eigen::Index state) const;
  /// Throws LabelOutOfRange for bad labels or wrong arity.
  Eigen::Index encode(const std::vector<int>& labels) const;

  friend bool operator==(const AlphabetSpec&, const AlphabetSpec&) = default;

 private:
  int p_;
  int m_;
};

/// Dense P(X = x, Y = y) over m^p x 2 atoms. Immutable once built.
class DiscreteJoint {
 public:
  /// Validates non-negativity and |sum - 1| <= tol.
  DiscreteJoint(AlphabetSpec spec, Eigen::MatrixX2d prob, double tol = kInputTol);

  const AlphabetSpec& spec() const noexcept { return spec_; }
  const Eigen::MatrixX2d& prob() const noexcept { return prob_; }
  double operator()(Eigen::Index state, int y) const { return prob_(state, y); }

  Eigen::VectorXd x_marginal() const { return prob_.rowwise().sum(); }
  double p_y1() const { return prob_.col(1).sum(); }
  /// P(Y=1) in {0,1}: allowed here, rejected by HGR operations.
  bool degenerate_y() const;

 private:
  AlphabetSpec spec_;
  Eigen::MatrixX2d prob_;
};

struct JointEntry {
  std::vector<int> x;
  int y;
  double prob;
};

/// Unlisted atoms get probability 0. Duplicate (x, y) keys are rejected.
DiscreteJoint joint_from_table(const AlphabetSpec& spec, const std::vector<JointEntry>& rows);

/// Pairwise marginal tables stored as one pm x pm block matrix plus a pm x 2 matrix.
///
/// Block (i, j) of `xx` is mu^{ij}; the diagonal block (i, i) is diag(P(X_i = k)).
/// Row i*m + k of `xy` is (P(X_i=k, Y=0), P(X_i=k, Y=1)).
/// The struct can hold inconsistent tables; see validate_marginals.
struct PairwiseMarginalSet {
  AlphabetSpec spec;
  Eigen::MatrixXd xx;
  Eigen::MatrixX2d xy;

  auto pair(int i, int j) const { return xx.block(Eigen::Index{i} * spec.m(), Eigen::Index{j} * spec.m(), spec.m(), spec.m()); }
  auto pair(int i, int j) { return xx.block(Eigen::Index{i} * spec.m(), Eigen::Index{j} * spec.m(), spec.m(), spec.m()); }
  auto with_y(int i) const { return xy.middleRows(Eigen::Index{i} * spec.m(), spec.m()); }
  auto with_y(int i) { return xy.middleRows(Eigen::Index{i} * spec.m(), spec.m()); }
};

class Dataset {
 public:
  /// x is n x p, y has n entries; throws EmptyDataset / LabelOutOfRange / DimensionMismatch.
  Dataset(AlphabetSpec spec, Eigen::MatrixXi x, Eigen::VectorXi y);

  const AlphabetSpec& spec() const noexcept { return spec_; }
  Eigen::Index size() const noexcept { return y_.size(); }
  const Eigen::MatrixXi& x() const noexcept { return x_; }
  const Eigen::VectorXi& y() const noexcept { return y_; }

 private:
  AlphabetSpec spec_;
  Eigen::MatrixXi x_;
  Eigen::VectorXi y_;
};

/// E[Y | X = x] on the support of X; `support[x]` is false where P(X=x) = 0.
struct ConditionalTable {
  AlphabetSpec spec;
  Eigen::VectorXd value;
  std::vector<bool> support;
};

PairwiseMarginalSet pairwise_from_joint(const DiscreteJoint& joint);
PairwiseMarginalSet pairwise_from_dataset(const Dataset& data);
DiscreteJoint empirical_joint(const Dataset& data);
ConditionalTable conditional_expectation(const DiscreteJoint& joint);

enum class ViolationKind { Negative, NotNormalized, Asymmetric, Inconsistent, Shape };

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const noexcept;
};

/// Necessary local conditions for a non-empty class of joints with these
/// marginals. Passing does not prove that such a joint exists.
ValidationReport validate_marginals(const PairwiseMarginalSet& marginals, double tol = kInputTol);

/// Some joint with the given pairwise marginals, found by a feasibility LP over
/// all atoms; nullopt when the class is empty. Requires the atom cap.
std::optional<DiscreteJoint> find_member(const PairwiseMarginalSet& marginals);

DiscreteJoint uniform_joint(const AlphabetSpec& spec);

/// Random zero-sum perturbation with ||result - joint||_1 <= epsilon. The step
/// is shrunk (never clipped) until every atom stays non-negative. Atoms with
/// zero mass only ever gain mass.
DiscreteJoint perturb_joint(const DiscreteJoint& joint, double epsilon, std::uint64_t seed);

/// Fixed 8-atom joint over binary X_1, X_2, Y whose pairwise class is a singleton
/// and whose conditional mean is not additive.
DiscreteJoint nontight_fixture();
/// p = 1, m = 2, Y = X_1 with P(X_1 = 0) = 1/2.
DiscreteJoint copy_fixture();

/// X uniform and E[Y | X = x] = sum_i f_i(x_i) with each f_i(k) drawn from
/// [delta/p, (1-delta)/p], so the conditional mean lies in [delta, 1-delta].
DiscreteJoint additive_fixture(const AlphabetSpec& spec, std::uint64_t seed, double delta = 0.05);

/// Same as above but returns the drawn f tables (m x p, column i is f_i).
DiscreteJoint additive_fixture(const AlphabetSpec& spec, std::uint64_t seed, double delta, Eigen::MatrixXd& f_out);

/// Applies a relabeling of variable i: new label = perm[old label].
DiscreteJoint relabel(const DiscreteJoint& joint, int i, const std::vector<int>& perm);

}  // namespace hgr

#endif  // HGR_DISTRIBUTIONS_HPP
