#include "hgr/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hgr/linear_program.hpp"
#include "hgr/random.hpp"

namespace hgr {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidAlphabet: return "InvalidAlphabet";
    case Errc::AtomCapExceeded: return "AtomCapExceeded";
    case Errc::NegativeProbability: return "NegativeProbability";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::DuplicateEntry: return "DuplicateEntry";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::InvalidEpsilon: return "InvalidEpsilon";
    case Errc::NonFinite: return "NonFinite";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InconsistentMarginals: return "InconsistentMarginals";
    case Errc::DInconsistentWithQ: return "DInconsistentWithQ";
    case Errc::DegenerateY: return "DegenerateY";
    case Errc::LpFailure: return "LpFailure";
    case Errc::HConstraintViolated: return "HConstraintViolated";
    case Errc::MarginalMismatch: return "MarginalMismatch";
    case Errc::NotStationary: return "NotStationary";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::InvalidRho: return "InvalidRho";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InconsistentMoments: return "InconsistentMoments";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

// AlphabetSpec -------------------------------------------------------------

AlphabetSpec::AlphabetSpec(int p, int m) : p_(p), m_(m) {
  if (p < 1) throw Error(Errc::InvalidAlphabet, "p must be >= 1");
  if (m < 2) throw Error(Errc::InvalidAlphabet, "m must be >= 2");
}

bool AlphabetSpec::within_atom_cap() const noexcept {
  std::int64_t atoms = 2;
  for (int i = 0; i < p_; ++i) {
    atoms *= m_;
    if (atoms > kAtomCap) return false;
  }
  return true;
}

Eigen::Index AlphabetSpec::x_states() const {
  if (!within_atom_cap()) {
    std::ostringstream os;
    os << "m^p * 2 exceeds " << kAtomCap << " atoms (p=" << p_ << ", m=" << m_ << ")";
    throw Error(Errc::AtomCapExceeded, os.str());
  }
  Eigen::Index n = 1;
  for (int i = 0; i < p_; ++i) n *= m_;
  return n;
}

int AlphabetSpec::label(Eigen::Index state, int i) const noexcept {
  for (int k = 0; k < i; ++k) state /= m_;
  return static_cast<int>(state % m_);
}

std::vector<int> AlphabetSpec::decode(Eigen::Index state) const {
  std::vector<int> labels(p_);
  for (int i = 0; i < p_; ++i) {
    labels[i] = static_cast<int>(state % m_);
    state /= m_;
  }
  return labels;
}

Eigen::Index AlphabetSpec::encode(const std::vector<int>& labels) const {
  if (static_cast<int>(labels.size()) != p_)
    throw Error(Errc::LabelOutOfRange, "expected " + std::to_string(p_) + " x-labels");
  Eigen::Index state = 0;
  for (int i = p_ - 1; i >= 0; --i) {
    if (labels[i] < 0 || labels[i] >= m_)
      throw Error(Errc::LabelOutOfRange, "x" + std::to_string(i + 1) + " label " + std::to_string(labels[i]));
    state = state * m_ + labels[i];
  }
  return state;
}

// DiscreteJoint ------------------------------------------------------------

DiscreteJoint::DiscreteJoint(AlphabetSpec spec, Eigen::MatrixX2d prob, double tol)
    : spec_(spec), prob_(std::move(prob)) {
  if (prob_.rows() != spec_.x_states())
    throw Error(Errc::DimensionMismatch, "joint table must have m^p rows");
  if (!prob_.allFinite()) throw Error(Errc::NonFinite, "joint table has non-finite entries");
  if (prob_.minCoeff() < 0) throw Error(Errc::NegativeProbability, "joint has a negative atom");
  const double total = prob_.sum();
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "atoms sum to " << total;
    throw Error(Errc::NotNormalized, os.str());
  }
}

bool DiscreteJoint::degenerate_y() const {
  const double p1 = p_y1();
  return p1 <= 0.0 || p1 >= 1.0;
}

DiscreteJoint joint_from_table(const AlphabetSpec& spec, const std::vector<JointEntry>& rows) {
  Eigen::MatrixX2d prob = Eigen::MatrixX2d::Zero(spec.x_states(), 2);
  std::set<std::pair<Eigen::Index, int>> seen;
  for (const auto& row : rows) {
    const Eigen::Index state = spec.encode(row.x);
    if (row.y != 0 && row.y != 1) throw Error(Errc::LabelOutOfRange, "y label " + std::to_string(row.y));
    if (!std::isfinite(row.prob)) throw Error(Errc::NonFinite, "non-finite probability");
    if (row.prob < 0) throw Error(Errc::NegativeProbability, "negative probability entry");
    if (!seen.insert({state, row.y}).second) throw Error(Errc::DuplicateEntry, "atom listed twice");
    prob(state, row.y) = row.prob;
  }
  return DiscreteJoint(spec, std::move(prob));
}

// Dataset ------------------------------------------------------------------

Dataset::Dataset(AlphabetSpec spec, Eigen::MatrixXi x, Eigen::VectorXi y)
    : spec_(spec), x_(std::move(x)), y_(std::move(y)) {
  if (y_.size() == 0) throw Error(Errc::EmptyDataset, "dataset has no rows");
  if (x_.rows() != y_.size() || x_.cols() != spec_.p())
    throw Error(Errc::DimensionMismatch, "dataset x must be n x p");
  if (x_.minCoeff() < 0 || x_.maxCoeff() >= spec_.m()) throw Error(Errc::LabelOutOfRange, "x label outside 0..m-1");
  if (y_.minCoeff() < 0 || y_.maxCoeff() > 1) throw Error(Errc::LabelOutOfRange, "y label outside {0,1}");
}

// Marginals ----------------------------------------------------------------

namespace {

PairwiseMarginalSet empty_marginals(const AlphabetSpec& spec) {
  const Eigen::Index pm = spec.indicator_size();
  return {spec, Eigen::MatrixXd::Zero(pm, pm), Eigen::MatrixX2d::Zero(pm, 2)};
}

}  // namespace

PairwiseMarginalSet pairwise_from_joint(const DiscreteJoint& joint) {
  const auto& spec = joint.spec();
  const int p = spec.p(), m = spec.m();
  PairwiseMarginalSet out = empty_marginals(spec);
  std::vector<Eigen::Index> idx(p);
  for (Eigen::Index s = 0; s < joint.prob().rows(); ++s) {
    const double mass = joint(s, 0) + joint(s, 1);
    for (int i = 0; i < p; ++i) idx[i] = Eigen::Index{i} * m + spec.label(s, i);
    for (int i = 0; i < p; ++i) {
      out.xy(idx[i], 0) += joint(s, 0);
      out.xy(idx[i], 1) += joint(s, 1);
      for (int j = 0; j < p; ++j) out.xx(idx[i], idx[j]) += mass;
    }
  }
  return out;
}

PairwiseMarginalSet pairwise_from_dataset(const Dataset& data) {
  const auto& spec = data.spec();
  const int p = spec.p(), m = spec.m();
  PairwiseMarginalSet out = empty_marginals(spec);
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    const int y = data.y()(r);
    for (int i = 0; i < p; ++i) {
      const Eigen::Index a = Eigen::Index{i} * m + data.x()(r, i);
      out.xy(a, y) += 1.0;
      for (int j = 0; j < p; ++j) out.xx(a, Eigen::Index{j} * m + data.x()(r, j)) += 1.0;
    }
  }
  const double n = static_cast<double>(data.size());
  out.xx /= n;
  out.xy /= n;
  return out;
}

DiscreteJoint empirical_joint(const Dataset& data) {
  const auto& spec = data.spec();
  Eigen::MatrixX2d counts = Eigen::MatrixX2d::Zero(spec.x_states(), 2);
  std::vector<int> labels(spec.p());
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    for (int i = 0; i < spec.p(); ++i) labels[i] = data.x()(r, i);
    counts(spec.encode(labels), data.y()(r)) += 1.0;
  }
  counts /= static_cast<double>(data.size());
  return DiscreteJoint(spec, std::move(counts), kInternalTol);
}

ConditionalTable conditional_expectation(const DiscreteJoint& joint) {
  const Eigen::Index n = joint.prob().rows();
  ConditionalTable out{joint.spec(), Eigen::VectorXd::Zero(n), std::vector<bool>(n, false)};
  for (Eigen::Index s = 0; s < n; ++s) {
    const double mass = joint(s, 0) + joint(s, 1);
    if (mass > 0) {
      out.support[s] = true;
      out.value(s) = joint(s, 1) / mass;
    }
  }
  return out;
}

bool ValidationReport::has(ViolationKind kind) const noexcept {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_marginals(const PairwiseMarginalSet& mg, double tol) {
  ValidationReport report;
  const int p = mg.spec.p();
  const Eigen::Index pm = mg.spec.indicator_size();
  auto flag = [&](ViolationKind kind, const std::string& detail) { report.violations.push_back({kind, detail}); };
  auto pair_name = [](int i, int j) { return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"; };

  if (mg.xx.rows() != pm || mg.xx.cols() != pm || mg.xy.rows() != pm) {
    flag(ViolationKind::Shape, "tables do not match p*m = " + std::to_string(pm));
    return report;
  }
  if (!mg.xx.allFinite() || !mg.xy.allFinite()) {
    flag(ViolationKind::Shape, "non-finite entries");
    return report;
  }

  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const auto t = mg.pair(i, j);
      if (t.minCoeff() < -tol) flag(ViolationKind::Negative, "mu" + pair_name(i, j) + " has a negative entry");
      if (std::abs(t.sum() - 1.0) > tol) flag(ViolationKind::NotNormalized, "mu" + pair_name(i, j) + " does not sum to 1");
      if (j > i && (t - mg.pair(j, i).transpose()).cwiseAbs().maxCoeff() > tol)
        flag(ViolationKind::Asymmetric, "mu" + pair_name(i, j) + " differs from transposed mu" + pair_name(j, i));
    }
    const auto diag = mg.pair(i, i);
    Eigen::MatrixXd off = diag;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > tol)
      flag(ViolationKind::Inconsistent, "mu" + pair_name(i, i) + " is not diagonal");
    const auto ty = mg.with_y(i);
    if (ty.minCoeff() < -tol) flag(ViolationKind::Negative, "mu" + std::to_string(i + 1) + "y has a negative entry");
    if (std::abs(ty.sum() - 1.0) > tol) flag(ViolationKind::NotNormalized, "mu" + std::to_string(i + 1) + "y does not sum to 1");
  }

  // Univariate marginals are read from the xy tables.
  for (int i = 0; i < p; ++i) {
    const Eigen::VectorXd pi = mg.with_y(i).rowwise().sum();
    if ((mg.pair(i, i).diagonal() - pi).cwiseAbs().maxCoeff() > tol)
      flag(ViolationKind::Inconsistent, "diagonal of mu" + pair_name(i, i) + " disagrees with mu" + std::to_string(i + 1) + "y");
    for (int j = 0; j < p; ++j) {
      if (i == j) continue;
      const Eigen::VectorXd pj = mg.with_y(j).rowwise().sum();
      const auto t = mg.pair(i, j);
      if ((t.rowwise().sum() - pi).cwiseAbs().maxCoeff() > tol)
        flag(ViolationKind::Inconsistent, "row sums of mu" + pair_name(i, j) + " disagree with P(X" + std::to_string(i + 1) + ")");
      if ((t.colwise().sum().transpose() - pj).cwiseAbs().maxCoeff() > tol)
        flag(ViolationKind::Inconsistent, "column sums of mu" + pair_name(i, j) + " disagree with P(X" + std::to_string(j + 1) + ")");
    }
    if (i > 0) {
      const Eigen::RowVector2d y0 = mg.with_y(0).colwise().sum();
      const Eigen::RowVector2d yi = mg.with_y(i).colwise().sum();
      if ((y0 - yi).cwiseAbs().maxCoeff() > tol)
        flag(ViolationKind::Inconsistent, "P(Y) implied by mu" + std::to_string(i + 1) + "y differs from mu1y");
    }
  }
  return report;
}

std::optional<DiscreteJoint> find_member(const PairwiseMarginalSet& mg) {
  const auto& spec = mg.spec;
  const Eigen::Index states = spec.x_states();
  const Eigen::Index atoms = 2 * states;
  const int p = spec.p(), m = spec.m();
  const Eigen::Index pm = spec.indicator_size();

  // One equality per upper-triangular xx entry (i <= j) and per xy entry.
  // Atom index = 2*state + y.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> xx_keys;
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          if (i == j && k != l) continue;
          xx_keys.push_back({Eigen::Index{i} * m + k, Eigen::Index{j} * m + l});
        }
  const Eigen::Index n_xx = static_cast<Eigen::Index>(xx_keys.size());
  LinearProgram lp = LinearProgram::with_variables(atoms);
  lp.a_eq = Eigen::MatrixXd::Zero(n_xx + 2 * pm, atoms);
  lp.b_eq.resize(n_xx + 2 * pm);
  for (Eigen::Index r = 0; r < n_xx; ++r) lp.b_eq(r) = mg.xx(xx_keys[r].first, xx_keys[r].second);
  for (Eigen::Index a = 0; a < pm; ++a) {
    lp.b_eq(n_xx + 2 * a) = mg.xy(a, 0);
    lp.b_eq(n_xx + 2 * a + 1) = mg.xy(a, 1);
  }
  std::vector<Eigen::Index> idx(p);
  for (Eigen::Index s = 0; s < states; ++s) {
    for (int i = 0; i < p; ++i) idx[i] = Eigen::Index{i} * m + spec.label(s, i);
    for (Eigen::Index r = 0; r < n_xx; ++r) {
      const auto [a, b] = xx_keys[r];
      const int i = static_cast<int>(a / m), j = static_cast<int>(b / m);
      if (idx[i] == a && idx[j] == b) {
        lp.a_eq(r, 2 * s) = 1.0;
        lp.a_eq(r, 2 * s + 1) = 1.0;
      }
    }
    for (int i = 0; i < p; ++i) {
      lp.a_eq(n_xx + 2 * idx[i], 2 * s) = 1.0;
      lp.a_eq(n_xx + 2 * idx[i] + 1, 2 * s + 1) = 1.0;
    }
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  if (lp_infeasibility(lp, sol.x) > kInputTol) return std::nullopt;
  Eigen::MatrixX2d prob(states, 2);
  for (Eigen::Index s = 0; s < states; ++s) {
    prob(s, 0) = std::max(0.0, sol.x(2 * s));
    prob(s, 1) = std::max(0.0, sol.x(2 * s + 1));
  }
  prob /= prob.sum();
  return DiscreteJoint(spec, std::move(prob), kInputTol);
}

// Fixtures -----------------------------------------------------------------

DiscreteJoint uniform_joint(const AlphabetSpec& spec) {
  const Eigen::Index states = spec.x_states();
  return DiscreteJoint(spec, Eigen::MatrixX2d::Constant(states, 2, 1.0 / (2.0 * states)), kInternalTol);
}

DiscreteJoint perturb_joint(const DiscreteJoint& joint, double epsilon, std::uint64_t seed) {
  if (!std::isfinite(epsilon) || epsilon < 0) throw Error(Errc::InvalidEpsilon, "epsilon must be finite and >= 0");
  if (epsilon == 0) return joint;

  const Eigen::MatrixX2d& base = joint.prob();
  const Eigen::Index n = base.size();
  Eigen::VectorXd v(n);
  Rng rng(seed);
  Eigen::Index support = 0;
  double support_sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = rng.uniform(-1.0, 1.0);
    if (base.data()[k] > 0) {
      ++support;
      support_sum += v(k);
    } else {
      v(k) = std::abs(v(k));
      support_sum += v(k);
    }
  }
  // Zero-sum: remove the total from the support atoms only.
  for (Eigen::Index k = 0; k < n; ++k)
    if (base.data()[k] > 0) v(k) -= support_sum / static_cast<double>(support);

  const double l1 = v.lpNorm<1>();
  if (l1 == 0) return joint;
  v *= epsilon / l1;
  double shrink = 1.0;
  for (Eigen::Index k = 0; k < n; ++k)
    if (v(k) < 0) shrink = std::min(shrink, base.data()[k] / -v(k));
  v *= shrink;

  Eigen::MatrixX2d prob = base;
  for (Eigen::Index k = 0; k < n; ++k) prob.data()[k] = std::max(0.0, prob.data()[k] + v(k));
  return DiscreteJoint(joint.spec(), std::move(prob), kInternalTol);
}

DiscreteJoint nontight_fixture() {
  const AlphabetSpec spec(2, 2);
  return joint_from_table(spec, {
                                    {{0, 0}, 0, 0.0},
                                    {{0, 0}, 1, 0.1},
                                    {{1, 0}, 0, 0.2},
                                    {{1, 0}, 1, 0.2},
                                    {{0, 1}, 0, 0.1},
                                    {{0, 1}, 1, 0.3},
                                    {{1, 1}, 0, 0.1},
                                    {{1, 1}, 1, 0.0},
                                });
}

DiscreteJoint copy_fixture() {
  return joint_from_table(AlphabetSpec(1, 2), {{{0}, 0, 0.5}, {{1}, 1, 0.5}});
}

DiscreteJoint additive_fixture(const AlphabetSpec& spec, std::uint64_t seed, double delta, Eigen::MatrixXd& f_out) {
  if (!(delta >= 0 && delta < 0.5)) throw Error(Errc::InvalidArgument, "delta must lie in [0, 1/2)");
  const int p = spec.p(), m = spec.m();
  Rng rng(seed);
  f_out.resize(m, p);
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < m; ++k) f_out(k, i) = rng.uniform(delta / p, (1.0 - delta) / p);

  const Eigen::Index states = spec.x_states();
  const double px = 1.0 / static_cast<double>(states);
  Eigen::MatrixX2d prob(states, 2);
  for (Eigen::Index s = 0; s < states; ++s) {
    double mean = 0.0;
    for (int i = 0; i < p; ++i) mean += f_out(spec.label(s, i), i);
    mean = std::clamp(mean, delta, 1.0 - delta);
    prob(s, 0) = (1.0 - mean) * px;
    prob(s, 1) = mean * px;
  }
  return DiscreteJoint(spec, std::move(prob), kInternalTol);
}

DiscreteJoint additive_fixture(const AlphabetSpec& spec, std::uint64_t seed, double delta) {
  Eigen::MatrixXd f;
  return additive_fixture(spec, seed, delta, f);
}

DiscreteJoint relabel(const DiscreteJoint& joint, int i, const std::vector<int>& perm) {
  const auto& spec = joint.spec();
  if (i < 0 || i >= spec.p() || static_cast<int>(perm.size()) != spec.m())
    throw Error(Errc::DimensionMismatch, "relabel: bad variable index or permutation size");
  std::vector<int> check = perm;
  std::sort(check.begin(), check.end());
  for (int k = 0; k < spec.m(); ++k)
    if (check[k] != k) throw Error(Errc::InvalidArgument, "relabel: not a permutation");

  Eigen::MatrixX2d prob(joint.prob().rows(), 2);
  for (Eigen::Index s = 0; s < joint.prob().rows(); ++s) {
    auto labels = spec.decode(s);
    labels[i] = perm[labels[i]];
    prob.row(spec.encode(labels)) = joint.prob().row(s);
  }
  return DiscreteJoint(spec, std::move(prob), kInternalTol);
}

}  // namespace hgr
