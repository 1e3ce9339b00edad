#include "hgr/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hgr/error.hpp"

namespace hgr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-11;
constexpr int kMaxIterations = 200000;

// x_j = offset_j + sum over terms of coef * y_k, with y >= 0.
struct VariableMap {
  double offset = 0.0;
  std::vector<std::pair<Eigen::Index, double>> terms;
};

struct StandardForm {
  Eigen::MatrixXd a;  // rows x cols, y >= 0
  Eigen::VectorXd b;  // >= 0 after sign normalization
  Eigen::VectorXd c;
  double c_offset = 0.0;
  std::vector<VariableMap> maps;
  std::vector<Eigen::Index> slack_of_row;  // -1 when the row has no slack
};

StandardForm to_standard_form(const LinearProgram& lp) {
  const Eigen::Index n = lp.variables();
  const Eigen::VectorXd lower = lp.lower.size() ? lp.lower : Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd upper = lp.upper.size() ? lp.upper : Eigen::VectorXd::Constant(n, kInf);

  StandardForm sf;
  sf.maps.resize(n);
  Eigen::Index cols = 0;
  std::vector<std::pair<Eigen::Index, double>> bound_rows;  // (y index, width)
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = lower(j), hi = upper(j);
    if (std::isnan(lo) || std::isnan(hi) || lo == kInf || hi == -kInf)
      throw Error(Errc::NonFinite, "invalid variable bound");
    auto& map = sf.maps[j];
    if (std::isfinite(lo)) {
      map.offset = lo;
      map.terms.push_back({cols, 1.0});
      if (std::isfinite(hi)) bound_rows.push_back({cols, hi - lo});
      ++cols;
    } else if (std::isfinite(hi)) {
      map.offset = hi;
      map.terms.push_back({cols++, -1.0});
    } else {
      map.terms.push_back({cols++, 1.0});
      map.terms.push_back({cols++, -1.0});
    }
  }

  const Eigen::Index n_ub = lp.a_ub.rows();
  const Eigen::Index n_eq = lp.a_eq.rows();
  const Eigen::Index n_bd = static_cast<Eigen::Index>(bound_rows.size());
  const Eigen::Index rows = n_ub + n_eq + n_bd;
  const Eigen::Index slack_cols = n_ub + n_bd;
  const Eigen::Index total = cols + slack_cols;

  Eigen::VectorXd offset(n);
  for (Eigen::Index j = 0; j < n; ++j) offset(j) = sf.maps[j].offset;

  auto expand = [&](const Eigen::MatrixXd& a) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), total);
    for (Eigen::Index j = 0; j < n; ++j)
      for (const auto& [k, coef] : sf.maps[j].terms) out.col(k) += coef * a.col(j);
    return out;
  };

  sf.a = Eigen::MatrixXd::Zero(rows, total);
  sf.b = Eigen::VectorXd::Zero(rows);
  sf.slack_of_row.assign(rows, -1);
  if (n_ub) {
    sf.a.topRows(n_ub) = expand(lp.a_ub);
    sf.b.head(n_ub) = lp.b_ub - lp.a_ub * offset;
  }
  if (n_eq) {
    sf.a.middleRows(n_ub, n_eq) = expand(lp.a_eq);
    sf.b.segment(n_ub, n_eq) = lp.b_eq - lp.a_eq * offset;
  }
  for (Eigen::Index r = 0; r < n_bd; ++r) {
    sf.a(n_ub + n_eq + r, bound_rows[r].first) = 1.0;
    sf.b(n_ub + n_eq + r) = bound_rows[r].second;
  }
  Eigen::Index slack = cols;
  for (Eigen::Index r = 0; r < n_ub; ++r) {
    sf.a(r, slack) = 1.0;
    sf.slack_of_row[r] = slack++;
  }
  for (Eigen::Index r = 0; r < n_bd; ++r) {
    sf.a(n_ub + n_eq + r, slack) = 1.0;
    sf.slack_of_row[n_ub + n_eq + r] = slack++;
  }

  for (Eigen::Index r = 0; r < rows; ++r) {
    if (sf.b(r) < 0) {
      sf.a.row(r) *= -1.0;
      sf.b(r) *= -1.0;
      sf.slack_of_row[r] = -1;  // slack now has coefficient -1
    }
  }

  sf.c = Eigen::VectorXd::Zero(total);
  for (Eigen::Index j = 0; j < n; ++j)
    for (const auto& [k, coef] : sf.maps[j].terms) sf.c(k) += coef * lp.objective(j);
  sf.c_offset = lp.objective.dot(offset);
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf, Eigen::Index artificial_count)
      : rows_(sf.a.rows()), structural_(sf.a.cols()), cols_(structural_ + artificial_count),
        t_(Eigen::MatrixXd::Zero(rows_ + 1, cols_ + 1)), basis_(rows_, -1) {
    t_.topLeftCorner(rows_, structural_) = sf.a;
    t_.topRightCorner(rows_, 1) = sf.b;
  }

  Eigen::MatrixXd& data() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  double rhs(Eigen::Index r) const { return t_(r, cols_); }
  double objective_value() const { return -t_(rows_, cols_); }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  /// Sets the cost row to `cost` reduced against the current basis.
  void set_cost(const Eigen::VectorXd& cost) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(cost.size()) = cost.transpose();
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const double f = t_(rows_, basis_[r]);
      if (f != 0.0) t_.row(rows_) -= f * t_.row(r);
    }
  }

  enum class Outcome { Optimal, Unbounded };

  /// Bland's rule; columns >= `enter_limit` never enter.
  Outcome run(Eigen::Index enter_limit) {
    for (int it = 0; it < kMaxIterations; ++it) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < enter_limit; ++c) {
        if (t_(rows_, c) < -kCostEps) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return Outcome::Optimal;
      Eigen::Index leave = -1;
      double best = kInf;
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotEps) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave >= 0 && basis_[r] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave < 0) return Outcome::Unbounded;
      pivot(leave, enter);
    }
    throw Error(Errc::LpFailure, "simplex iteration limit reached");
  }

 private:
  Eigen::Index rows_;
  Eigen::Index structural_;
  Eigen::Index cols_;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

void check_dimensions(const LinearProgram& lp) {
  const Eigen::Index n = lp.variables();
  auto bad = [&](bool cond, const char* what) {
    if (cond) throw Error(Errc::DimensionMismatch, what);
  };
  bad(lp.a_ub.rows() != lp.b_ub.size(), "a_ub rows vs b_ub");
  bad(lp.a_ub.rows() > 0 && lp.a_ub.cols() != n, "a_ub columns vs objective");
  bad(lp.a_eq.rows() != lp.b_eq.size(), "a_eq rows vs b_eq");
  bad(lp.a_eq.rows() > 0 && lp.a_eq.cols() != n, "a_eq columns vs objective");
  bad(lp.lower.size() != 0 && lp.lower.size() != n, "lower bound length");
  bad(lp.upper.size() != 0 && lp.upper.size() != n, "upper bound length");
  if (!lp.objective.allFinite() || !lp.a_ub.allFinite() || !lp.b_ub.allFinite() || !lp.a_eq.allFinite() ||
      !lp.b_eq.allFinite())
    throw Error(Errc::NonFinite, "linear program has non-finite data");
}

}  // namespace

LinearProgram LinearProgram::with_variables(Eigen::Index n) {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.a_ub.resize(0, n);
  lp.a_eq.resize(0, n);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, kInf);
  return lp;
}

void LinearProgram::make_free() {
  lower = Eigen::VectorXd::Constant(variables(), -kInf);
  upper = Eigen::VectorXd::Constant(variables(), kInf);
}

LpSolution solve_lp(const LinearProgram& lp) {
  check_dimensions(lp);
  const StandardForm sf = to_standard_form(lp);
  const Eigen::Index rows = sf.a.rows();
  const Eigen::Index structural = sf.a.cols();

  Eigen::Index artificial_count = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    if (sf.slack_of_row[r] < 0) ++artificial_count;

  Tableau tab(sf, artificial_count);
  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(tab.cols());
  {
    Eigen::Index art = structural;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (sf.slack_of_row[r] >= 0) {
        tab.basis()[r] = sf.slack_of_row[r];
      } else {
        tab.data()(r, art) = 1.0;
        tab.basis()[r] = art;
        phase1_cost(art) = 1.0;
        ++art;
      }
    }
  }

  const double scale = std::max(1.0, sf.b.size() ? sf.b.cwiseAbs().maxCoeff() : 0.0);
  std::vector<bool> redundant(rows, false);
  if (artificial_count > 0) {
    tab.set_cost(phase1_cost);
    tab.run(tab.cols());
    if (tab.objective_value() > 1e-9 * scale) return {LpStatus::Infeasible, {}, {}};
    // Pivot remaining zero-level artificials out of the basis.
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (tab.basis()[r] < structural) continue;
      Eigen::Index best = -1;
      double best_abs = 1e-9;
      for (Eigen::Index c = 0; c < structural; ++c) {
        if (std::abs(tab.data()(r, c)) > best_abs) {
          best_abs = std::abs(tab.data()(r, c));
          best = c;
        }
      }
      if (best >= 0)
        tab.pivot(r, best);
      else
        redundant[r] = true;
    }
  }

  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(tab.cols());
  phase2_cost.head(structural) = sf.c;
  tab.set_cost(phase2_cost);
  if (tab.run(structural) == Tableau::Outcome::Unbounded) return {LpStatus::Unbounded, {}, {}};

  // Re-solve B y_B = b on the original data for the final basis.
  std::vector<Eigen::Index> keep_rows, basic_cols;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (redundant[r]) continue;
    keep_rows.push_back(r);
    basic_cols.push_back(tab.basis()[r]);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(structural);
  for (Eigen::Index r = 0; r < rows; ++r)
    if (!redundant[r] && tab.basis()[r] < structural) y(tab.basis()[r]) = std::max(0.0, tab.rhs(r));
  if (!keep_rows.empty()) {
    const auto k = static_cast<Eigen::Index>(keep_rows.size());
    Eigen::MatrixXd basis_matrix(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      rhs(i) = sf.b(keep_rows[i]);
      for (Eigen::Index j = 0; j < k; ++j) basis_matrix(i, j) = sf.a(keep_rows[i], basic_cols[j]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
    if (lu.isInvertible()) {
      const Eigen::VectorXd yb = lu.solve(rhs);
      if (yb.allFinite() && yb.minCoeff() > -1e-9 * scale) {
        y.setZero();
        for (Eigen::Index j = 0; j < k; ++j) y(basic_cols[j]) = std::max(0.0, yb(j));
      }
    }
  }

  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.x.resize(lp.variables());
  for (Eigen::Index j = 0; j < lp.variables(); ++j) {
    double v = sf.maps[j].offset;
    for (const auto& [idx, coef] : sf.maps[j].terms) v += coef * y(idx);
    sol.x(j) = v;
  }
  sol.value = lp.objective.dot(sol.x);
  return sol;
}

double lp_infeasibility(const LinearProgram& lp, const Eigen::VectorXd& x) {
  double worst = 0.0;
  if (lp.a_ub.rows()) worst = std::max(worst, (lp.a_ub * x - lp.b_ub).maxCoeff());
  if (lp.a_eq.rows()) worst = std::max(worst, (lp.a_eq * x - lp.b_eq).cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    worst = std::max(worst, (lp.lower.size() ? lp.lower(j) : 0.0) - x(j));
    if (lp.upper.size()) worst = std::max(worst, x(j) - lp.upper(j));
  }
  return worst;
}

}  // namespace hgr
