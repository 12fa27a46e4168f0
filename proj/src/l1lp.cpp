#include "fedpex/l1lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "fedpex/errors.hpp"

namespace fedpex {
namespace {

constexpr double kPivotTol = 1e-9;

// Dense simplex tableau for min c'x s.t. Ax = b, x >= 0 with b >= 0, started
// from an all-artificial basis. Columns [0, n) are structural, [n, n + m)
// artificial, and the last column holds the right-hand side.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
      : rows_(a.rows()), structural_(a.cols()), tab_(a.rows(), a.cols() + a.rows() + 1) {
    tab_.setZero();
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const double sign = b(r) < 0.0 ? -1.0 : 1.0;
      tab_.row(r).head(structural_) = sign * a.row(r);
      tab_(r, structural_ + r) = 1.0;
      tab_(r, rhs_col()) = sign * b(r);
      basis_.push_back(structural_ + r);
    }
  }

  Eigen::Index rhs_col() const { return tab_.cols() - 1; }
  bool is_artificial(Eigen::Index col) const { return col >= structural_; }

  // Bland's rule over columns [0, limit). Returns false if unbounded.
  bool optimize(const Eigen::VectorXd& cost, Eigen::Index limit) {
    for (;;) {
      std::optional<Eigen::Index> entering;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (reduced_cost(cost, j) < -kPivotTol) {
          entering = j;
          break;
        }
      }
      if (!entering) return true;

      std::optional<Eigen::Index> leaving;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows(); ++r) {
        const double coef = tab_(r, *entering);
        if (coef <= kPivotTol) continue;
        const double ratio = tab_(r, rhs_col()) / coef;
        if (ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 && leaving && basis_[r] < basis_[*leaving])) {
          best_ratio = ratio;
          leaving = r;
        }
      }
      if (!leaving) return false;
      pivot(*leaving, *entering);
    }
  }

  double objective(const Eigen::VectorXd& cost) const {
    double acc = 0.0;
    for (Eigen::Index r = 0; r < rows(); ++r) acc += cost(basis_[r]) * tab_(r, rhs_col());
    return acc;
  }

  // Pivots zero-level artificials out of the basis; drops redundant rows.
  void expel_artificials() {
    for (Eigen::Index r = rows() - 1; r >= 0; --r) {
      if (!is_artificial(basis_[r])) continue;
      std::optional<Eigen::Index> col;
      for (Eigen::Index j = 0; j < structural_; ++j) {
        if (std::abs(tab_(r, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col) {
        pivot(r, *col);
      } else {
        drop_row(r);
      }
    }
  }

  std::vector<Eigen::Index> basic_structural() const {
    std::vector<Eigen::Index> out;
    for (auto col : basis_) {
      if (!is_artificial(col)) out.push_back(col);
    }
    return out;
  }

 private:
  Eigen::Index rows() const { return static_cast<Eigen::Index>(basis_.size()); }

  double reduced_cost(const Eigen::VectorXd& cost, Eigen::Index j) const {
    double z = 0.0;
    for (Eigen::Index r = 0; r < rows(); ++r) z += cost(basis_[r]) * tab_(r, j);
    return cost(j) - z;
  }

  void pivot(Eigen::Index r, Eigen::Index col) {
    tab_.row(r) /= tab_(r, col);
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (i != r && tab_(i, col) != 0.0) tab_.row(i) -= tab_(i, col) * tab_.row(r);
    }
    basis_[r] = col;
  }

  void drop_row(Eigen::Index r) {
    const Eigen::Index last = rows() - 1;
    if (r != last) {
      tab_.row(r) = tab_.row(last);
      basis_[r] = basis_[last];
    }
    basis_.pop_back();
    tab_.conservativeResize(last, Eigen::NoChange);
  }

  Eigen::Index rows_;
  Eigen::Index structural_;
  Eigen::MatrixXd tab_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

L1Solution solve_l1(const Eigen::MatrixXd& contexts, const Eigen::VectorXd& y) {
  if (contexts.rows() != y.size()) throw ParameterError("dimension mismatch in design program");
  if (contexts.cols() < 1) throw ParameterError("no contexts");
  const double scale = y.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw ZeroTarget("design direction is zero");

  const Eigen::Index d = contexts.rows();
  const Eigen::Index k = contexts.cols();
  Eigen::MatrixXd split(d, 2 * k);
  split << contexts, -contexts;

  Tableau tab(split, y);
  const Eigen::Index total = 2 * k + d;

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
  phase1.tail(d).setOnes();
  tab.optimize(phase1, total);
  if (tab.objective(phase1) > 1e-9 * (1.0 + scale)) {
    throw InfeasibleProgram("direction is outside the span of the contexts");
  }
  tab.expel_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(total);
  phase2.head(2 * k).setOnes();
  tab.optimize(phase2, 2 * k);

  // Recompute the basic values directly from the final basis to remove
  // accumulated tableau round-off.
  const auto basic = tab.basic_structural();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * k);
  if (!basic.empty()) {
    Eigen::MatrixXd cols(d, static_cast<Eigen::Index>(basic.size()));
    for (std::size_t i = 0; i < basic.size(); ++i) {
      cols.col(static_cast<Eigen::Index>(i)) = split.col(basic[i]);
    }
    const Eigen::VectorXd xb = cols.colPivHouseholderQr().solve(y);
    for (std::size_t i = 0; i < basic.size(); ++i) {
      x(basic[i]) = std::max(0.0, xb(static_cast<Eigen::Index>(i)));
    }
  }

  L1Solution sol;
  sol.w = x.head(k) - x.tail(k);
  sol.rho = sol.w.cwiseAbs().sum();
  if (!(sol.rho > 0.0)) throw InfeasibleProgram("degenerate design solution");
  sol.p = sol.w.cwiseAbs() / sol.rho;
  return sol;
}

std::size_t informative_arm_lp(std::span<const std::uint64_t> counts, const Eigen::VectorXd& p) {
  if (static_cast<Eigen::Index>(counts.size()) != p.size()) {
    throw ParameterError("counts and distribution differ in length");
  }
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double pk = p(static_cast<Eigen::Index>(k));
    if (!(pk > kSupportTol)) continue;
    const double score = static_cast<double>(counts[k]) / pk;
    if (!best || score < best_score) {
      best = k;
      best_score = score;
    }
  }
  if (!best) throw NoSupport("selection distribution has empty support");
  return *best;
}

}  // namespace fedpex
