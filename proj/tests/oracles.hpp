#pragma once

// Independent reference computations for tests. None of these call into the
// library's solvers; they use brute force or closed forms.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

/// Determinant by cofactor expansion along the first row.
inline double cofactor_det(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  double det = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::MatrixXd minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index cc = 0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == c) continue;
        minor(r - 1, cc++) = a(r, k);
      }
    }
    det += ((c % 2 == 0) ? 1.0 : -1.0) * a(0, c) * cofactor_det(minor);
  }
  return det;
}

/// Gauss-Jordan inverse with partial pivoting.
inline Eigen::MatrixXd gauss_jordan_inverse(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    a.row(c).swap(a.row(piv));
    inv.row(c).swap(inv.row(piv));
    const double d = a(c, c);
    a.row(c) /= d;
    inv.row(c) /= d;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      a.row(r) -= f * a.row(c);
      inv.row(r) -= f * inv.row(c);
    }
  }
  return inv;
}

/// Optimal value of min sum|w| s.t. X w = y by enumerating every basic
/// feasible solution of the split program min 1'(u+v), [X -X][u;v] = y,
/// u, v >= 0. Empty when infeasible.
inline std::optional<double> l1_brute_force(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index d = x.rows();
  const Eigen::Index k = x.cols();
  Eigen::MatrixXd a(d, 2 * k);
  a << x, -x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  const Eigen::Index rank = lu.rank();
  const Eigen::Index n = 2 * k;
  if (rank == 0) {
    if (y.norm() < 1e-12) return 0.0;
    return std::nullopt;
  }

  std::optional<double> best;
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(rank));
  for (Eigen::Index i = 0; i < rank; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    Eigen::MatrixXd sub(d, rank);
    for (Eigen::Index i = 0; i < rank; ++i) sub.col(i) = a.col(pick[static_cast<std::size_t>(i)]);
    Eigen::FullPivLU<Eigen::MatrixXd> sub_lu(sub);
    sub_lu.setThreshold(1e-10);
    if (sub_lu.rank() == rank) {
      const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(y);
      const double resid = (sub * z - y).lpNorm<Eigen::Infinity>();
      if (resid <= 1e-9 * (1.0 + y.lpNorm<Eigen::Infinity>()) && z.minCoeff() >= -1e-12) {
        const double obj = z.sum();
        if (!best || obj < *best) best = obj;
      }
    }
    // Next combination of `rank` columns out of n.
    Eigen::Index i = rank - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - rank + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < rank; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

/// Exploration bonus evaluated in long double straight from its closed form.
inline long double mab_bonus(long double count, long double count_sum, long double arms,
                             long double delta, long double sigma, long double gamma_m) {
  const long double arg = (4.0L * arms / delta) * std::pow((1.0L + gamma_m) * count_sum, 2.0L);
  return sigma * std::sqrt((2.0L / count) * std::log(arg));
}

/// 2 (M + 1/gamma) log2(tau) in long double.
inline long double mab_comm_bound(long double agents, long double gamma, long double tau) {
  return 2.0L * (agents + 1.0L / gamma) * std::log2(tau);
}

inline long double linear_comm_bound(long double agents, long double g1, long double g2,
                                     long double dim, long double lambda, long double tau) {
  return 2.0L * ((agents + 1.0L / g1) * dim * std::log2(1.0L + tau / (lambda * dim)) +
                 (agents + 1.0L / g2) * std::log2(tau));
}

/// Radius sqrt(l) + (sqrt(2 g1) M + sqrt(1 + g1 M)) s sqrt(d log((2/delta)(1 + (1+g2 M) T/(min(g1,1) l)))).
inline long double c_radius(long double count_sum, long double dim, long double delta,
                            long double sigma, long double lambda, long double g1, long double g2,
                            long double agents) {
  const long double inner =
      (2.0L / delta) * (1.0L + (1.0L + g2 * agents) * count_sum / (std::min(g1, 1.0L) * lambda));
  return std::sqrt(lambda) + (std::sqrt(2.0L * g1) * agents + std::sqrt(1.0L + g1 * agents)) *
                                 sigma * std::sqrt(dim * std::log(inner));
}

}  // namespace oracle
