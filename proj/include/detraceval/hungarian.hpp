#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace detraceval {

// Cost entries equal to this are disallowed pairs.
template <typename Scalar>
inline constexpr Scalar kForbiddenCost = std::numeric_limits<Scalar>::infinity();

template <typename Scalar>
struct BasicAssignment {
  std::vector<int> row_to_col;  // -1 for unassigned rows
  Scalar cost = Scalar(0);      // sum over assigned pairs, accumulated in row order
  int cardinality = 0;
};

using Assignment = BasicAssignment<double>;

namespace detail {

// Shortest augmenting path Hungarian method with row/column potentials.
// Requires rows <= cols and finite costs; every row is assigned.
template <typename Scalar>
std::vector<int> solve_dense(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> u(n + 1, Scalar(0)), v(m + 1, Scalar(0)), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      Scalar delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const Scalar cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace detail

// Minimum-cost assignment among maximum-cardinality assignments over the
// allowed (finite) entries of a rectangular cost matrix.
template <typename Derived>
BasicAssignment<typename Derived::Scalar> hungarian(const Eigen::MatrixBase<Derived>& cost) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  BasicAssignment<Scalar> result;
  const Eigen::Index rows = cost.rows(), cols = cost.cols();
  result.row_to_col.assign(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) return result;

  const bool transpose = rows > cols;
  const Matrix c = transpose ? Matrix(cost.transpose()) : Matrix(cost);

  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi = -lo;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const Scalar x = c.data()[i];
    if (x == kForbiddenCost<Scalar>) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo > hi) return result;  // nothing allowed

  // Shift allowed costs to [0, range]; a forbidden pair costs more than any
  // full set of allowed pairs, so cardinality is maximised first.
  const Scalar range = hi - lo;
  const Scalar big = (range + Scalar(1)) * Scalar(c.rows() + 1);
  const Matrix work = c.unaryExpr([&](Scalar x) { return x == kForbiddenCost<Scalar> ? big : x - lo; });
  const std::vector<int> small_to_large = detail::solve_dense<Scalar>(work);

  for (std::size_t s = 0; s < small_to_large.size(); ++s) {
    const int l = small_to_large[s];
    if (l < 0 || c(static_cast<Eigen::Index>(s), l) == kForbiddenCost<Scalar>) continue;
    if (transpose) {
      result.row_to_col[static_cast<std::size_t>(l)] = static_cast<int>(s);
    } else {
      result.row_to_col[s] = l;
    }
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    const int j = result.row_to_col[static_cast<std::size_t>(i)];
    if (j < 0) continue;
    result.cost += cost(i, j);
    ++result.cardinality;
  }
  return result;
}

}  // namespace detraceval
