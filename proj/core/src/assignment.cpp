#include "sonar3d/assignment.hpp"

#include <limits>

namespace sonar3d {
namespace {

// Requires n <= m. a is 1-based with a dummy row/column 0.
std::vector<int> hungarian(int n, int m, const auto& a) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
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

}  // namespace

std::vector<int> solve_assignment(const CostMatrix& cost) {
  if (cost.rows == 0 || cost.cols == 0) return std::vector<int>(cost.rows, -1);
  if (cost.rows <= cost.cols) {
    return hungarian(cost.rows, cost.cols, [&](int i, int j) { return cost(i - 1, j - 1); });
  }
  // transpose so the smaller side is the row side
  const auto col_to_row =
      hungarian(cost.cols, cost.rows, [&](int i, int j) { return cost(j - 1, i - 1); });
  std::vector<int> row_to_col(cost.rows, -1);
  for (int c = 0; c < cost.cols; ++c) {
    if (col_to_row[c] >= 0) row_to_col[col_to_row[c]] = c;
  }
  return row_to_col;
}

double assignment_cost(const CostMatrix& cost, const std::vector<int>& assignment) {
  double total = 0.0;
  for (int r = 0; r < cost.rows; ++r) {
    if (assignment[r] >= 0) total += cost(r, assignment[r]);
  }
  return total;
}

}  // namespace sonar3d
