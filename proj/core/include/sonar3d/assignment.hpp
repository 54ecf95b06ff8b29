#pragma once

#include <vector>

namespace sonar3d {

/// Dense row-major cost matrix.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/// Minimum-cost one-to-one assignment (Hungarian method with potentials,
/// O(n^2 m)). Returns the column assigned to each row, or -1 when the row
/// is left over because there are more rows than columns.
std::vector<int> solve_assignment(const CostMatrix& cost);

/// Sum of cost(r, assignment[r]) over assigned rows, in row order.
double assignment_cost(const CostMatrix& cost, const std::vector<int>& assignment);

}  // namespace sonar3d
