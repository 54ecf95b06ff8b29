#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "sonar3d/assignment.hpp"
#include "sonar3d/detection.hpp"
#include "sonar3d/sonar_image.hpp"

namespace oracle {

// Smallest of the four one-sided training-window means around (r, c), each
// summed cell by cell; infinity when every window is empty.
inline double soca_noise(const sonar3d::PolarImage& img, int r, int c, int train, int guard) {
  double best = std::numeric_limits<double>::infinity();
  const int dirs[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (const auto& d : dirs) {
    double sum = 0.0;
    int n = 0;
    for (int k = guard + 1; k <= guard + train; ++k) {
      const int rr = r + d[0] * k;
      const int cc = c + d[1] * k;
      if (rr < 0 || rr >= img.rows() || cc < 0 || cc >= img.cols()) continue;
      sum += img.at(rr, cc);
      ++n;
    }
    if (n > 0) best = std::min(best, sum / n);
  }
  return best;
}

// Sliding-window SOCA-CFAR, pixel by pixel in row-major order.
inline std::vector<std::pair<int, int>> naive_cfar(const sonar3d::PolarImage& img, int train,
                                                   int guard, double factor) {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      if (img.at(r, c) > factor * soca_noise(img, r, c, train, guard)) out.emplace_back(r, c);
    }
  }
  return out;
}

// Quadratic DBSCAN on points: returns a cluster id per point (-1 noise).
// Core components via union-find; a border point joins its nearest core
// point's component (lowest index on ties).
inline std::vector<int> naive_dbscan(const std::vector<std::pair<double, double>>& p, double eps,
                                     int min_pts) {
  const int n = static_cast<int>(p.size());
  auto d2 = [&](int i, int j) {
    const double dx = p[i].first - p[j].first;
    const double dy = p[i].second - p[j].second;
    return dx * dx + dy * dy;
  };
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<char> core(n, 0);
  for (int i = 0; i < n; ++i) {
    int count = 0;
    for (int j = 0; j < n; ++j) count += d2(i, j) <= eps * eps;
    core[i] = count >= min_pts;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (core[i] && core[j] && d2(i, j) <= eps * eps) parent[find(i)] = find(j);
    }
  }
  std::vector<int> root(n, -1);
  for (int i = 0; i < n; ++i) {
    if (core[i]) {
      root[i] = find(i);
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (core[j] && d2(i, j) <= eps * eps && d2(i, j) < best) {
        best = d2(i, j);
        root[i] = find(j);
      }
    }
  }
  return root;
}

// Minimum total cost over all injective maps between rows and columns.
// Every candidate is summed over assigned rows in row order, the same order
// assignment_cost uses, so equal assignments give bit-identical totals.
inline double brute_force_assignment(const sonar3d::CostMatrix& c) {
  const bool more_rows = c.rows > c.cols;
  const int large = more_rows ? c.rows : c.cols;
  const int small = more_rows ? c.cols : c.rows;
  std::vector<int> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> col_of_row(c.rows);
  do {
    std::fill(col_of_row.begin(), col_of_row.end(), -1);
    for (int s = 0; s < small; ++s) {
      if (more_rows) {
        col_of_row[perm[s]] = s;
      } else {
        col_of_row[s] = perm[s];
      }
    }
    double total = 0.0;
    for (int r = 0; r < c.rows; ++r) {
      if (col_of_row[r] >= 0) total += c(r, col_of_row[r]);
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Posterior over bin centres from a uniform prior and independent
// measurements, computed in log space in one pass.
inline std::vector<double> product_of_gaussians(const std::vector<double>& centres,
                                                const std::vector<double>& zs, double sigma,
                                                double floor) {
  std::vector<double> logp(centres.size(), 0.0);
  for (std::size_t k = 0; k < centres.size(); ++k) {
    for (double z : zs) {
      const double u = (centres[k] - z) / sigma;
      logp[k] += std::log(std::exp(-0.5 * u * u) + floor);
    }
  }
  const double mx = *std::max_element(logp.begin(), logp.end());
  double sum = 0.0;
  for (double& v : logp) sum += v = std::exp(v - mx);
  for (double& v : logp) v /= sum;
  return logp;
}

}  // namespace oracle
