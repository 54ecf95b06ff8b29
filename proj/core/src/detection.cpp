#include "sonar3d/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "sonar3d/errors.hpp"

namespace sonar3d {
namespace {

// Mean of cells [lo, hi] along one axis from a prefix-sum row/column.
struct SideMean {
  double sum = 0.0;
  int count = 0;
};

SideMean side(const std::vector<double>& prefix, int lo, int hi, int n) {
  lo = std::max(lo, 0);
  hi = std::min(hi, n - 1);
  if (hi < lo) return {};
  return {prefix[hi + 1] - prefix[lo], hi - lo + 1};
}

double smallest_mean(std::initializer_list<SideMean> sides) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : sides) {
    if (s.count > 0) best = std::min(best, s.sum / s.count);
  }
  return best;
}

using Cell = std::pair<std::int64_t, std::int64_t>;

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    return static_cast<std::size_t>(static_cast<std::uint64_t>(c.first) * 0x9E3779B97F4A7C15ULL ^
                                    static_cast<std::uint64_t>(c.second));
  }
};

void check_window(const PolarImage& img, const CfarParams& params) {
  params.validate();
  const int reach = params.guard_cells + params.train_cells;
  if (reach >= img.rows() || reach >= img.cols()) {
    throw ConfigError("cfar: guard + train cells exceed the image size");
  }
}

}  // namespace

void CfarParams::validate() const {
  if (train_cells < 1 || guard_cells < 1) {
    throw ConfigError("cfar: train_cells and guard_cells must be >= 1");
  }
  if (!(threshold_factor > 0.0)) throw ConfigError("cfar: threshold_factor must be positive");
}

void DbscanParams::validate() const {
  if (!(eps > 0.0)) throw ConfigError("dbscan: eps must be positive");
  if (min_pts < 1) throw ConfigError("dbscan: min_pts must be >= 1");
}

std::vector<ImageFeature> soca_cfar(const PolarImage& img, const CfarParams& params) {
  check_window(img, params);
  const int rows = img.rows();
  const int cols = img.cols();
  const int g = params.guard_cells;
  const int t = params.train_cells;
  const auto& cfg = img.config();

  // prefix sums per column (range axis) and per row (angle axis)
  std::vector<std::vector<double>> col_prefix(cols, std::vector<double>(rows + 1, 0.0));
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) col_prefix[c][r + 1] = col_prefix[c][r] + img.at(r, c);
  }
  std::vector<double> row_prefix(cols + 1, 0.0);

  std::vector<ImageFeature> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) row_prefix[c + 1] = row_prefix[c] + img.at(r, c);
    for (int c = 0; c < cols; ++c) {
      const double noise = smallest_mean({side(col_prefix[c], r - g - t, r - g - 1, rows),
                                          side(col_prefix[c], r + g + 1, r + g + t, rows),
                                          side(row_prefix, c - g - t, c - g - 1, cols),
                                          side(row_prefix, c + g + 1, c + g + t, cols)});
      const double value = img.at(r, c);
      if (!(value > params.threshold_factor * noise)) continue;
      ImageFeature f;
      f.range_bin = r;
      f.angle_bin = c;
      f.measurement.range = cfg.range_of_bin(r);
      f.measurement.intensity = value;
      if (cfg.orientation == SonarOrientation::kHorizontal) {
        f.measurement.bearing = cfg.angle_of_bin(c);
      } else {
        f.measurement.elevation = cfg.angle_of_bin(c);
      }
      out.push_back(f);
    }
  }
  return out;
}

std::pair<double, double> planar_projection(const ImageFeature& f, SonarOrientation orientation) {
  const double a = orientation == SonarOrientation::kHorizontal ? f.measurement.bearing
                                                                : f.measurement.elevation;
  return {f.measurement.range * std::cos(a), f.measurement.range * std::sin(a)};
}

std::vector<FeatureCluster> cluster_features(const std::vector<ImageFeature>& features,
                                             SonarOrientation orientation,
                                             const DbscanParams& params) {
  params.validate();
  const int n = static_cast<int>(features.size());
  std::vector<std::pair<double, double>> xy(n);
  for (int i = 0; i < n; ++i) xy[i] = planar_projection(features[i], orientation);

  // canonical order makes the result independent of the input permutation
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& fa = features[a];
    const auto& fb = features[b];
    if (fa.range_bin != fb.range_bin) return fa.range_bin < fb.range_bin;
    if (fa.angle_bin != fb.angle_bin) return fa.angle_bin < fb.angle_bin;
    if (xy[a] != xy[b]) return xy[a] < xy[b];
    return a < b;
  });
  std::vector<int> rank(n);
  for (int k = 0; k < n; ++k) rank[order[k]] = k;

  // spatial hash with eps-sized cells
  const double eps = params.eps;
  const double eps2 = eps * eps;
  auto cell_of = [&](int i) {
    return std::pair<std::int64_t, std::int64_t>{
        static_cast<std::int64_t>(std::floor(xy[i].first / eps)),
        static_cast<std::int64_t>(std::floor(xy[i].second / eps))};
  };
  std::unordered_map<Cell, std::vector<int>, CellHash> grid;
  for (int k = 0; k < n; ++k) {
    const auto [ci, cj] = cell_of(order[k]);
    grid[{ci, cj}].push_back(order[k]);
  }
  auto neighbours = [&](int i) {
    std::vector<int> out;
    const auto [ci, cj] = cell_of(i);
    for (std::int64_t di = -1; di <= 1; ++di) {
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = grid.find({ci + di, cj + dj});
        if (it == grid.end()) continue;
        for (int j : it->second) {
          const double dx = xy[i].first - xy[j].first;
          const double dy = xy[i].second - xy[j].second;
          if (dx * dx + dy * dy <= eps2) out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end(), [&](int a, int b) { return rank[a] < rank[b]; });
    return out;
  };

  std::vector<std::vector<int>> adjacency(n);
  std::vector<char> core(n, 0);
  for (int i = 0; i < n; ++i) {
    adjacency[i] = neighbours(i);
    core[i] = static_cast<int>(adjacency[i].size()) >= params.min_pts;
  }

  constexpr int kNone = -1;
  std::vector<int> label(n, kNone);
  int next_label = 0;
  for (int k = 0; k < n; ++k) {
    const int seed = order[k];
    if (!core[seed] || label[seed] != kNone) continue;
    std::vector<int> stack{seed};
    label[seed] = next_label;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j : adjacency[i]) {
        if (core[j] && label[j] == kNone) {
          label[j] = next_label;
          stack.push_back(j);
        }
      }
    }
    ++next_label;
  }

  // border points follow their nearest core neighbour (rank breaks ties)
  for (int i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int j : adjacency[i]) {
      if (!core[j]) continue;
      const double dx = xy[i].first - xy[j].first;
      const double dy = xy[i].second - xy[j].second;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        label[i] = label[j];
      }
    }
  }

  // clusters were numbered in canonical order of their first core seed;
  // renumber by their first member so border points cannot reorder them
  std::vector<int> first_rank(next_label, n);
  for (int i = 0; i < n; ++i) {
    if (label[i] != kNone) first_rank[label[i]] = std::min(first_rank[label[i]], rank[i]);
  }
  std::vector<int> by_first(next_label);
  std::iota(by_first.begin(), by_first.end(), 0);
  std::sort(by_first.begin(), by_first.end(),
            [&](int a, int b) { return first_rank[a] < first_rank[b]; });
  std::vector<int> position(next_label);
  for (int p = 0; p < next_label; ++p) position[by_first[p]] = p;

  std::vector<FeatureCluster> clusters(next_label);
  for (auto& c : clusters) c.orientation = orientation;
  for (int k = 0; k < n; ++k) {
    const int i = order[k];
    if (label[i] == kNone) continue;
    auto& c = clusters[position[label[i]]];
    c.features.push_back(features[i]);
    c.indices.push_back(i);
  }
  return clusters;
}

std::vector<FeatureCluster> filter_clusters(std::vector<FeatureCluster> clusters, int min_size) {
  if (min_size < 1) throw PreconditionError("filter_clusters: n must be >= 1");
  std::erase_if(clusters, [&](const FeatureCluster& c) {
    return static_cast<int>(c.features.size()) < min_size;
  });
  return clusters;
}

}  // namespace sonar3d
