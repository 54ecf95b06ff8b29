#include "sonar3d/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "sonar3d/errors.hpp"

namespace sonar3d {

Patch5x5 feature_patch(const PolarImage& normalized, const ImageFeature& f) {
  Patch5x5 p;
  p.orientation = normalized.config().orientation;
  constexpr int half = kFusionPatch / 2;
  for (int dr = -half; dr <= half; ++dr) {
    for (int dc = -half; dc <= half; ++dc) {
      const int r = f.range_bin + dr;
      const int c = f.angle_bin + dc;
      if (r < 0 || r >= normalized.rows() || c < 0 || c >= normalized.cols()) continue;
      p.at(dr + half, dc + half) = normalized.at(r, c);
    }
  }
  return p;
}

Patch5x5 rotate90(const Patch5x5& p) {
  Patch5x5 out;
  out.orientation = p.orientation;
  for (int r = 0; r < kFusionPatch; ++r) {
    for (int c = 0; c < kFusionPatch; ++c) out.at(r, c) = p.at(c, kFusionPatch - 1 - r);
  }
  return out;
}

double patch_cost(const Patch5x5& h, const Patch5x5& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < h.values.size(); ++k) {
    const double d = h.values[k] - v.values[k];
    s += d * d;
  }
  return std::sqrt(s);
}

CostMatrix range_bin_costs(const RangeBinProblem& p, const PolarImage& h_norm,
                           const PolarImage& v_norm) {
  const int n = static_cast<int>(p.h_features.size());
  const int m = static_cast<int>(p.v_features.size());
  CostMatrix costs(n, m);
  std::vector<Patch5x5> vp;
  vp.reserve(m);
  for (const auto& f : p.v_features) vp.push_back(rotate90(feature_patch(v_norm, f)));
  for (int i = 0; i < n; ++i) {
    const Patch5x5 hp = feature_patch(h_norm, p.h_features[i]);
    for (int j = 0; j < m; ++j) costs(i, j) = patch_cost(hp, vp[j]);
  }
  return costs;
}

std::vector<Association> solve_range_bin(const RangeBinProblem& p, const CostMatrix& costs) {
  std::vector<Association> out;
  if (p.h_features.empty() || p.v_features.empty()) return out;
  const auto row_to_col = solve_assignment(costs);
  for (int i = 0; i < costs.rows; ++i) {
    if (row_to_col[i] >= 0) out.push_back({i, row_to_col[i], costs(i, row_to_col[i])});
  }
  return out;
}

std::vector<Association> solve_range_bin(const RangeBinProblem& p, const PolarImage& h_norm,
                                         const PolarImage& v_norm) {
  return solve_range_bin(p, range_bin_costs(p, h_norm, v_norm));
}

double association_confidence(const CostMatrix& costs, int row) {
  if (row < 0 || row >= costs.rows) throw PreconditionError("association_confidence: bad row");
  if (costs.cols < 2) return 1.0;
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  double sum = 0.0;
  for (int j = 0; j < costs.cols; ++j) {
    const double c = costs(row, j);
    sum += c;
    if (c < best) {
      second = best;
      best = c;
    } else if (c < second) {
      second = c;
    }
  }
  if (!(sum > 0.0)) return 0.0;
  return std::clamp((second - best) / sum, 0.0, 1.0);
}

void FusionParams::validate() const {
  if (min_confidence < 0.0 || min_confidence > 1.0) {
    throw ConfigError("fusion: min_confidence must be in [0, 1]");
  }
  if (range_tolerance_bins < 0) throw ConfigError("fusion: range_tolerance_bins must be >= 0");
}

FusionResult fuse_frame(const PolarImage& h_img, const PolarImage& v_img,
                        const std::vector<ImageFeature>& h_feats,
                        const std::vector<ImageFeature>& v_feats, const FusionParams& params) {
  params.validate();
  const auto& hc = h_img.config();
  const auto& vc = v_img.config();
  if (std::abs(hc.range_resolution - vc.range_resolution) > 1e-12) {
    throw ConfigError("fusion: horizontal and vertical range resolutions differ");
  }
  const double bearing_limit = 0.5 * vc.beamwidth;
  const double elevation_limit = 0.5 * hc.beamwidth;

  std::map<int, std::vector<int>> h_by_bin;
  std::map<int, std::vector<int>> v_by_bin;
  for (int i = 0; i < static_cast<int>(h_feats.size()); ++i) {
    if (std::abs(h_feats[i].measurement.bearing) <= bearing_limit) {
      h_by_bin[h_feats[i].range_bin].push_back(i);
    }
  }
  for (int j = 0; j < static_cast<int>(v_feats.size()); ++j) {
    if (std::abs(v_feats[j].measurement.elevation) <= elevation_limit) {
      v_by_bin[v_feats[j].range_bin].push_back(j);
    }
  }

  FusionResult result;
  if (h_by_bin.empty() || v_by_bin.empty()) return result;
  const PolarImage h_norm = h_img.normalized();
  const PolarImage v_norm = v_img.normalized();

  for (const auto& [bin, h_idx] : h_by_bin) {
    RangeBinProblem problem;
    problem.range_bin = bin;
    std::vector<int> v_idx;
    for (int b = bin - params.range_tolerance_bins; b <= bin + params.range_tolerance_bins; ++b) {
      auto it = v_by_bin.find(b);
      if (it != v_by_bin.end()) v_idx.insert(v_idx.end(), it->second.begin(), it->second.end());
    }
    if (v_idx.empty()) continue;
    for (int i : h_idx) problem.h_features.push_back(h_feats[i]);
    for (int j : v_idx) problem.v_features.push_back(v_feats[j]);
    ++result.problems;

    const CostMatrix costs = range_bin_costs(problem, h_norm, v_norm);
    for (const auto& a : solve_range_bin(problem, costs)) {
      ++result.associations;
      const double confidence = association_confidence(costs, a.h);
      if (confidence < params.min_confidence) continue;
      const auto& hf = problem.h_features[a.h];
      const auto& vf = problem.v_features[a.v];
      FusedPoint fp;
      fp.range = 0.5 * (hf.measurement.range + vf.measurement.range);
      fp.bearing = hf.measurement.bearing;
      fp.elevation = vf.measurement.elevation;
      fp.confidence = confidence;
      fp.h_feature = h_idx[a.h];
      fp.v_feature = v_idx[a.v];
      result.points.push_back(fp);
    }
  }
  return result;
}

}  // namespace sonar3d
