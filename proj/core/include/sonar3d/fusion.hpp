#pragma once

#include <array>
#include <vector>

#include "sonar3d/assignment.hpp"
#include "sonar3d/detection.hpp"
#include "sonar3d/geometry.hpp"
#include "sonar3d/sonar_image.hpp"

namespace sonar3d {

inline constexpr int kFusionPatch = 5;

/// 5x5 neighbourhood of a feature in an intensity-normalised image;
/// out-of-image cells are zero.
struct Patch5x5 {
  std::array<double, kFusionPatch * kFusionPatch> values{};
  SonarOrientation orientation = SonarOrientation::kHorizontal;

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * kFusionPatch + c]; }
  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * kFusionPatch + c]; }
};

Patch5x5 feature_patch(const PolarImage& normalized, const ImageFeature& f);

/// Quarter turn counter-clockwise: out(r, c) = in(c, 4 - r).
Patch5x5 rotate90(const Patch5x5& p);

/// Frobenius norm of the difference. The vertical patch is expected to be
/// rotated already.
double patch_cost(const Patch5x5& h, const Patch5x5& v);

/// Features from both images competing for association around one
/// horizontal range bin.
struct RangeBinProblem {
  int range_bin = 0;
  std::vector<ImageFeature> h_features;
  std::vector<ImageFeature> v_features;
};

struct Association {
  int h = -1;  // index into RangeBinProblem::h_features
  int v = -1;  // index into RangeBinProblem::v_features
  double cost = 0.0;
};

/// Patch costs between every horizontal (row) and vertical (column)
/// feature. Images must be normalised.
CostMatrix range_bin_costs(const RangeBinProblem& p, const PolarImage& h_norm,
                           const PolarImage& v_norm);

/// Optimal one-to-one association minimising the summed patch cost.
std::vector<Association> solve_range_bin(const RangeBinProblem& p, const CostMatrix& costs);
std::vector<Association> solve_range_bin(const RangeBinProblem& p, const PolarImage& h_norm,
                                         const PolarImage& v_norm);

/// Gap between the two smallest costs of the horizontal feature's row over
/// the row sum, clamped to [0, 1]. A single candidate gives 1 and an all-zero
/// row gives 0.
double association_confidence(const CostMatrix& costs, int row);

struct FusionParams {
  // Row-sum confidences shrink with the candidate count; with 10-25
  // candidates per row typical values are 1e-3..1e-2.
  double min_confidence = 0.002;
  int range_tolerance_bins = 1;

  void validate() const;
};

struct FusionResult {
  std::vector<FusedPoint> points;
  int problems = 0;
  int associations = 0;  // before confidence culling
};

/// Associates horizontal and vertical features inside the dual-overlap
/// window and emits fused 3D measurements. One problem is built per
/// horizontal range bin, with vertical candidates from within
/// +-range_tolerance_bins. Features outside the overlap are ignored.
FusionResult fuse_frame(const PolarImage& h_img, const PolarImage& v_img,
                        const std::vector<ImageFeature>& h_feats,
                        const std::vector<ImageFeature>& v_feats, const FusionParams& params);

}  // namespace sonar3d
