#pragma once

#include <vector>

namespace sonar3d {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using PointSet2D = std::vector<Point2>;

/// Rigid 2D transform p' = R(rotation) p + translation, plus the outcome of
/// the registration that produced it.
struct Transform2D {
  double rotation = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double residual = 0.0;  // mean inlier nearest-neighbour distance
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;

  Point2 apply(const Point2& p) const;
  Point2 apply_inverse(const Point2& p) const;
  /// this after other: p -> this(other(p)).
  Transform2D compose(const Transform2D& other) const;

  static Transform2D identity() { return {}; }
  static Transform2D from(double rotation, double tx, double ty);
};

PointSet2D transform_points(const Transform2D& t, const PointSet2D& points);

/// Static 2D k-d tree for nearest-neighbour queries.
class KdTree2D {
 public:
  explicit KdTree2D(const PointSet2D& points);
  /// Index of the nearest point and its squared distance.
  std::pair<int, double> nearest(const Point2& q) const;
  bool empty() const { return nodes_.empty(); }

 private:
  struct Node {
    int point = -1;
    int left = -1;
    int right = -1;
    int axis = 0;
  };
  int build(std::vector<int>& idx, int lo, int hi, int depth);
  void search(int node, const Point2& q, int& best, double& best_d2) const;

  PointSet2D points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

struct IcpParams {
  int max_iters = 50;
  double tolerance = 1e-4;      // [m] stop when the residual improves by less
  double reject_factor = 3.0;   // drop pairs beyond this multiple of the median distance
  // Extra starts spread over +-rotation_span about the source centroid, each
  // with the centroids aligned. 0 runs from the given init only.
  int rotation_starts = 17;
  double rotation_span = 0.5;   // [rad]

  void validate() const;
};

/// True when every point lies within `tolerance` of a common line.
bool is_collinear(const PointSet2D& points, double tolerance = 1e-6);

/// Point-to-point ICP. Each iteration matches every transformed source
/// point to its nearest target point, rejects outlying pairs and solves the
/// closed-form rigid fit. A step that would raise the residual is not taken,
/// so the recorded residuals never increase. The run from `init` competes
/// with `rotation_starts` re-centred starts and the lowest final residual
/// wins (the init run on ties). A collinear source is returned unchanged and
/// flagged non-converged.
Transform2D icp_2d(const PointSet2D& source, const PointSet2D& target, const Transform2D& init,
                   const IcpParams& params);

}  // namespace sonar3d
