#include "sonar3d/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sonar3d/errors.hpp"
#include "sonar3d/geometry.hpp"

namespace sonar3d {

Point2 Transform2D::apply(const Point2& p) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
}

Point2 Transform2D::apply_inverse(const Point2& p) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const double dx = p.x - tx;
  const double dy = p.y - ty;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Transform2D Transform2D::compose(const Transform2D& other) const {
  const Point2 t = apply({other.tx, other.ty});
  return from(rotation + other.rotation, t.x, t.y);
}

Transform2D Transform2D::from(double rotation, double tx, double ty) {
  Transform2D t;
  t.rotation = normalize_angle(rotation);
  t.tx = tx;
  t.ty = ty;
  return t;
}

PointSet2D transform_points(const Transform2D& t, const PointSet2D& points) {
  PointSet2D out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(t.apply(p));
  return out;
}

KdTree2D::KdTree2D(const PointSet2D& points) : points_(points) {
  std::vector<int> idx(points_.size());
  std::iota(idx.begin(), idx.end(), 0);
  nodes_.reserve(points_.size());
  root_ = build(idx, 0, static_cast<int>(idx.size()), 0);
}

int KdTree2D::build(std::vector<int>& idx, int lo, int hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 2;
  const int mid = (lo + hi) / 2;
  std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi, [&](int a, int b) {
    return axis == 0 ? points_[a].x < points_[b].x : points_[a].y < points_[b].y;
  });
  const int node = static_cast<int>(nodes_.size());
  nodes_.push_back({idx[mid], -1, -1, axis});
  const int left = build(idx, lo, mid, depth + 1);
  const int right = build(idx, mid + 1, hi, depth + 1);
  nodes_[node].left = left;
  nodes_[node].right = right;
  return node;
}

void KdTree2D::search(int node, const Point2& q, int& best, double& best_d2) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const Point2& p = points_[n.point];
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  const double d2 = dx * dx + dy * dy;
  if (d2 < best_d2 || (d2 == best_d2 && n.point < best)) {
    best_d2 = d2;
    best = n.point;
  }
  const double diff = n.axis == 0 ? dx : dy;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, q, best, best_d2);
  if (diff * diff <= best_d2) search(far, q, best, best_d2);
}

std::pair<int, double> KdTree2D::nearest(const Point2& q) const {
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  search(root_, q, best, best_d2);
  return {best, best_d2};
}

void IcpParams::validate() const {
  if (max_iters < 0) throw ConfigError("icp: max_iters must be >= 0");
  if (!(tolerance > 0.0)) throw ConfigError("icp: tolerance must be positive");
  if (!(reject_factor > 0.0)) throw ConfigError("icp: reject_factor must be positive");
  if (rotation_starts < 0) throw ConfigError("icp: rotation_starts must be >= 0");
  if (!(rotation_span >= 0.0) || rotation_span > kPi) {
    throw ConfigError("icp: rotation_span must be in [0, pi]");
  }
}

bool is_collinear(const PointSet2D& points, double tolerance) {
  if (points.size() < 3) return true;
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= points.size();
  my /= points.size();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    syy += (p.y - my) * (p.y - my);
    sxy += (p.x - mx) * (p.y - my);
  }
  // principal axis; the largest perpendicular offset decides
  const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  const double nx = -std::sin(theta);
  const double ny = std::cos(theta);
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, std::abs((p.x - mx) * nx + (p.y - my) * ny));
  return worst <= tolerance;
}

namespace {

struct Matching {
  std::vector<int> source;
  std::vector<int> target;
  double residual = 0.0;
};

Matching match(const PointSet2D& source, const KdTree2D& tree, const Transform2D& t,
               double reject_factor) {
  const int n = static_cast<int>(source.size());
  std::vector<int> nn(n);
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) {
    const auto [j, d2] = tree.nearest(t.apply(source[i]));
    nn[i] = j;
    dist[i] = std::sqrt(d2);
  }
  std::vector<double> sorted = dist;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double cutoff = reject_factor * sorted[n / 2];
  Matching m;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (dist[i] > cutoff) continue;
    m.source.push_back(i);
    m.target.push_back(nn[i]);
    sum += dist[i];
  }
  m.residual = m.source.empty() ? 0.0 : sum / m.source.size();
  return m;
}

Transform2D rigid_fit(const PointSet2D& source, const PointSet2D& target, const Matching& m) {
  const double n = static_cast<double>(m.source.size());
  double sx = 0.0, sy = 0.0, qx = 0.0, qy = 0.0;
  for (std::size_t k = 0; k < m.source.size(); ++k) {
    sx += source[m.source[k]].x;
    sy += source[m.source[k]].y;
    qx += target[m.target[k]].x;
    qy += target[m.target[k]].y;
  }
  sx /= n;
  sy /= n;
  qx /= n;
  qy /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < m.source.size(); ++k) {
    const double ax = source[m.source[k]].x - sx;
    const double ay = source[m.source[k]].y - sy;
    const double bx = target[m.target[k]].x - qx;
    const double by = target[m.target[k]].y - qy;
    num += ax * by - ay * bx;
    den += ax * bx + ay * by;
  }
  const double theta = std::atan2(num, den);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Transform2D::from(theta, qx - (c * sx - s * sy), qy - (s * sx + c * sy));
}

// One ICP descent from `start`.
Transform2D descend(const PointSet2D& source, const PointSet2D& target, const KdTree2D& tree,
                    const Transform2D& start, const IcpParams& params) {
  Transform2D current = Transform2D::from(start.rotation, start.tx, start.ty);
  Matching matching = match(source, tree, current, params.reject_factor);
  current.residual = matching.residual;
  current.residual_history.push_back(matching.residual);

  for (int it = 0; it < params.max_iters; ++it) {
    Transform2D next = rigid_fit(source, target, matching);
    Matching next_matching = match(source, tree, next, params.reject_factor);
    if (next_matching.residual > current.residual) {
      current.converged = true;  // no further descent from here
      break;
    }
    const double improvement = current.residual - next_matching.residual;
    next.residual = next_matching.residual;
    next.iterations = current.iterations + 1;
    next.residual_history = std::move(current.residual_history);
    next.residual_history.push_back(next.residual);
    current = std::move(next);
    matching = std::move(next_matching);
    if (improvement < params.tolerance) {
      current.converged = true;
      break;
    }
  }
  return current;
}

Point2 centroid(const PointSet2D& points) {
  Point2 c;
  for (const auto& p : points) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(points.size());
  c.y /= static_cast<double>(points.size());
  return c;
}

}  // namespace

Transform2D icp_2d(const PointSet2D& source, const PointSet2D& target, const Transform2D& init,
                   const IcpParams& params) {
  params.validate();
  if (source.size() < 3 || target.size() < 3) {
    throw PreconditionError("icp_2d: source and target need at least 3 points");
  }
  if (is_collinear(source)) {
    Transform2D current = Transform2D::from(init.rotation, init.tx, init.ty);
    current.converged = false;
    return current;
  }
  const KdTree2D tree(target);
  Transform2D best = descend(source, target, tree, init, params);
  if (params.max_iters == 0 || params.rotation_starts == 0) return best;

  // nearest-neighbour descent has local minima once the misalignment
  // exceeds the point spacing; restart from rotations about the centroid
  const Point2 src_c = centroid(source);
  const Point2 tgt_c = centroid(target);
  const int n = params.rotation_starts;
  for (int k = 0; k < n; ++k) {
    const double offset =
        n == 1 ? 0.0 : -params.rotation_span + 2.0 * params.rotation_span * k / (n - 1);
    const double rot = init.rotation + offset;
    const double c = std::cos(rot);
    const double s = std::sin(rot);
    const auto start =
        Transform2D::from(rot, tgt_c.x - (c * src_c.x - s * src_c.y), tgt_c.y - (s * src_c.x + c * src_c.y));
    Transform2D run = descend(source, target, tree, start, params);
    if (run.residual < best.residual) best = std::move(run);
  }
  return best;
}

}  // namespace sonar3d
