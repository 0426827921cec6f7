#pragma once

#include <map>
#include <utility>
#include <vector>

#include "delab/spectral_core.hpp"

namespace delab::detail {

/// Moments of the square [c - h/2, c + h/2]^2 intersected with the disk
/// |x| <= R, taken about the square's center c.
struct CellMoments {
  double m0 = 0, m1x = 0, m1y = 0, m2xx = 0, m2xy = 0, m2yy = 0;
};
CellMoments cell_disk_moments(Point c, double h, double R);

/// Cells meeting the disk of radius R centered at (fx h, fy h) relative to node
/// (0, 0), with their intersection moments.
struct BallStencil {
  std::vector<int> di, dj;
  std::vector<CellMoments> moments;
};
BallStencil ball_stencil(double h, double R, double fx, double fy);

/// Samples of a smooth periodic function with centered-difference derivatives.
struct BallIntegrand {
  GridSpec grid;
  std::vector<double> v, vx, vy, vxx, vxy, vyy;
};
BallIntegrand ball_integrand(const GridSpec& g, std::vector<double> v);

/// Every cell of the stencil contributes m0 v + m1 . grad v + m2 : hess v / 2;
/// O(h^4) for smooth v. (i0, j0) is the node the stencil is attached to.
double ball_integral(const BallIntegrand& f, const BallStencil& s, int i0, int j0);

/// Splits a point into its base node and fractional offset (in cells).
struct NodeOffset {
  int i, j;
  double fx, fy;
};
NodeOffset node_offset(double h, Point x0);

/// Stencils shared by points with equal fractional offsets.
class StencilCache {
 public:
  StencilCache(double h, double R) : h_(h), R_(R) {}
  const BallStencil& get(const NodeOffset& o);

 private:
  double h_, R_;
  std::map<std::pair<long long, long long>, BallStencil> cache_;
};

/// Convenience single-ball integral.
double ball_integral(const GridSpec& g, const std::vector<double>& v, Point x0, double R);

/// Largest sample at nodes in the closed ball.
double ball_max(const GridSpec& g, const std::vector<double>& v, Point x0, double R);

}  // namespace delab::detail
