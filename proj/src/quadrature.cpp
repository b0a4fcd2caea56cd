#include "mtf/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mtf {

Gauss1D gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: need n >= 1");
  Gauss1D g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Tricomi initial guess; roots come in +/- pairs.
    Real z = std::cos(PI * (i + 0.75) / (n + 0.5));
    Real pp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (z * p1 - p0) / (z * z - 1);
      Real dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    Real w = 1.0 / ((1 - z * z) * pp * pp);  // half of the [-1,1] weight
    g.x[i] = 0.5 * (1 - z);
    g.x[n - 1 - i] = 0.5 * (1 + z);
    g.w[i] = w;
    g.w[n - 1 - i] = w;
  }
  return g;
}

TriangleRule gauss_triangle(int order) {
  if (order < 1 || order > 10)
    throw std::invalid_argument("gauss_triangle: order must be in 1..10");
  const int p = (order + 3) / 2;  // per-dimension points
  Gauss1D g = gauss_legendre_01(p);
  TriangleRule r;
  r.order = order;
  r.bary.reserve(p * p);
  r.w.reserve(p * p);
  // Collapse the square onto {0 <= t <= s <= 1} via s = u, t = u v.
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      Real s = g.x[i], t = g.x[i] * g.x[j];
      r.bary.push_back({1 - s, s - t, t});
      r.w.push_back(g.w[i] * g.w[j] * g.x[i]);
    }
  return r;
}

namespace {

// Chart coordinates (s,t) on {0 <= t <= s <= 1} map to barycentrics
// (1-s, s-t, t) on the chart's vertex order.
std::array<Real, 3> chart_bary(Real s, Real t) { return {1 - s, s - t, t}; }

struct Emitter {
  std::vector<PairPoint>& pts;
  void operator()(Real s1, Real t1, Real s2, Real t2, Real w) const {
    pts.push_back({chart_bary(s1, t1), chart_bary(s2, t2), w});
  }
  // the same point with test/trial roles exchanged
  void both(Real s1, Real t1, Real s2, Real t2, Real w) const {
    (*this)(s1, t1, s2, t2, w);
    (*this)(s2, t2, s1, t1, w);
  }
};

inline Real cube(Real v) { return v * v * v; }

// Regularizing coordinate maps of Sauter-Schwab type, derived by splitting
// the relative coordinates around the singular set and pulling the singular
// scale out radially. All maps and Jacobians are polynomial, so region
// measures (summing to 1/4) are integrated exactly for n >= 2.

void coincident_rule(const Gauss1D& g, std::vector<PairPoint>& pts) {
  Emitter emit{pts};
  const int n = g.size();
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          const Real xi = g.x[i0], eta = g.x[i1], a = g.x[i2], b = g.x[i3];
          const Real W = g.w[i0] * g.w[i1] * g.w[i2] * g.w[i3];
          // u = s1-s2 >= w = t1-t2 >= 0
          {
            Real s2 = (1 - xi) * a, t2 = s2 * b;
            emit.both(s2 + xi, t2 + xi * eta, s2, t2,
                      W * xi * (1 - xi) * (1 - xi) * a);
          }
          // w >= u >= 0
          {
            Real s2 = xi * (1 - eta) + (1 - xi) * a, t2 = (1 - xi) * a * b;
            emit.both(s2 + xi * eta, t2 + xi, s2, t2,
                      W * xi * (1 - xi) * (1 - xi) * a);
          }
          // u >= 0 >= w, radial scale xi = u - w, direction eta
          {
            Real t2 = xi * (1 - eta) + (1 - xi) * a;
            Real s2 = t2 + (1 - xi) * (1 - a) * b;
            emit.both(s2 + xi * eta, t2 - xi * (1 - eta), s2, t2,
                      W * xi * (1 - xi) * (1 - xi) * (1 - a));
          }
        }
}

void edge_rule(const Gauss1D& g, std::vector<PairPoint>& pts) {
  Emitter emit{pts};
  const int n = g.size();
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          // z scales the singular coordinates (u, t1, t2); c splits the
          // direction, e fills the remaining one, a places s2.
          const Real z = g.x[i0], c = g.x[i1], e = g.x[i2], a = g.x[i3];
          const Real W = g.w[i0] * g.w[i1] * g.w[i2] * g.w[i3];
          {  // u >= 0, s2 pinned by t2: z = u + t2
            Real u = z * c, t2 = z * (1 - c), t1 = z * e;
            Real s2 = t2 + (1 - z) * a;
            emit(s2 + u, t1, s2, t2, W * z * z * (1 - z));
          }
          {  // u >= 0, s2 pinned by t1 - u: z = t1
            Real u = z * c, t1 = z, t2 = z * (1 - c) * e;
            Real s2 = z * (1 - c) + (1 - z) * a;
            emit(s2 + u, t1, s2, t2, W * z * z * (1 - z) * (1 - c));
          }
          {  // u <= 0, s2 pinned by t2: z = t2 >= t1 + |u|
            Real au = z * c, t1 = z * (1 - c) * e, t2 = z;
            Real s2 = z + (1 - z) * a;
            emit(s2 - au, t1, s2, t2, W * z * z * (1 - z) * (1 - c));
          }
          {  // u <= 0, s2 pinned by t1 + |u| = z
            Real au = z * c, t1 = z * (1 - c), t2 = z * e;
            Real s2 = z + (1 - z) * a;
            emit(s2 - au, t1, s2, t2, W * z * z * (1 - z));
          }
        }
}

void vertex_rule(const Gauss1D& g, std::vector<PairPoint>& pts) {
  Emitter emit{pts};
  const int n = g.size();
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          const Real xi = g.x[i0], b1 = g.x[i1], mu = g.x[i2], b2 = g.x[i3];
          const Real W = g.w[i0] * g.w[i1] * g.w[i2] * g.w[i3];
          emit.both(xi, xi * b1, xi * mu, xi * mu * b2, W * cube(xi) * mu);
        }
}

}  // namespace

PairRule singular_pair_rule(PairKind kind, int n) {
  if (n < 1) throw std::invalid_argument("singular_pair_rule: need n >= 1");
  PairRule r;
  r.kind = kind;
  switch (kind) {
    case PairKind::Coincident:
      r.pts.reserve(8ull * n * n * n * n);
      coincident_rule(gauss_legendre_01(n), r.pts);
      break;
    case PairKind::Edge:
      r.pts.reserve(8ull * n * n * n * n);
      edge_rule(gauss_legendre_01(n), r.pts);
      break;
    case PairKind::Vertex:
      r.pts.reserve(2ull * n * n * n * n);
      vertex_rule(gauss_legendre_01(n), r.pts);
      break;
    default:
      throw std::invalid_argument(
          "singular_pair_rule: disjoint pairs take tensor Gauss rules");
  }
  return r;
}

}  // namespace mtf
