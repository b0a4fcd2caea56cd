#pragma once

#include <array>
#include <vector>

#include "mtf/geometry.hpp"

namespace mtf {

/// 1-D Gauss-Legendre nodes/weights on (0,1).
struct Gauss1D {
  std::vector<Real> x, w;
  int size() const { return static_cast<int>(x.size()); }
};
Gauss1D gauss_legendre_01(int n);

/// Rule over the reference triangle in barycentric coordinates. Weights sum
/// to the reference area 1/2, so ∫_T f dS = 2·area(T)·Σ w_q f(λ_q).
struct TriangleRule {
  int order = 0;  // polynomial exactness degree
  std::vector<std::array<Real, 3>> bary;
  std::vector<Real> w;
  int size() const { return static_cast<int>(w.size()); }
};

/// Collapsed tensor Gauss rule, exact for total degree ≤ order (1..10).
TriangleRule gauss_triangle(int order);

/// Adjacency of a triangle pair; the value equals the shared-vertex count.
enum class PairKind { Disjoint = 0, Vertex = 1, Edge = 2, Coincident = 3 };

/// One node of a regularized pair rule: barycentric points on the test (x)
/// and trial (y) charts plus weight. Weights sum to 1/4, so
/// ∫∫ f = (2A_x)(2A_y)·Σ w_q f(x_q, y_q).
struct PairPoint {
  std::array<Real, 3> xb, yb;
  Real w;
};

struct PairRule {
  PairKind kind = PairKind::Disjoint;
  std::vector<PairPoint> pts;
  int size() const { return static_cast<int>(pts.size()); }
};

/// Regularized tensor rule with n Gauss points per dimension; transformed
/// integrands are smooth for 1/|x−y| kernels. Charts list the shared simplex
/// first: coincident rules assume identical vertex order on both triangles,
/// edge rules both charts starting with the shared edge traversed the same
/// way, vertex rules the shared vertex first.
PairRule singular_pair_rule(PairKind kind, int n);

}  // namespace mtf
