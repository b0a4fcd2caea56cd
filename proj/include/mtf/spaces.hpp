#pragma once

#include <Eigen/Sparse>
#include <array>
#include <memory>

#include "mtf/skeleton.hpp"

namespace mtf {

using SparseReal = Eigen::SparseMatrix<Real>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/// One RWG degree of freedom, attached to an interior edge of a closed
/// subdomain surface. The reference direction runs v0 -> v1 with v0 < v1
/// (skeleton vertex ids); the adjacent triangle whose effective winding
/// traverses the edge in that direction carries sign +1, the other -1, so
/// the normal component of the basis is continuous across the edge.
struct RwgDof {
  int v0 = -1, v1 = -1;      // skeleton vertex ids, v0 < v1
  Real length = 0.0;         // edge length
  std::array<int, 2> tri{{-1, -1}};    // local triangles: [0] sign +1, [1] sign -1
  std::array<int, 2> slot{{-1, -1}};   // local edge slot = opposite-vertex index
  std::array<Real, 2> sign{{1.0, -1.0}};
};

/// Div-conforming RWG space of lowest order on the closed boundary of one
/// subdomain. Triangle geometry is stored with the effective winding (swap
/// applied), so normal(t) points out of the subdomain. On triangle t the
/// basis of the dof in slot k is phi(x) = sign * L/(2A) * (x - p_k) with p_k
/// the vertex opposite the edge; its surface divergence is sign * L/A.
class TraceSpace {
 public:
  int subdomain() const { return subdomain_; }
  int num_dofs() const { return static_cast<int>(dofs_.size()); }
  int num_triangles() const { return static_cast<int>(geo_.size()); }

  const RwgDof& dof(int m) const { return dofs_[m]; }
  const Triangle& triangle(int t) const { return geo_[t]; }
  const Vec3& normal(int t) const { return normals_[t]; }
  Real area(int t) const { return areas_[t]; }
  int skeleton_triangle(int t) const { return skel_tri_[t]; }
  /// Effective (winding-applied) skeleton vertex ids of local triangle t.
  const std::array<int, 3>& tri_vertices(int t) const { return verts_[t]; }
  /// Dof index on the edge opposite local vertex k, and its sign there.
  const std::array<int, 3>& tri_dofs(int t) const { return tri_dofs_[t]; }
  const std::array<Real, 3>& tri_signs(int t) const { return tri_signs_[t]; }
  /// Local triangle index of a skeleton triangle, or -1 if not on this
  /// boundary.
  int local_triangle(int skeleton_tri) const;

  friend TraceSpace build_trace_space(const SkeletonMesh& mesh,
                                      const SubdomainSurface& surface);

 private:
  int subdomain_ = -1;
  std::vector<int> skel_tri_;                   // ascending skeleton ids
  std::vector<std::array<int, 3>> verts_;      // effective vertex ids
  std::vector<Triangle> geo_;
  std::vector<Vec3> normals_;                  // unit outward normals
  std::vector<Real> areas_;
  std::vector<std::array<int, 3>> tri_dofs_;
  std::vector<std::array<Real, 3>> tri_signs_;
  std::vector<RwgDof> dofs_;
};

/// Build the RWG space over one subdomain boundary. Dofs are ordered by the
/// sorted vertex pair (v0, v1) of their edge, so regeneration is
/// deterministic. Throws if any edge does not have exactly two adjacent
/// triangles with opposite traversal (open or non-manifold surface).
TraceSpace build_trace_space(const SkeletonMesh& mesh,
                             const SubdomainSurface& surface);

struct BasisValue {
  Vec3 value;  // tangential RWG value at the point
  Real div;    // surface divergence (constant per triangle)
};

/// Evaluate dof m of the space on local triangle t at barycentric coords
/// (with respect to the effective vertex order of that triangle). Throws if
/// the triangle is not adjacent to the dof's edge.
BasisValue eval_basis(const TraceSpace& space, int m, int t,
                      const std::array<Real, 3>& bary);

/// Duality bookkeeping of one trace space: the twisted pairing
/// G_{mn} = \int phi_n . (n_i x phi_m) (real skew-symmetric, used for
/// identity and transmission blocks) together with the L2 Gram
/// M_{mn} = \int phi_m . phi_n (SPD, LDLT-factorized). The twisted Gram
/// itself is structurally rank-deficient on closed RWG meshes -- a sizable
/// subspace of rotated basis functions pairs to zero against the whole
/// space -- so it is never inverted; dual-to-primal (weak-to-strong) lifts
/// go through the mass matrix instead.
class PairingMatrix {
 public:
  PairingMatrix(SparseReal G, SparseReal mass);

  /// Twisted pairing matrix (skew-symmetric).
  const SparseReal& matrix() const { return G_; }
  /// L2 Gram of the RWG basis (symmetric positive definite).
  const SparseReal& mass() const { return M_; }
  int size() const { return static_cast<int>(G_.rows()); }
  /// Riesz lift: solve mass * x = b (complex b split into re/im parts).
  Eigen::VectorXd mass_solve(const Eigen::VectorXd& b) const;
  VectorXc mass_solve(const VectorXc& b) const;
  MatrixXc mass_solve(const MatrixXc& b) const;

 private:
  SparseReal G_;
  SparseReal M_;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseReal>> ldlt_;
};

/// Assemble both pairing matrices of a space with a quadrature rule exact
/// for the quadratic integrands; twisted contributions are scattered in +/-
/// pairs (skew to the last bit) and mass contributions symmetrically.
/// Throws if the mass factorization fails.
PairingMatrix build_pairing(const TraceSpace& space);

}  // namespace mtf
