#include "mtf/spaces.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>

#include "mtf/quadrature.hpp"

namespace mtf {

int TraceSpace::local_triangle(int skeleton_tri) const {
  auto it = std::lower_bound(skel_tri_.begin(), skel_tri_.end(), skeleton_tri);
  if (it == skel_tri_.end() || *it != skeleton_tri) return -1;
  return static_cast<int>(it - skel_tri_.begin());
}

TraceSpace build_trace_space(const SkeletonMesh& mesh,
                             const SubdomainSurface& surface) {
  TraceSpace sp;
  sp.subdomain_ = surface.subdomain;
  const int nt = static_cast<int>(surface.tri_ids.size());
  sp.skel_tri_ = surface.tri_ids;
  sp.verts_.resize(nt);
  sp.geo_.resize(nt);
  sp.normals_.resize(nt);
  sp.areas_.resize(nt);
  sp.tri_dofs_.assign(nt, {-1, -1, -1});
  sp.tri_signs_.assign(nt, {0.0, 0.0, 0.0});

  for (int t = 0; t < nt; ++t) {
    auto v = mesh.triangles[surface.tri_ids[t]];
    if (surface.swap[t] < 0) std::swap(v[1], v[2]);
    sp.verts_[t] = v;
    sp.geo_[t] =
        Triangle{mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]};
    sp.normals_[t] = sp.geo_[t].normal();
    sp.areas_[t] = sp.geo_[t].area();
  }

  // Edge (lo, hi) -> adjacent (triangle, slot, traversal dir) records. The
  // map keys give the deterministic dof ordering.
  struct Adj {
    int tri, slot;
    int dir;  // +1: winding traverses lo->hi, -1: hi->lo
  };
  std::map<std::pair<int, int>, std::vector<Adj>> edges;
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      int p = sp.verts_[t][(k + 1) % 3], q = sp.verts_[t][(k + 2) % 3];
      int dir = p < q ? 1 : -1;
      edges[{std::min(p, q), std::max(p, q)}].push_back({t, k, dir});
    }

  sp.dofs_.reserve(edges.size());
  for (const auto& [key, adj] : edges) {
    if (adj.size() != 2 || adj[0].dir + adj[1].dir != 0)
      throw std::runtime_error(
          "build_trace_space: surface is not a closed oriented manifold at "
          "edge (" +
          std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    RwgDof d;
    d.v0 = key.first;
    d.v1 = key.second;
    d.length = (mesh.vertices[d.v1] - mesh.vertices[d.v0]).norm();
    const Adj& plus = adj[0].dir > 0 ? adj[0] : adj[1];
    const Adj& minus = adj[0].dir > 0 ? adj[1] : adj[0];
    d.tri = {plus.tri, minus.tri};
    d.slot = {plus.slot, minus.slot};
    d.sign = {1.0, -1.0};
    const int m = static_cast<int>(sp.dofs_.size());
    sp.tri_dofs_[plus.tri][plus.slot] = m;
    sp.tri_signs_[plus.tri][plus.slot] = 1.0;
    sp.tri_dofs_[minus.tri][minus.slot] = m;
    sp.tri_signs_[minus.tri][minus.slot] = -1.0;
    sp.dofs_.push_back(d);
  }
  return sp;
}

BasisValue eval_basis(const TraceSpace& space, int m, int t,
                      const std::array<Real, 3>& bary) {
  const RwgDof& d = space.dof(m);
  int side = -1;
  if (d.tri[0] == t)
    side = 0;
  else if (d.tri[1] == t)
    side = 1;
  else
    throw std::invalid_argument(
        "eval_basis: triangle not adjacent to the dof's edge");
  const Triangle& tri = space.triangle(t);
  const Vec3 x = tri.at(bary);
  const Vec3 p_opp = d.slot[side] == 0 ? tri.a : (d.slot[side] == 1 ? tri.b : tri.c);
  const Real coef = d.sign[side] * d.length / (2.0 * space.area(t));
  return BasisValue{coef * (x - p_opp), 2.0 * coef};
}

PairingMatrix::PairingMatrix(SparseReal G, SparseReal mass)
    : G_(std::move(G)), M_(std::move(mass)) {
  ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SparseReal>>();
  ldlt_->compute(M_);
  if (ldlt_->info() != Eigen::Success)
    throw std::runtime_error("PairingMatrix: mass factorization failed");
}

Eigen::VectorXd PairingMatrix::mass_solve(const Eigen::VectorXd& b) const {
  return ldlt_->solve(b);
}

VectorXc PairingMatrix::mass_solve(const VectorXc& b) const {
  VectorXc out(b.size());
  out.real() = ldlt_->solve(b.real().eval());
  out.imag() = ldlt_->solve(b.imag().eval());
  return out;
}

MatrixXc PairingMatrix::mass_solve(const MatrixXc& b) const {
  MatrixXc out(b.rows(), b.cols());
  out.real() = ldlt_->solve(b.real().eval());
  out.imag() = ldlt_->solve(b.imag().eval());
  return out;
}

PairingMatrix build_pairing(const TraceSpace& space) {
  const TriangleRule rule = gauss_triangle(2);  // integrands are quadratic
  std::vector<Eigen::Triplet<Real>> gt, mt;
  gt.reserve(space.num_triangles() * 6);
  mt.reserve(space.num_triangles() * 9);
  for (int t = 0; t < space.num_triangles(); ++t) {
    const Triangle& tri = space.triangle(t);
    const Vec3& n = space.normal(t);
    const Real two_area = 2.0 * space.area(t);
    const std::array<Vec3, 3> p = {tri.a, tri.b, tri.c};
    const auto& dofs = space.tri_dofs(t);
    const auto& signs = space.tri_signs(t);
    for (int alpha = 0; alpha < 3; ++alpha)
      for (int beta = alpha; beta < 3; ++beta) {
        // g = \int phi_beta . (n x phi_alpha), m = \int phi_alpha . phi_beta.
        // The twisted diagonal vanishes and the mirrored entry is exactly
        // -g; the mass entries are mirrored as-is.
        Real g = 0.0, mm = 0.0;
        for (size_t q = 0; q < rule.bary.size(); ++q) {
          const Vec3 x = tri.at(rule.bary[q]);
          const Vec3 fa = x - p[alpha];
          const Vec3 fb = x - p[beta];
          g += rule.w[q] * fb.dot(n.cross(fa));
          mm += rule.w[q] * fa.dot(fb);
        }
        const Real ca = signs[alpha] * space.dof(dofs[alpha]).length /
                        (2.0 * space.area(t));
        const Real cb = signs[beta] * space.dof(dofs[beta]).length /
                        (2.0 * space.area(t));
        g *= two_area * ca * cb;
        mm *= two_area * ca * cb;
        if (alpha == beta) {
          mt.emplace_back(dofs[alpha], dofs[alpha], mm);
          continue;
        }
        gt.emplace_back(dofs[alpha], dofs[beta], g);
        gt.emplace_back(dofs[beta], dofs[alpha], -g);
        mt.emplace_back(dofs[alpha], dofs[beta], mm);
        mt.emplace_back(dofs[beta], dofs[alpha], mm);
      }
  }
  SparseReal G(space.num_dofs(), space.num_dofs());
  SparseReal M(space.num_dofs(), space.num_dofs());
  G.setFromTriplets(gt.begin(), gt.end());
  M.setFromTriplets(mt.begin(), mt.end());
  return PairingMatrix(std::move(G), std::move(M));
}

}  // namespace mtf
