#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mtf/geometry.hpp"

namespace mtf {

/// Interface label between two subdomains, normalized so lo < hi. The stored
/// triangle winding on an interface points from subdomain `lo` into `hi`.
struct InterfaceTag {
  int lo = 0;
  int hi = 0;
  bool operator==(const InterfaceTag&) const = default;
  bool operator<(const InterfaceTag& o) const {
    return lo != o.lo ? lo < o.lo : hi < o.hi;
  }
};

/// Triangulated skeleton of a composite scatterer: the union of all
/// subdomain interfaces, each triangle tagged with the interface it belongs
/// to. Subdomain 0 is the unbounded exterior.
struct SkeletonMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;  // vertex ids, right-hand winding
  std::vector<int> tri_interface;             // per triangle: index into `interfaces`
  std::vector<InterfaceTag> interfaces;

  int num_triangles() const { return static_cast<int>(triangles.size()); }
  /// Number of subdomains including the exterior (max tag index + 1).
  int num_subdomains() const;
  InterfaceTag tag_of(int tri) const { return interfaces[tri_interface[tri]]; }
  Triangle triangle(int tri) const {
    const auto& t = triangles[tri];
    return Triangle{vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
  /// Index of an interface tag, inserting it if new.
  int interface_index(InterfaceTag tag);
  Real interface_area(int interface) const;
};

/// Adjacency structure: neighbors[i] is the set Lambda_i of subdomains
/// sharing an interface with subdomain i.
struct InterfaceGraph {
  std::vector<std::set<int>> neighbors;
  int num_subdomains() const { return static_cast<int>(neighbors.size()); }
};

InterfaceGraph interface_graph(const SkeletonMesh& mesh);

/// Closed oriented boundary of one subdomain, as references into the
/// skeleton. `swap[t]` is +1 when the stored winding of tri_ids[t] already
/// gives the outward normal of this subdomain and -1 when it must be
/// reversed (outward for the exterior domain 0 means pointing into the
/// scatterer).
struct SubdomainSurface {
  int subdomain = -1;
  std::vector<int> tri_ids;   // skeleton triangle indices, ascending
  std::vector<Real> swap;     // aligned with tri_ids, each +1 or -1
  /// Interfaces making up this boundary with their swap sign, ordered by tag.
  std::vector<std::pair<InterfaceTag, Real>> parts;
};

/// Extract the boundary of subdomain i, assigning swap = sign(j - i) on each
/// interface (i,j). Throws if the resulting surface is not closed, not
/// 2-manifold, or not consistently orientable.
SubdomainSurface subdomain_boundary(const SkeletonMesh& mesh, int subdomain);

/// Whole-mesh validation: conformity, per-subdomain closedness/orientation,
/// and outwardness of the effective normals (signed volume). Returns a list
/// of human-readable problems; empty means valid.
std::vector<std::string> validate_mesh(const SkeletonMesh& mesh);

Real max_edge_length(const SkeletonMesh& mesh);

/// Material parameters per subdomain; entry 0 is the exterior (vacuum).
/// k_i = k0*sqrt(mu_r*eps_r), eta_i = sqrt(mu_r/eps_r), rho_i = 1/eta_i.
struct MaterialTable {
  Real k0 = 1.0;
  std::vector<Real> eps_r;  // size M+1, eps_r[0] == 1
  std::vector<Real> mu_r;   // size M+1, mu_r[0] == 1

  static MaterialTable homogeneous(Real k0, int num_subdomains, Real eps,
                                   Real mu = 1.0);
  int size() const { return static_cast<int>(eps_r.size()); }
  Real k(int i) const { return k0 * std::sqrt(eps_r[i] * mu_r[i]); }
  Real eta(int i) const { return std::sqrt(mu_r[i] / eps_r[i]); }
  Real rho(int i) const { return 1.0 / eta(i); }
  Real wavelength() const { return 2.0 * PI / k0; }
};

// ---- generators ----------------------------------------------------------

/// Sphere of given radius centered at the origin, target edge length h.
/// split=false: single interface (0,1). split=true: the sphere is cut by the
/// plane x = 0 into subdomain 1 (x < 0) and 2 (x > 0); caps carry tags (0,1)
/// and (0,2) and the equatorial disk carries (1,2) with stored normal +x.
SkeletonMesh gen_sphere(Real radius, Real h, bool split);

/// Axis-aligned cuboid (0,Lx)x(0,Ly)x(0,Lz) halved at z = Lz/2 into
/// subdomain 1 (lower) and 2 (upper); interface normal +z.
SkeletonMesh gen_halved_cuboid(const std::array<Real, 3>& extents, Real h);

/// Nested cuboid shells: radii = [0, r1, ..., rM]; subdomain i is
/// { max(|x|,|y|) in (r_{i-1}, r_i) } x (0, height). Shell i meets shell i+1
/// on the vertical wall at radius r_i, and the exterior on top/bottom
/// annuli (and the outermost wall).
SkeletonMesh gen_concentric_cuboids(const std::vector<Real>& radii, Real height,
                                    Real h);

// ---- I/O ------------------------------------------------------------------

/// Load a gmsh ASCII v2.2 file; `tag_map` sends each physical tag to an
/// ordered subdomain pair (a,b). Pairs with a > b are normalized to (b,a) by
/// reversing the triangle winding so the stored normal always points
/// lo -> hi. Throws std::runtime_error with a line number on parse errors.
SkeletonMesh read_msh(const std::string& path,
                      const std::map<int, std::pair<int, int>>& tag_map);

/// Write gmsh ASCII v2.2, one physical/elementary tag per interface
/// (tag = index into mesh.interfaces + 1).
void write_msh(const SkeletonMesh& mesh, const std::string& path);

}  // namespace mtf
