#include "mtf/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mtf {

int SkeletonMesh::num_subdomains() const {
  int n = 0;
  for (const auto& t : interfaces) n = std::max(n, t.hi + 1);
  return n;
}

int SkeletonMesh::interface_index(InterfaceTag tag) {
  if (tag.lo < 0 || tag.lo >= tag.hi)
    throw std::invalid_argument("interface tag must satisfy 0 <= lo < hi");
  for (int i = 0; i < static_cast<int>(interfaces.size()); ++i)
    if (interfaces[i] == tag) return i;
  interfaces.push_back(tag);
  return static_cast<int>(interfaces.size()) - 1;
}

Real SkeletonMesh::interface_area(int interface) const {
  Real a = 0;
  for (int t = 0; t < num_triangles(); ++t)
    if (tri_interface[t] == interface) a += triangle(t).area();
  return a;
}

Real max_edge_length(const SkeletonMesh& mesh) {
  Real e = 0;
  for (const auto& v : mesh.triangles) {
    e = std::max(e, (mesh.vertices[v[0]] - mesh.vertices[v[1]]).norm());
    e = std::max(e, (mesh.vertices[v[1]] - mesh.vertices[v[2]]).norm());
    e = std::max(e, (mesh.vertices[v[2]] - mesh.vertices[v[0]]).norm());
  }
  return e;
}

InterfaceGraph interface_graph(const SkeletonMesh& mesh) {
  InterfaceGraph g;
  g.neighbors.resize(mesh.num_subdomains());
  for (const auto& t : mesh.interfaces) {
    g.neighbors[t.lo].insert(t.hi);
    g.neighbors[t.hi].insert(t.lo);
  }
  return g;
}

namespace {

SubdomainSurface collect_boundary(const SkeletonMesh& mesh, int subdomain) {
  SubdomainSurface s;
  s.subdomain = subdomain;
  std::map<InterfaceTag, Real> parts;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    InterfaceTag tag = mesh.tag_of(t);
    if (tag.lo != subdomain && tag.hi != subdomain) continue;
    // Stored winding points lo -> hi, i.e. out of `lo`; flip when we sit on
    // the hi side. This is sign(j - i) with j the neighbor across.
    Real sw = (tag.lo == subdomain) ? 1.0 : -1.0;
    s.tri_ids.push_back(t);
    s.swap.push_back(sw);
    parts.emplace(tag, sw);
  }
  s.parts.assign(parts.begin(), parts.end());
  return s;
}

// Closed orientable 2-manifold check under the effective winding: every
// undirected edge must be traversed exactly once in each direction.
std::vector<std::string> check_surface(const SkeletonMesh& mesh,
                                       const SubdomainSurface& s) {
  std::vector<std::string> problems;
  std::map<std::pair<int, int>, std::array<int, 2>> edges;
  for (size_t idx = 0; idx < s.tri_ids.size(); ++idx) {
    std::array<int, 3> v = mesh.triangles[s.tri_ids[idx]];
    if (s.swap[idx] < 0) std::swap(v[1], v[2]);
    for (int e = 0; e < 3; ++e) {
      int a = v[e], b = v[(e + 1) % 3];
      auto key = std::minmax(a, b);
      edges[{key.first, key.second}][a < b ? 0 : 1]++;
    }
  }
  const std::string where = " on boundary of subdomain " +
                            std::to_string(s.subdomain) + " at edge (";
  for (const auto& [key, cnt] : edges) {
    const std::string edge = where + std::to_string(key.first) + "," +
                             std::to_string(key.second) + ")";
    int total = cnt[0] + cnt[1];
    if (total > 2)
      problems.push_back("non-manifold edge: " + std::to_string(total) +
                         " incident triangles" + edge);
    else if (total == 1)
      problems.push_back("open boundary" + edge);
    else if (cnt[0] != 1)
      problems.push_back("orientation inconsistency" + edge);
  }
  return problems;
}

Real signed_volume(const SkeletonMesh& mesh, const SubdomainSurface& s) {
  Real vol = 0;
  for (size_t i = 0; i < s.tri_ids.size(); ++i) {
    const auto& v = mesh.triangles[s.tri_ids[i]];
    vol += s.swap[i] * mesh.vertices[v[0]].dot(
                           mesh.vertices[v[1]].cross(mesh.vertices[v[2]]));
  }
  return vol / 6.0;
}

}  // namespace

SubdomainSurface subdomain_boundary(const SkeletonMesh& mesh, int subdomain) {
  if (subdomain < 0 || subdomain >= mesh.num_subdomains())
    throw std::out_of_range("subdomain index " + std::to_string(subdomain) +
                            " out of range");
  SubdomainSurface s = collect_boundary(mesh, subdomain);
  if (s.tri_ids.empty())
    throw std::runtime_error("subdomain " + std::to_string(subdomain) +
                             " has no boundary triangles");
  auto problems = check_surface(mesh, s);
  if (!problems.empty()) throw std::runtime_error(problems.front());
  return s;
}

std::vector<std::string> validate_mesh(const SkeletonMesh& mesh) {
  std::vector<std::string> problems;
  const int nv = static_cast<int>(mesh.vertices.size());
  if (mesh.tri_interface.size() != mesh.triangles.size())
    problems.push_back("tri_interface size does not match triangle count");
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    if (v[0] < 0 || v[1] < 0 || v[2] < 0 || v[0] >= nv || v[1] >= nv ||
        v[2] >= nv) {
      problems.push_back("triangle " + std::to_string(t) +
                         " has out-of-range vertex index");
      continue;
    }
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
      problems.push_back("triangle " + std::to_string(t) +
                         " has repeated vertices");
    else if (!(mesh.triangle(t).area() > 0))
      problems.push_back("triangle " + std::to_string(t) + " is degenerate");
    if (t < static_cast<int>(mesh.tri_interface.size())) {
      int ix = mesh.tri_interface[t];
      if (ix < 0 || ix >= static_cast<int>(mesh.interfaces.size()))
        problems.push_back("triangle " + std::to_string(t) +
                           " has out-of-range interface index");
    }
  }
  for (const auto& tag : mesh.interfaces)
    if (tag.lo < 0 || tag.lo >= tag.hi)
      problems.push_back("invalid interface tag (" + std::to_string(tag.lo) +
                         "," + std::to_string(tag.hi) + ")");
  if (!problems.empty()) return problems;  // index errors poison the rest

  const int nsub = mesh.num_subdomains();
  if (nsub < 2) {
    problems.push_back("mesh has no interfaces");
    return problems;
  }
  for (int i = 0; i < nsub; ++i) {
    SubdomainSurface s = collect_boundary(mesh, i);
    if (s.tri_ids.empty()) {
      problems.push_back("subdomain " + std::to_string(i) +
                         " has no boundary triangles");
      continue;
    }
    auto surf = check_surface(mesh, s);
    problems.insert(problems.end(), surf.begin(), surf.end());
    if (!surf.empty()) continue;
    Real vol = signed_volume(mesh, s);
    // Effective normals are outward, so enclosed volume is positive for
    // bounded subdomains; domain 0 winds around the scatterer backwards.
    if (i == 0 ? vol >= 0 : vol <= 0)
      problems.push_back("orientation inconsistency: boundary of subdomain " +
                         std::to_string(i) + " has signed volume " +
                         std::to_string(vol));
  }
  return problems;
}

MaterialTable MaterialTable::homogeneous(Real k0, int num_subdomains, Real eps,
                                         Real mu) {
  if (num_subdomains < 2)
    throw std::invalid_argument("need at least exterior plus one subdomain");
  MaterialTable m;
  m.k0 = k0;
  m.eps_r.assign(num_subdomains, eps);
  m.mu_r.assign(num_subdomains, mu);
  m.eps_r[0] = 1.0;
  m.mu_r[0] = 1.0;
  return m;
}

// ---- generators -----------------------------------------------------------

namespace {

int add_vertex(SkeletonMesh& mesh, const Vec3& p) {
  mesh.vertices.push_back(p);
  return static_cast<int>(mesh.vertices.size()) - 1;
}

void add_tri(SkeletonMesh& mesh, int a, int b, int c, int iface) {
  mesh.triangles.push_back({a, b, c});
  mesh.tri_interface.push_back(iface);
}

int ceil_div(Real length, Real h) {
  return std::max(1, static_cast<int>(std::ceil(length / h - 1e-9)));
}

// Stitch two concentric vertex rings assumed to sit at uniform angles
// 2*pi*j/size. Emits (A_i, A_{i+1}, B_j) and (A_i, B_{j+1}, B_j) merged by
// angle; |A|+|B| triangles, conforming on both rings.
void stitch_rings(SkeletonMesh& mesh, const std::vector<int>& A,
                  const std::vector<int>& B, int iface) {
  const size_t na = A.size(), nb = B.size();
  size_t ia = 0, ib = 0;
  while (ia < na || ib < nb) {
    Real next_a = ia < na ? Real(ia + 1) / Real(na)
                          : std::numeric_limits<Real>::infinity();
    Real next_b = ib < nb ? Real(ib + 1) / Real(nb)
                          : std::numeric_limits<Real>::infinity();
    if (next_a <= next_b) {
      add_tri(mesh, A[ia % na], A[(ia + 1) % na], B[ib % nb], iface);
      ++ia;
    } else {
      add_tri(mesh, A[ia % na], B[(ib + 1) % nb], B[ib % nb], iface);
      ++ib;
    }
  }
}

SkeletonMesh build_sphere(Real radius, Real h, bool split) {
  int n = std::max(2, ceil_div(PI * radius, h));
  if (split && n % 2) ++n;

  SkeletonMesh mesh;
  const int if01 = mesh.interface_index({0, 1});
  const int if02 = split ? mesh.interface_index({0, 2}) : if01;
  const int if12 = split ? mesh.interface_index({1, 2}) : -1;

  // Latitude rings around the x-axis; ring 0 is the +x pole, ring n the -x
  // pole, and (n even) ring n/2 the great circle in the plane x = 0.
  std::vector<std::vector<int>> rings(n + 1);
  for (int i = 0; i <= n; ++i) {
    if (i == 0 || i == n) {
      rings[i] = {add_vertex(mesh, Vec3(i == 0 ? radius : -radius, 0, 0))};
      continue;
    }
    Real theta = PI * i / n;
    Real x = (2 * i == n) ? 0.0 : radius * std::cos(theta);
    Real r = radius * std::sin(theta);
    int m = std::max(3, ceil_div(2 * PI * r, h));
    for (int j = 0; j < m; ++j) {
      Real phi = 2 * PI * j / m;
      rings[i].push_back(
          add_vertex(mesh, Vec3(x, r * std::cos(phi), r * std::sin(phi))));
    }
  }

  // Cap windings give the normal into the ball; the band between rings i and
  // i+1 lies in { x >= 0 } (subdomain 2 when split) iff i+1 <= n/2.
  auto band_iface = [&](int i) {
    return (!split || 2 * (i + 1) <= n) ? if02 : if01;
  };
  for (size_t j = 0; j < rings[1].size(); ++j) {
    size_t j1 = (j + 1) % rings[1].size();
    add_tri(mesh, rings[0][0], rings[1][j1], rings[1][j], band_iface(0));
  }
  for (int i = 1; i + 1 < n; ++i)
    stitch_rings(mesh, rings[i], rings[i + 1], band_iface(i));
  for (size_t j = 0; j < rings[n - 1].size(); ++j) {
    size_t j1 = (j + 1) % rings[n - 1].size();
    add_tri(mesh, rings[n][0], rings[n - 1][j], rings[n - 1][j1],
            band_iface(n - 1));
  }

  if (split) {
    // Equatorial disk, oriented +x (out of subdomain 1 into 2). Its rim is
    // the existing equator ring so caps and disk share the boundary curve.
    const std::vector<int>& rim = rings[n / 2];
    const int m_eq = static_cast<int>(rim.size());
    int L = std::max(1, ceil_div(radius, h));
    std::vector<std::vector<int>> disk(L + 1);
    disk[L] = rim;
    for (int l = 1; l < L; ++l) {
      Real rho = radius * l / L;
      int m = std::max(3, static_cast<int>(std::lround(Real(m_eq) * l / L)));
      for (int j = 0; j < m; ++j) {
        Real phi = 2 * PI * j / m;
        disk[l].push_back(add_vertex(
            mesh, Vec3(0, rho * std::cos(phi), rho * std::sin(phi))));
      }
    }
    int center = add_vertex(mesh, Vec3(0, 0, 0));
    const auto& inner = disk[1];
    for (size_t j = 0; j < inner.size(); ++j) {
      size_t j1 = (j + 1) % inner.size();
      add_tri(mesh, center, inner[j], inner[j1], if12);
    }
    for (int l = 1; l < L; ++l)
      stitch_rings(mesh, disk[l + 1], disk[l], if12);  // outer ring first
  }
  return mesh;
}

}  // namespace

SkeletonMesh gen_sphere(Real radius, Real h, bool split) {
  if (radius <= 0 || h <= 0)
    throw std::invalid_argument("gen_sphere: radius and h must be positive");
  if (h > radius)
    throw std::invalid_argument(
        "gen_sphere: h larger than radius gives a degenerate mesh");
  // Arc steps are <= h by construction but zipper diagonals can poke above;
  // shrink the working h until the longest edge fits the 1.3*h budget.
  Real h_eff = h;
  SkeletonMesh mesh;
  for (int attempt = 0; attempt < 8; ++attempt) {
    mesh = build_sphere(radius, h_eff, split);
    Real e = max_edge_length(mesh);
    if (e <= 1.3 * h) break;
    h_eff *= 1.25 * h / e;
  }
  return mesh;
}

namespace {

// Vertex pool keyed by integer grid indices so coincident nodes of
// different faces merge exactly.
struct GridVertices {
  SkeletonMesh& mesh;
  std::map<std::array<int, 3>, int> ids;
  int operator()(int ix, int iy, int iz, const Vec3& p) {
    auto [it, inserted] = ids.try_emplace({ix, iy, iz}, 0);
    if (inserted) it->second = add_vertex(mesh, p);
    return it->second;
  }
};

// Split a planar quad (corners in cyclic order) into two triangles whose
// normals agree with `want`.
void add_quad(SkeletonMesh& mesh, int a, int b, int c, int d, int iface,
              const Vec3& want) {
  Vec3 nrm = (mesh.vertices[b] - mesh.vertices[a])
                 .cross(mesh.vertices[c] - mesh.vertices[a]);
  if (nrm.dot(want) >= 0) {
    add_tri(mesh, a, b, c, iface);
    add_tri(mesh, a, c, d, iface);
  } else {
    add_tri(mesh, a, c, b, iface);
    add_tri(mesh, a, d, c, iface);
  }
}

std::vector<Real> linspace(Real lo, Real hi, int n) {
  std::vector<Real> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = lo + (hi - lo) * i / n;
  return v;
}

}  // namespace

SkeletonMesh gen_halved_cuboid(const std::array<Real, 3>& extents, Real h) {
  const Real Lx = extents[0], Ly = extents[1], Lz = extents[2];
  if (Lx <= 0 || Ly <= 0 || Lz <= 0 || h <= 0)
    throw std::invalid_argument("gen_halved_cuboid: sizes must be positive");
  if (h > std::min({Lx, Ly, Lz}))
    throw std::invalid_argument(
        "gen_halved_cuboid: h larger than the smallest extent gives a "
        "degenerate mesh");
  const int nx = ceil_div(Lx, h), ny = ceil_div(Ly, h);
  const int nzh = ceil_div(0.5 * Lz, h), nz = 2 * nzh;
  const auto xs = linspace(0, Lx, nx), ys = linspace(0, Ly, ny),
             zs = linspace(0, Lz, nz);

  SkeletonMesh mesh;
  const int if01 = mesh.interface_index({0, 1});
  const int if02 = mesh.interface_index({0, 2});
  const int if12 = mesh.interface_index({1, 2});
  GridVertices vid{mesh, {}};
  auto at = [&](int i, int j, int k) {
    return vid(i, j, k, Vec3(xs[i], ys[j], zs[k]));
  };
  auto side_iface = [&](int k) { return k < nzh ? if01 : if02; };

  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      add_quad(mesh, at(i, j, 0), at(i + 1, j, 0), at(i + 1, j + 1, 0),
               at(i, j + 1, 0), if01, Vec3(0, 0, 1));
      add_quad(mesh, at(i, j, nz), at(i + 1, j, nz), at(i + 1, j + 1, nz),
               at(i, j + 1, nz), if02, Vec3(0, 0, -1));
      add_quad(mesh, at(i, j, nzh), at(i + 1, j, nzh), at(i + 1, j + 1, nzh),
               at(i, j + 1, nzh), if12, Vec3(0, 0, 1));
    }
  for (int j = 0; j < ny; ++j)
    for (int k = 0; k < nz; ++k) {
      add_quad(mesh, at(0, j, k), at(0, j + 1, k), at(0, j + 1, k + 1),
               at(0, j, k + 1), side_iface(k), Vec3(1, 0, 0));
      add_quad(mesh, at(nx, j, k), at(nx, j + 1, k), at(nx, j + 1, k + 1),
               at(nx, j, k + 1), side_iface(k), Vec3(-1, 0, 0));
    }
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < nz; ++k) {
      add_quad(mesh, at(i, 0, k), at(i + 1, 0, k), at(i + 1, 0, k + 1),
               at(i, 0, k + 1), side_iface(k), Vec3(0, 1, 0));
      add_quad(mesh, at(i, ny, k), at(i + 1, ny, k), at(i + 1, ny, k + 1),
               at(i, ny, k + 1), side_iface(k), Vec3(0, -1, 0));
    }
  return mesh;
}

SkeletonMesh gen_concentric_cuboids(const std::vector<Real>& radii, Real height,
                                    Real h) {
  if (radii.size() < 2 || radii[0] != 0)
    throw std::invalid_argument(
        "gen_concentric_cuboids: radii must start at 0 and list at least one "
        "shell");
  for (size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1])
      throw std::invalid_argument(
          "gen_concentric_cuboids: radii must be strictly increasing");
  if (height <= 0 || h <= 0)
    throw std::invalid_argument(
        "gen_concentric_cuboids: height and h must be positive");
  if (h > height)
    throw std::invalid_argument(
        "gen_concentric_cuboids: h larger than height gives a degenerate "
        "mesh");

  const int M = static_cast<int>(radii.size()) - 1;  // subdomains 1..M
  // 1-D lateral breakpoints: every shell radius lands exactly on a grid
  // line; ip[i] is the index of radii[i] within the positive half.
  std::vector<Real> pos{0};
  std::vector<int> ip{0};
  for (int i = 1; i <= M; ++i) {
    auto seg = linspace(radii[i - 1], radii[i],
                        ceil_div(radii[i] - radii[i - 1], h));
    pos.insert(pos.end(), seg.begin() + 1, seg.end());
    ip.push_back(static_cast<int>(pos.size()) - 1);
  }
  const int np = static_cast<int>(pos.size());
  const int C = np - 1;  // index of 0 in the mirrored list
  std::vector<Real> cs(2 * np - 1);
  for (int q = 0; q < np; ++q) {
    cs[C + q] = pos[q];
    cs[C - q] = -pos[q];
  }
  const int nz = ceil_div(height, h);
  const auto zs = linspace(0, height, nz);

  SkeletonMesh mesh;
  GridVertices vid{mesh, {}};
  auto at = [&](int q, int s, int k) {
    return vid(q, s, k, Vec3(cs[q], cs[s], zs[k]));
  };
  auto cell_subdomain = [&](int q, int s) {
    // Cells never straddle a shell radius, so the midpoint level is safe.
    Real level = std::max(std::abs(cs[q] + cs[q + 1]) / 2,
                          std::abs(cs[s] + cs[s + 1]) / 2);
    auto it = std::upper_bound(radii.begin(), radii.end(), level);
    return std::min<int>(static_cast<int>(it - radii.begin()), M);
  };
  std::vector<int> cap_iface(M + 1, -1);
  for (int i = 1; i <= M; ++i) cap_iface[i] = mesh.interface_index({0, i});

  const int nq = 2 * np - 2;
  for (int q = 0; q < nq; ++q)
    for (int s = 0; s < nq; ++s) {
      int iface = cap_iface[cell_subdomain(q, s)];
      add_quad(mesh, at(q, s, 0), at(q + 1, s, 0), at(q + 1, s + 1, 0),
               at(q, s + 1, 0), iface, Vec3(0, 0, 1));
      add_quad(mesh, at(q, s, nz), at(q + 1, s, nz), at(q + 1, s + 1, nz),
               at(q, s + 1, nz), iface, Vec3(0, 0, -1));
    }
  // Vertical walls at each shell radius: between shells the stored normal
  // points outward (lo = inner shell); the outermost wall faces domain 0 so
  // it points inward.
  for (int l = 1; l <= M; ++l) {
    int iface = l < M ? mesh.interface_index({l, l + 1})
                      : mesh.interface_index({0, M});
    Real dir = l < M ? 1.0 : -1.0;
    int qp = C + ip[l], qm = C - ip[l];
    for (int s = qm; s < qp; ++s)
      for (int k = 0; k < nz; ++k) {
        add_quad(mesh, at(qp, s, k), at(qp, s + 1, k), at(qp, s + 1, k + 1),
                 at(qp, s, k + 1), iface, Vec3(dir, 0, 0));
        add_quad(mesh, at(qm, s, k), at(qm, s + 1, k), at(qm, s + 1, k + 1),
                 at(qm, s, k + 1), iface, Vec3(-dir, 0, 0));
        add_quad(mesh, at(s, qp, k), at(s + 1, qp, k), at(s + 1, qp, k + 1),
                 at(s, qp, k + 1), iface, Vec3(0, dir, 0));
        add_quad(mesh, at(s, qm, k), at(s + 1, qm, k), at(s + 1, qm, k + 1),
                 at(s, qm, k + 1), iface, Vec3(0, -dir, 0));
      }
  }
  return mesh;
}

// ---- I/O --------------------------------------------------------------------

SkeletonMesh read_msh(const std::string& path,
                      const std::map<int, std::pair<int, int>>& tag_map) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open mesh file: " + path);
  std::string line;
  int lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(f, line))
      throw std::runtime_error(path + ": unexpected end of file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  auto fail = [&](const std::string& what) {
    return std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                              what);
  };

  SkeletonMesh mesh;
  std::map<long, int> node_of;
  bool saw_nodes = false, saw_elements = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "$MeshFormat") {
      next_line();
      std::istringstream ss(line);
      std::string version;
      ss >> version;
      if (version.rfind("2.2", 0) != 0)
        throw fail("unsupported msh version '" + version +
                   "' (need ASCII 2.2)");
      next_line();
      if (line != "$EndMeshFormat") throw fail("expected $EndMeshFormat");
    } else if (line == "$Nodes") {
      next_line();
      long count = 0;
      try {
        count = std::stol(line);
      } catch (...) {
        throw fail("bad node count");
      }
      for (long i = 0; i < count; ++i) {
        next_line();
        std::istringstream ss(line);
        long id;
        Real x, y, z;
        if (!(ss >> id >> x >> y >> z)) throw fail("bad node line");
        if (!node_of.emplace(id, add_vertex(mesh, Vec3(x, y, z))).second)
          throw fail("duplicate node id " + std::to_string(id));
      }
      next_line();
      if (line != "$EndNodes") throw fail("expected $EndNodes");
      saw_nodes = true;
    } else if (line == "$Elements") {
      next_line();
      long count = 0;
      try {
        count = std::stol(line);
      } catch (...) {
        throw fail("bad element count");
      }
      for (long i = 0; i < count; ++i) {
        next_line();
        std::istringstream ss(line);
        long id;
        int type, ntags;
        if (!(ss >> id >> type >> ntags)) throw fail("bad element line");
        std::vector<int> tags(ntags);
        for (int& t : tags)
          if (!(ss >> t)) throw fail("bad element tags");
        if (type == 15 || type == 1) continue;  // points/lines: ignore
        if (type != 2)
          throw fail("unsupported element type " + std::to_string(type) +
                     " in element " + std::to_string(id) +
                     " (only 3-node triangles)");
        if (ntags < 1)
          throw fail("element " + std::to_string(id) +
                     " has no physical tag");
        auto mapped = tag_map.find(tags[0]);
        if (mapped == tag_map.end())
          throw fail("physical tag " + std::to_string(tags[0]) +
                     " of element " + std::to_string(id) +
                     " missing from tag map");
        long v[3];
        if (!(ss >> v[0] >> v[1] >> v[2])) throw fail("bad triangle vertices");
        std::array<int, 3> verts{};
        for (int j = 0; j < 3; ++j) {
          auto it = node_of.find(v[j]);
          if (it == node_of.end())
            throw fail("unknown node id " + std::to_string(v[j]));
          verts[j] = it->second;
        }
        auto [a, b] = mapped->second;
        if (a == b || a < 0 || b < 0)
          throw fail("tag map entry must name two distinct subdomains");
        if (a > b) {
          std::swap(a, b);  // normalize to lo -> hi by reversing the winding
          std::swap(verts[1], verts[2]);
        }
        int iface = mesh.interface_index({a, b});
        mesh.triangles.push_back(verts);
        mesh.tri_interface.push_back(iface);
      }
      next_line();
      if (line != "$EndElements") throw fail("expected $EndElements");
      saw_elements = true;
    } else if (!line.empty() && line[0] == '$') {
      std::string end = "$End" + line.substr(1);
      do {
        next_line();
      } while (line != end);
    }
  }
  if (!saw_nodes || !saw_elements)
    throw std::runtime_error(path + ": missing $Nodes or $Elements section");
  return mesh;
}

void write_msh(const SkeletonMesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write mesh file: " + path);
  f << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  f << std::setprecision(17);
  f << "$Nodes\n" << mesh.vertices.size() << "\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.vertices[i];
    f << i + 1 << " " << p.x() << " " << p.y() << " " << p.z() << "\n";
  }
  f << "$EndNodes\n$Elements\n" << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    int tag = mesh.tri_interface[t] + 1;
    f << t + 1 << " 2 2 " << tag << " " << tag << " " << v[0] + 1 << " "
      << v[1] + 1 << " " << v[2] + 1 << "\n";
  }
  f << "$EndElements\n";
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace mtf
