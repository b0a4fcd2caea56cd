#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mtf/quadrature.hpp"
#include "mtf/skeleton.hpp"
#include "mtf/spaces.hpp"

using namespace mtf;

namespace {

// Regular octahedron with vertices on the axes, wound so stored normals
// point into the solid (from the exterior 0 into subdomain 1).
SkeletonMesh octahedron() {
  SkeletonMesh m;
  m.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  const int xp = 0, xm = 1, yp = 2, ym = 3, zp = 4, zm = 5;
  auto tri = [&](int a, int b, int c) {
    m.triangles.push_back({a, b, c});
    m.tri_interface.push_back(0);
  };
  tri(xp, zp, yp);
  tri(yp, zp, xm);
  tri(xm, zp, ym);
  tri(ym, zp, xp);
  tri(xp, yp, zm);
  tri(ym, xp, zm);
  tri(xm, ym, zm);
  tri(yp, xm, zm);
  m.interfaces = {{0, 1}};
  return m;
}

// In-plane outward normal of the edge traversed p -> q by a triangle with
// unit normal n.
Vec3 edge_outnormal(const Vec3& p, const Vec3& q, const Vec3& n) {
  return ((q - p).normalized().cross(n)).normalized();
}

// Brute-force pairing entry sum over given triangles via eval_basis and a
// high-order rule.
Real pairing_entry(const TraceSpace& sp, int m, int n,
                   const std::vector<int>& tris) {
  const TriangleRule rule = gauss_triangle(10);
  Real total = 0.0;
  for (int t : tris) {
    const auto& dofs = sp.tri_dofs(t);
    bool has_m = false, has_n = false;
    for (int k = 0; k < 3; ++k) {
      has_m |= dofs[k] == m;
      has_n |= dofs[k] == n;
    }
    if (!has_m || !has_n) continue;
    Real acc = 0.0;
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const Vec3 fm = eval_basis(sp, m, t, rule.bary[q]).value;
      const Vec3 fn = eval_basis(sp, n, t, rule.bary[q]).value;
      acc += rule.w[q] * fn.dot(sp.normal(t).cross(fm));
    }
    total += 2.0 * sp.area(t) * acc;
  }
  return total;
}

}  // namespace

TEST_CASE("octahedron trace space: dofs, ordering, determinism") {
  SkeletonMesh m = octahedron();
  REQUIRE(validate_mesh(m).empty());
  SubdomainSurface surf = subdomain_boundary(m, 1);
  TraceSpace sp = build_trace_space(m, surf);

  CHECK(sp.subdomain() == 1);
  CHECK(sp.num_triangles() == 8);
  CHECK(sp.num_dofs() == 12);  // octahedron edge count

  // Ordering sorted by (v0, v1); signs +1/-1 per dof; slots consistent.
  for (int d = 0; d < sp.num_dofs(); ++d) {
    const RwgDof& dof = sp.dof(d);
    CHECK(dof.v0 < dof.v1);
    if (d > 0) {
      const RwgDof& prev = sp.dof(d - 1);
      CHECK((prev.v0 < dof.v0 ||
             (prev.v0 == dof.v0 && prev.v1 < dof.v1)));
    }
    CHECK(dof.sign[0] == 1.0);
    CHECK(dof.sign[1] == -1.0);
    CHECK(dof.length == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    for (int side = 0; side < 2; ++side) {
      const auto& tv = sp.tri_vertices(dof.tri[side]);
      const int k = dof.slot[side];
      std::set<int> edge = {tv[(k + 1) % 3], tv[(k + 2) % 3]};
      CHECK(edge == std::set<int>{dof.v0, dof.v1});
      CHECK(sp.tri_dofs(dof.tri[side])[k] == d);
      CHECK(sp.tri_signs(dof.tri[side])[k] == dof.sign[side]);
    }
  }
  // Every slot of every triangle carries a dof on a closed surface.
  for (int t = 0; t < sp.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) CHECK(sp.tri_dofs(t)[k] >= 0);

  // Deterministic regeneration.
  TraceSpace sp2 = build_trace_space(m, subdomain_boundary(m, 1));
  REQUIRE(sp2.num_dofs() == sp.num_dofs());
  for (int d = 0; d < sp.num_dofs(); ++d) {
    CHECK(sp2.dof(d).v0 == sp.dof(d).v0);
    CHECK(sp2.dof(d).v1 == sp.dof(d).v1);
    CHECK(sp2.dof(d).tri == sp.dof(d).tri);
    CHECK(sp2.dof(d).slot == sp.dof(d).slot);
  }

  // Exterior space: outward means into the solid; normals opposite.
  TraceSpace sp0 = build_trace_space(m, subdomain_boundary(m, 0));
  CHECK(sp0.num_dofs() == 12);
  for (int t = 0; t < sp.num_triangles(); ++t) {
    int skel = sp.skeleton_triangle(t);
    int t0 = sp0.local_triangle(skel);
    REQUIRE(t0 >= 0);
    CHECK((sp0.normal(t0) + sp.normal(t)).norm() == doctest::Approx(0.0).epsilon(1e-14));
  }
  CHECK(sp.local_triangle(999) == -1);
}

TEST_CASE("eval_basis: RWG values, divergence, flux") {
  SkeletonMesh m = octahedron();
  TraceSpace sp = build_trace_space(m, subdomain_boundary(m, 1));

  for (int d = 0; d < sp.num_dofs(); ++d) {
    const RwgDof& dof = sp.dof(d);
    Real div_integral = 0.0;
    for (int side = 0; side < 2; ++side) {
      const int t = dof.tri[side];
      const int k = dof.slot[side];
      // Vanishes at the opposite vertex.
      std::array<Real, 3> at_opp = {0, 0, 0};
      at_opp[k] = 1.0;
      CHECK(eval_basis(sp, d, t, at_opp).value.norm() ==
            doctest::Approx(0.0).epsilon(1e-14));
      // Divergence is constant +/- L/A; integrals over the two triangles
      // cancel.
      const BasisValue bv = eval_basis(sp, d, t, {1. / 3, 1. / 3, 1. / 3});
      CHECK(bv.div == doctest::Approx(dof.sign[side] * dof.length /
                                      sp.area(t)).epsilon(1e-13));
      div_integral += bv.div * sp.area(t);
      // Normal flux across the shared edge: density 1, total L (sign +1 out
      // of the plus triangle, into the minus one).
      const auto& tv_tri = sp.triangle(t);
      const std::array<Vec3, 3> p = {tv_tri.a, tv_tri.b, tv_tri.c};
      const Vec3& ep = p[(k + 1) % 3];
      const Vec3& eq = p[(k + 2) % 3];
      const Vec3 nu = edge_outnormal(ep, eq, sp.normal(t));
      Gauss1D g = gauss_legendre_01(5);
      Real flux = 0.0;
      for (int i = 0; i < g.size(); ++i) {
        std::array<Real, 3> bary = {0, 0, 0};
        bary[(k + 1) % 3] = 1.0 - g.x[i];
        bary[(k + 2) % 3] = g.x[i];
        flux += g.w[i] * eval_basis(sp, d, t, bary).value.dot(nu);
      }
      flux *= dof.length;
      CHECK(flux == doctest::Approx(dof.sign[side] * dof.length).epsilon(1e-12));
    }
    CHECK(div_integral == doctest::Approx(0.0).epsilon(1e-13));
    // Non-adjacent triangle throws.
    int other = 0;
    while (other == dof.tri[0] || other == dof.tri[1]) ++other;
    CHECK_THROWS_AS(eval_basis(sp, d, other, {1. / 3, 1. / 3, 1. / 3}),
                    std::invalid_argument);
  }
}

TEST_CASE("div-conformity across every edge on a curved split mesh") {
  SkeletonMesh m = gen_sphere(1.0, 0.45, true);
  REQUIRE(validate_mesh(m).empty());
  for (int sub = 0; sub <= 2; ++sub) {
    TraceSpace sp = build_trace_space(m, subdomain_boundary(m, sub));
    for (int d = 0; d < sp.num_dofs(); ++d) {
      const RwgDof& dof = sp.dof(d);
      for (Real s : {0.2, 0.5, 0.9}) {
        Real out_plus = 0.0, out_minus = 0.0;
        for (int side = 0; side < 2; ++side) {
          const int t = dof.tri[side];
          const int k = dof.slot[side];
          std::array<Real, 3> bary = {0, 0, 0};
          // Same physical point from both charts: order by global ids.
          const auto& tv = sp.tri_vertices(t);
          int pa = (k + 1) % 3, pb = (k + 2) % 3;
          if (tv[pa] != dof.v0) std::swap(pa, pb);
          bary[pa] = 1.0 - s;
          bary[pb] = s;
          const auto& tri = sp.triangle(t);
          const std::array<Vec3, 3> p = {tri.a, tri.b, tri.c};
          const Vec3 nu =
              edge_outnormal(p[(k + 1) % 3], p[(k + 2) % 3], sp.normal(t));
          const Real val = eval_basis(sp, d, t, bary).value.dot(nu);
          (side == 0 ? out_plus : out_minus) = val;
        }
        // Outflow of one triangle equals inflow of the other.
        CHECK(std::abs(out_plus + out_minus) <=
              1e-12 * std::max(std::abs(out_plus), std::abs(out_minus)));
      }
    }
  }
}

TEST_CASE("pairing matrix: antisymmetry, sparsity, entries, solves") {
  SkeletonMesh m = octahedron();
  TraceSpace sp = build_trace_space(m, subdomain_boundary(m, 1));
  PairingMatrix G = build_pairing(sp);

  REQUIRE(G.size() == 12);
  Eigen::MatrixXd Gd = Eigen::MatrixXd(G.matrix());
  CHECK((Gd + Gd.transpose()).norm() <= 1e-13 * Gd.norm());
  CHECK(G.matrix().nonZeros() <= 5 * sp.num_dofs());

  // Zero density pairs to zero.
  CHECK((Gd * Eigen::VectorXd::Zero(12)).norm() == 0.0);

  // Brute-force entries: distinct dofs share at most one triangle.
  int checked_single = 0;
  for (int mm = 0; mm < sp.num_dofs(); ++mm)
    for (int nn = 0; nn < sp.num_dofs(); ++nn) {
      if (mm == nn) continue;
      std::vector<int> shared;
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
          if (sp.dof(mm).tri[s1] == sp.dof(nn).tri[s2])
            shared.push_back(sp.dof(mm).tri[s1]);
      if (shared.empty()) {
        CHECK(Gd(mm, nn) == 0.0);
        continue;
      }
      const Real ref = pairing_entry(sp, mm, nn, shared);
      CHECK(Gd(mm, nn) == doctest::Approx(ref).epsilon(1e-10));
      REQUIRE(shared.size() == 1);
      checked_single++;
    }
  CHECK(checked_single > 0);

  // Mass matrix: symmetric positive definite, and mass_solve inverts it for
  // real, complex, and matrix right-hand sides.
  Eigen::MatrixXd Md = Eigen::MatrixXd(G.mass());
  CHECK((Md - Md.transpose()).norm() <= 1e-13 * Md.norm());
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Md)
            .eigenvalues()
            .minCoeff() > 0.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<Real> unif(-1, 1);
  Eigen::VectorXd br(12);
  VectorXc bc(12);
  for (int i = 0; i < 12; ++i) {
    br[i] = unif(rng);
    bc[i] = Complex(unif(rng), unif(rng));
  }
  CHECK((G.mass() * G.mass_solve(br) - br).norm() <= 1e-10 * br.norm());
  CHECK((G.mass() * G.mass_solve(bc) - bc).norm() <= 1e-10 * bc.norm());
  MatrixXc Bc = MatrixXc::Random(12, 3);
  CHECK((G.mass() * G.mass_solve(Bc) - Bc).norm() <= 1e-10 * Bc.norm());
  // Brute-force mass entry against eval_basis with a high-order rule.
  {
    const TriangleRule r10 = gauss_triangle(10);
    int mm = 0, nn = sp.tri_dofs(0)[1];
    mm = sp.tri_dofs(0)[0];
    Real ref = 0.0;
    for (int t = 0; t < sp.num_triangles(); ++t) {
      const auto& dofs = sp.tri_dofs(t);
      bool has_m = false, has_n = false;
      for (int k = 0; k < 3; ++k) {
        has_m |= dofs[k] == mm;
        has_n |= dofs[k] == nn;
      }
      if (!has_m || !has_n) continue;
      Real acc = 0.0;
      for (size_t q = 0; q < r10.bary.size(); ++q)
        acc += r10.w[q] * eval_basis(sp, mm, t, r10.bary[q])
                              .value.dot(eval_basis(sp, nn, t, r10.bary[q]).value);
      ref += 2.0 * sp.area(t) * acc;
    }
    CHECK(Md(mm, nn) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("negating all swaps negates the pairing matrix") {
  SkeletonMesh m = gen_sphere(1.0, 0.6, false);
  SubdomainSurface surf = subdomain_boundary(m, 1);
  TraceSpace sp = build_trace_space(m, surf);
  PairingMatrix G = build_pairing(sp);

  SubdomainSurface flipped = surf;
  for (auto& s : flipped.swap) s = -s;
  for (auto& pr : flipped.parts) pr.second = -pr.second;
  TraceSpace spf = build_trace_space(m, flipped);
  PairingMatrix Gf = build_pairing(spf);

  REQUIRE(spf.num_dofs() == sp.num_dofs());
  Eigen::MatrixXd diff = Eigen::MatrixXd(G.matrix() + Gf.matrix());
  CHECK(diff.norm() <= 1e-13 * Eigen::MatrixXd(G.matrix()).norm());
  // The mass matrix does not see the orientation flip.
  Eigen::MatrixXd mdiff = Eigen::MatrixXd(G.mass() - Gf.mass());
  CHECK(mdiff.norm() <= 1e-13 * Eigen::MatrixXd(G.mass()).norm());
}

TEST_CASE("split sphere at ten points per wavelength: dof budget") {
  const Real k0 = 3.0;
  const Real h = mesh_size_from_ppw(10.0, k0);
  SkeletonMesh m = gen_sphere(1.0, h, true);
  REQUIRE(validate_mesh(m).empty());
  int total = 0;
  std::array<int, 3> counts{};
  for (int sub = 0; sub <= 2; ++sub) {
    TraceSpace sp = build_trace_space(m, subdomain_boundary(m, sub));
    counts[sub] = sp.num_dofs();
    total += 2 * sp.num_dofs();  // electric + magnetic traces
  }
  // Same order as the reference total of 6360 unknowns.
  CHECK(total >= 6360 / 3);
  CHECK(total <= 6360 * 3);
  // The split halves should be nearly balanced.
  CHECK(std::abs(counts[1] - counts[2]) <= counts[1] / 10);
  MESSAGE("split-sphere dof counts N0=", counts[0], " N1=", counts[1],
          " N2=", counts[2], " total=", total);
}

TEST_CASE("mass lifts stay accurate on curved and split meshes") {
  for (bool split : {false, true}) {
    SkeletonMesh m = gen_sphere(1.0, 0.5, split);
    for (int sub = 1; sub <= (split ? 2 : 1); ++sub) {
      TraceSpace sp = build_trace_space(m, subdomain_boundary(m, sub));
      PairingMatrix G = build_pairing(sp);
      std::mt19937 rng(99);
      std::uniform_real_distribution<Real> unif(-1, 1);
      Eigen::VectorXd b(sp.num_dofs());
      for (int i = 0; i < b.size(); ++i) b[i] = unif(rng);
      Eigen::VectorXd x = G.mass_solve(b);
      CHECK((G.mass() * x - b).norm() <= 1e-10 * b.norm());
    }
  }
}
