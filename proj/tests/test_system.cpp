#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <utility>

#include "mtf/krylov.hpp"
#include "mtf/system.hpp"

using namespace mtf;

namespace {

// Regular octahedron wound so effective normals of subdomain 1 point outward;
// `shift` translates it and `subdomain` picks the interior tag.
SkeletonMesh octahedron(const Vec3& shift = Vec3(0, 0, 0), int subdomain = 1) {
  SkeletonMesh m;
  m.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (auto& v : m.vertices) v += shift;
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
  m.interfaces = {{0, subdomain}};
  return m;
}

// Two disjoint octahedra: subdomain 1 at the origin, subdomain 2 shifted.
SkeletonMesh two_octahedra() {
  SkeletonMesh m = octahedron();
  const SkeletonMesh other = octahedron(Vec3(4, 0, 0), 2);
  const int base = static_cast<int>(m.vertices.size());
  m.vertices.insert(m.vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& t : other.triangles)
    m.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  for (size_t i = 0; i < other.triangles.size(); ++i) m.tri_interface.push_back(1);
  m.interfaces = {{0, 1}, {0, 2}};
  return m;
}

VectorXc random_complex(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<Real> nd;
  VectorXc v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(nd(rng), nd(rng));
  return v;
}

const IncidentField case_a_wave() {
  return IncidentField(Eigen::Vector3cd(0, 0, 1), Vec3(1, 0, 0), 3.0);
}

}  // namespace

TEST_CASE("incident plane wave: formulas and validation") {
  const Real k0 = 5.0;
  const Vec3 d = Vec3(1, 2, 3).normalized();
  const Eigen::Vector3cd p(Complex(1, 1), Complex(2, 0), Complex(-1, -1.0 / 3.0));
  const IncidentField inc(p, d, k0);

  const Vec3 x(0.3, -0.2, 0.5);
  const Complex phase = std::polar(1.0, k0 * d.dot(x));
  const Eigen::Vector3cd E = inc.field(x);
  CHECK(std::abs(E(0) - p(0) * phase) <= 1e-15);
  CHECK(std::abs(E(2) - p(2) * phase) <= 1e-15);

  // (1/ik) curl E = (d x p) e^{ik d.x}, with the plain bilinear cross product
  const Eigen::Vector3cd dp(d(1) * p(2) - d(2) * p(1), d(2) * p(0) - d(0) * p(2),
                            d(0) * p(1) - d(1) * p(0));
  const Eigen::Vector3cd C = inc.scaled_curl(x);
  CHECK((C - dp * phase).norm() <= 1e-14 * dp.norm());

  CHECK_THROWS_AS(IncidentField(p, Vec3(1, 1, 0), k0), std::invalid_argument);
  CHECK_THROWS_AS(IncidentField(p, Vec3(1, 0, 0), 0.0), std::invalid_argument);
}

TEST_CASE("block operator on one inclusion: structure and dense oracle") {
  SkeletonMesh mesh = octahedron();
  const MaterialTable mat = MaterialTable::homogeneous(3.0, 2, 2.1);
  BlockOperator op = build_mtf(mesh, mat);

  REQUIRE(op.num_subdomains() == 2);
  const Eigen::Index n0 = op.spaces[0].num_dofs(), n1 = op.spaces[1].num_dofs();
  CHECK(n0 == 12);
  CHECK(n1 == 12);
  CHECK(op.offsets == std::vector<Eigen::Index>({0, 24, 48}));
  CHECK(op.size() == 2 * (n0 + n1));

  // both off-diagonal blocks present and nonzero
  REQUIRE(op.coupling.count({0, 1}) == 1);
  REQUIRE(op.coupling.count({1, 0}) == 1);
  CHECK(op.coupling.at({0, 1}).nonZeros() > 0);
  CHECK(op.coupling.at({1, 0}).nonZeros() > 0);

  // matvec agrees with the dense assembly
  const MatrixXc D = op.dense();
  REQUIRE(D.rows() == op.size());
  const VectorXc v = random_complex(op.size(), 17);
  const VectorXc via_dense = D * v;
  CHECK((op.apply(v) - via_dense).norm() / via_dense.norm() <= 1e-13);

  // layout helpers
  TraceVector z = op.zero_vector();
  CHECK(z.num_blocks() == 2);
  CHECK(z.block_size(0) == 24);
  CHECK(z.data.norm() == 0.0);
  z.block(1)[3] = Complex(2, 1);
  CHECK(z.data[op.offsets[1] + 3] == Complex(2, 1));

  CHECK(op.lift(VectorXc::Zero(op.size())).norm() == 0.0);

  CHECK_THROWS_AS(build_mtf(mesh, MaterialTable::homogeneous(3.0, 3, 2.1)),
                  std::invalid_argument);
}

TEST_CASE("coupling pattern follows the interface graph") {
  const MaterialTable mat3 = MaterialTable::homogeneous(3.0, 3, 2.1);

  // two disjoint inclusions: no (1,2) coupling
  SkeletonMesh disjoint = two_octahedra();
  REQUIRE(validate_mesh(disjoint).empty());
  BlockOperator op = build_mtf(disjoint, mat3);
  std::set<std::pair<int, int>> keys;
  for (const auto& [k, C] : op.coupling) keys.insert(k);
  CHECK(keys == std::set<std::pair<int, int>>(
                    {{0, 1}, {1, 0}, {0, 2}, {2, 0}}));

  // split sphere: complete connectivity, all nine blocks nonzero
  SkeletonMesh split = gen_sphere(1.0, 0.7, true);
  BlockOperator sp = build_mtf(split, mat3);
  std::set<std::pair<int, int>> skeys;
  for (const auto& [k, C] : sp.coupling) {
    CHECK(C.nonZeros() > 0);
    skeys.insert(k);
  }
  CHECK(skeys == std::set<std::pair<int, int>>(
                     {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}));
}

TEST_CASE("identical materials: incident traces solve the system, and the "
          "coupling sign is pinned") {
  const IncidentField inc = case_a_wave();
  std::vector<Real> rel, relrhs;
  for (const Real h : {0.52, 0.35}) {
    SkeletonMesh mesh = gen_sphere(1.0, h, false);
    const MaterialTable mat = MaterialTable::homogeneous(3.0, 2, 1.0);
    BlockOperator op = build_mtf(mesh, mat);
    const TraceVector c = interpolate_incident(inc, op);
    const TraceVector b = build_rhs(inc, op);

    const VectorXc Mc = op.apply(c.data);
    rel.push_back((Mc - b.data).norm() / b.data.norm());

    // flipping the transmission sign must break the identity at O(1)
    VectorXc Mc_flip = Mc;
    for (const auto& [key, C] : op.coupling) {
      const auto [i, j] = key;
      const Eigen::Index ni = op.diagonal[i].n, nj = op.diagonal[j].n;
      Mc_flip.segment(op.offsets[i], ni) -= 2.0 * (C * c.data.segment(op.offsets[j], nj));
      Mc_flip.segment(op.offsets[i] + ni, ni) -=
          2.0 * (C * c.data.segment(op.offsets[j] + nj, nj));
    }
    if (h == 0.52) CHECK((Mc_flip - b.data).norm() / b.data.norm() >= 1.0);

    // the tested right-hand side is the pairing of the interpolated traces
    const Eigen::Index n0 = 2 * op.diagonal[0].n;
    const VectorXc Gc = op.pairing_apply(c.data);
    relrhs.push_back((2.0 * Gc.head(n0) - b.data.head(n0)).norm() /
                     b.data.head(n0).norm());
  }
  CHECK(rel[0] <= 0.09);
  CHECK(rel[1] <= 0.055);
  CHECK(rel[1] < rel[0]);
  CHECK(relrhs[0] <= 0.10);
  CHECK(relrhs[1] < relrhs[0]);
}

TEST_CASE("right-hand side lives on block 0 only") {
  SkeletonMesh mesh = octahedron();
  const MaterialTable mat = MaterialTable::homogeneous(3.0, 2, 2.1);
  BlockOperator op = build_mtf(mesh, mat);

  // zero polarization -> zero data
  const IncidentField none(Eigen::Vector3cd::Zero(), Vec3(0, 1, 0), 3.0);
  CHECK(build_rhs(none, op).data.norm() == 0.0);

  // oblique elliptic excitation: block 0 nonzero, block 1 exactly zero
  const IncidentField oblique(
      Eigen::Vector3cd(Complex(1, 1), Complex(2, 0), Complex(-1, -1.0 / 3.0)),
      Vec3(1, 2, 3).normalized(), 3.0);
  const TraceVector b = build_rhs(oblique, op);
  CHECK(b.block(0).norm() > 0.0);
  CHECK(b.block(1).norm() == 0.0);
  CHECK(b.data.allFinite());

  // wavenumber disagreement is rejected
  const IncidentField wrongk(Eigen::Vector3cd(0, 0, 1), Vec3(1, 0, 0), 4.0);
  CHECK_THROWS_AS(build_rhs(wrongk, op), std::invalid_argument);
}

TEST_CASE("single-trace system: degenerate limit, identity, and guards") {
  // equal materials: the interior block reproduces the exterior one exactly,
  // so the operator collapses to 2 A_0
  SkeletonMesh oct = octahedron();
  const MaterialTable vac = MaterialTable::homogeneous(3.0, 2, 1.0);
  StfSystem deg = build_stf(oct, vac);
  CHECK((deg.dense() - 2.0 * deg.exterior.dense()).norm() == 0.0);

  // the incident traces satisfy (A_0 + A_1) c = G c at O(h)
  const IncidentField inc = case_a_wave();
  std::vector<Real> rel;
  for (const Real h : {0.7, 0.52}) {
    SkeletonMesh mesh = gen_sphere(1.0, h, false);
    StfSystem sys = build_stf(mesh, vac);
    BlockOperator op = build_mtf(mesh, vac);
    const TraceVector c = interpolate_incident(inc, op);
    const Eigen::Index n0 = 2 * op.diagonal[0].n;
    const VectorXc c0 = c.data.head(n0);
    const VectorXc Gc = op.pairing_apply(c.data).head(n0);
    rel.push_back((sys.apply(c0) - Gc).norm() / Gc.norm());
  }
  CHECK(rel[1] <= 0.09);
  CHECK(rel[1] < rel[0]);

  // single-inclusion precondition
  SkeletonMesh split = gen_sphere(1.0, 0.7, true);
  CHECK_THROWS_AS(build_stf(split, MaterialTable::homogeneous(3.0, 3, 2.1)),
                  std::invalid_argument);
}

TEST_CASE("dielectric sphere: single-trace and multi-trace solutions agree") {
  const IncidentField inc = case_a_wave();
  const MaterialTable mat = MaterialTable::homogeneous(3.0, 2, 2.1);
  std::vector<Real> diff;
  for (const Real h : {0.6, 0.52}) {
    SkeletonMesh mesh = gen_sphere(1.0, h, false);
    BlockOperator op = build_mtf(mesh, mat);
    const TraceVector b = build_rhs(inc, op);
    const auto mtf = gmres(lifted_operator(op), op.mass_solve(b.data), 1e-6, 800);
    REQUIRE(mtf.converged);

    StfSystem sys = build_stf(mesh, mat);
    const VectorXc bs = build_stf_rhs(inc, sys);
    const auto stf = gmres(lifted_operator(sys), sys.mass_solve(bs), 1e-6, 800);
    REQUIRE(stf.converged);

    const Eigen::Index n0 = 2 * op.diagonal[0].n;
    diff.push_back((mtf.x.head(n0) - stf.x).norm() / stf.x.norm());
  }
  CHECK(diff[1] <= 0.08);
  CHECK(diff[1] < diff[0]);
}
