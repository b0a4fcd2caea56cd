#include "mtf/system.hpp"

#include <cmath>
#include <stdexcept>

#include "mtf/quadrature.hpp"

namespace mtf {

namespace {

// Apply a real sparse matrix to a complex vector.
VectorXc sparse_apply(const SparseReal& A, const VectorXc& x) {
  return A * x.real() + Complex(0, 1) * (A * x.imag());
}

// Plain complex cross product. (Eigen's cross() conjugates the result for
// complex operands, which is not the bilinear product wanted here.)
Eigen::Vector3cd ccross(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
  return Eigen::Vector3cd(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
                          a(0) * b(1) - a(1) * b(0));
}

// Interpolate a tangential trace field onto RWG coefficients by edge fluxes:
// c_m = (1/L_m) Int_{e_m} F . nu ds with nu the in-plane edge normal oriented
// out of the dof's positive triangle.  The callable receives the quadrature
// point and the (positive triangle's) outward surface normal.
template <class F>
VectorXc interp_trace(const TraceSpace& sp, F&& field) {
  const Gauss1D g = gauss_legendre_01(8);
  VectorXc c(sp.num_dofs());
  for (int m = 0; m < sp.num_dofs(); ++m) {
    const RwgDof& d = sp.dof(m);
    const int t = d.tri[0];
    const auto& gid = sp.tri_vertices(t);
    const Triangle& tri = sp.triangle(t);
    const std::array<Vec3, 3> v{tri.a, tri.b, tri.c};
    Vec3 p0 = v[0], p1 = v[1];
    const Vec3 popp = v[static_cast<size_t>(d.slot[0])];
    for (int s = 0; s < 3; ++s) {
      if (gid[s] == d.v0) p0 = v[s];
      if (gid[s] == d.v1) p1 = v[s];
    }
    const Vec3 tau = (p1 - p0).normalized();
    Vec3 nu = tau.cross(sp.normal(t));
    if (nu.dot(popp - Real(0.5) * (p0 + p1)) > 0) nu = -nu;
    Complex acc = 0;
    for (int q = 0; q < g.size(); ++q) {
      const Vec3 x = p0 + g.x[q] * (p1 - p0);
      const Eigen::Vector3cd val = field(x, sp.normal(t));
      acc += g.w[q] * (val(0) * nu(0) + val(1) * nu(1) + val(2) * nu(2));
    }
    c(m) = acc;
  }
  return c;
}

// Tested incident traces on one space: out.head(N) are the electric
// functionals -Int E_inc . phi_m, out.tail(N) the rho-scaled magnetic ones
// -rho Int (d x p) e^{ik0 d.x} . phi_m.
VectorXc tested_incident(const IncidentField& inc, const TraceSpace& sp, Real rho) {
  const int N = sp.num_dofs();
  const TriangleRule rule = gauss_triangle(6);
  VectorXc out = VectorXc::Zero(2 * N);
  for (int t = 0; t < sp.num_triangles(); ++t) {
    const Triangle& tri = sp.triangle(t);
    const Real scale = 2.0 * sp.area(t);
    const auto& dofs = sp.tri_dofs(t);
    const auto& signs = sp.tri_signs(t);
    const std::array<Vec3, 3> v{tri.a, tri.b, tri.c};
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const Vec3 x = tri.at(rule.bary[q]);
      const Eigen::Vector3cd e = inc.field(x);
      const Eigen::Vector3cd h = inc.scaled_curl(x);
      for (int s = 0; s < 3; ++s) {
        if (dofs[s] < 0) continue;
        const RwgDof& d = sp.dof(dofs[s]);
        const Real coef = signs[s] * d.length / (2.0 * sp.area(t));
        const Vec3 phi_dir = Vec3(x - v[static_cast<size_t>(s)]);
        const Real w = rule.w[q] * scale * coef;
        out(dofs[s]) -= w * (e(0) * phi_dir(0) + e(1) * phi_dir(1) + e(2) * phi_dir(2));
        out(N + dofs[s]) -=
            rho * w * (h(0) * phi_dir(0) + h(1) * phi_dir(1) + h(2) * phi_dir(2));
      }
    }
  }
  return out;
}

}  // namespace

IncidentField::IncidentField(const Eigen::Vector3cd& p_, const Vec3& d_, Real k0_)
    : p(p_), d(d_), k0(k0_) {
  if (std::abs(d.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("IncidentField: direction must be a unit vector");
  if (!(k0 > 0)) throw std::invalid_argument("IncidentField: k0 must be positive");
}

Eigen::Vector3cd IncidentField::field(const Vec3& x) const {
  return p * std::polar(1.0, k0 * d.dot(x));
}

Eigen::Vector3cd IncidentField::scaled_curl(const Vec3& x) const {
  const Eigen::Vector3cd dp(d(1) * p(2) - d(2) * p(1), d(2) * p(0) - d(0) * p(2),
                            d(0) * p(1) - d(1) * p(0));
  return dp * std::polar(1.0, k0 * d.dot(x));
}

VectorXc BlockOperator::apply(const VectorXc& x) const {
  if (x.size() != size()) throw std::invalid_argument("BlockOperator::apply: size mismatch");
  VectorXc y(size());
  const int M = num_subdomains();
  for (int i = 0; i < M; ++i) {
    y.segment(offsets[i], 2 * diagonal[i].n) =
        2.0 * diagonal[i].apply(x.segment(offsets[i], 2 * diagonal[i].n));
  }
  for (const auto& [key, C] : coupling) {
    const auto [i, j] = key;
    const Eigen::Index ni = diagonal[i].n, nj = diagonal[j].n;
    y.segment(offsets[i], ni) += C * x.segment(offsets[j], nj);
    y.segment(offsets[i] + ni, ni) += C * x.segment(offsets[j] + nj, nj);
  }
  return y;
}

MatrixXc BlockOperator::dense() const {
  MatrixXc out = MatrixXc::Zero(size(), size());
  const int M = num_subdomains();
  for (int i = 0; i < M; ++i) {
    out.block(offsets[i], offsets[i], 2 * diagonal[i].n, 2 * diagonal[i].n) =
        2.0 * diagonal[i].dense();
  }
  for (const auto& [key, C] : coupling) {
    const auto [i, j] = key;
    const Eigen::Index ni = diagonal[i].n, nj = diagonal[j].n;
    const MatrixXc Cd = MatrixXc(C);
    out.block(offsets[i], offsets[j], ni, nj) = Cd;
    out.block(offsets[i] + ni, offsets[j] + nj, ni, nj) = Cd;
  }
  return out;
}

VectorXc BlockOperator::pairing_apply(const VectorXc& x) const {
  if (x.size() != size()) throw std::invalid_argument("pairing_apply: size mismatch");
  VectorXc y(size());
  for (int i = 0; i < num_subdomains(); ++i) {
    const Eigen::Index n = diagonal[i].n;
    const SparseReal& G = pairings[i].matrix();
    y.segment(offsets[i], n) = sparse_apply(G, x.segment(offsets[i], n));
    y.segment(offsets[i] + n, n) = sparse_apply(G, x.segment(offsets[i] + n, n));
  }
  return y;
}

VectorXc BlockOperator::mass_solve(const VectorXc& x) const {
  if (x.size() != size()) throw std::invalid_argument("mass_solve: size mismatch");
  VectorXc y(size());
  for (int i = 0; i < num_subdomains(); ++i) {
    const Eigen::Index n = diagonal[i].n;
    y.segment(offsets[i], n) = pairings[i].mass_solve(VectorXc(x.segment(offsets[i], n)));
    y.segment(offsets[i] + n, n) =
        pairings[i].mass_solve(VectorXc(x.segment(offsets[i] + n, n)));
  }
  return y;
}

VectorXc BlockOperator::lift(const VectorXc& x) const {
  VectorXc y = mass_solve(x);
  y = pairing_apply(y);
  y = mass_solve(y);
  return -y;
}

TraceVector BlockOperator::zero_vector() const {
  TraceVector v;
  v.offsets = offsets;
  v.data = VectorXc::Zero(size());
  return v;
}

BlockOperator build_mtf(const SkeletonMesh& mesh, const MaterialTable& materials,
                        const AssemblyOptions& opt) {
  const int M = mesh.num_subdomains();
  if (materials.size() != M)
    throw std::invalid_argument("build_mtf: material table size does not match mesh");

  BlockOperator op;
  op.materials = materials;
  op.offsets.assign(1, 0);
  for (int i = 0; i < M; ++i) {
    op.spaces.push_back(build_trace_space(mesh, subdomain_boundary(mesh, i)));
    op.pairings.push_back(build_pairing(op.spaces.back()));
    op.diagonal.push_back(assemble_multitrace(op.spaces.back(), materials, opt));
    op.offsets.push_back(op.offsets.back() + 2 * op.spaces.back().num_dofs());
  }

  const InterfaceGraph graph = interface_graph(mesh);
  for (int i = 0; i < M; ++i) {
    for (int j : graph.neighbors[i]) {
      // Block (i,j): rows test on space_i, columns from space_j.
      op.coupling[{i, j}] = assemble_transmission(op.spaces[j], op.spaces[i]);
    }
  }
  return op;
}

TraceVector build_rhs(const IncidentField& incident, const BlockOperator& op) {
  if (incident.k0 != op.materials.k0)
    throw std::invalid_argument("build_rhs: incident wavenumber disagrees with materials");
  TraceVector rhs = op.zero_vector();
  rhs.block(0) = 2.0 * tested_incident(incident, op.spaces[0], op.materials.rho(0));
  return rhs;
}

TraceVector interpolate_incident(const IncidentField& incident, const BlockOperator& op) {
  TraceVector out = op.zero_vector();
  for (int i = 0; i < op.num_subdomains(); ++i) {
    const TraceSpace& sp = op.spaces[i];
    const int N = sp.num_dofs();
    const Real rho = op.materials.rho(i);
    const VectorXc e = interp_trace(sp, [&](const Vec3& x, const Vec3& n) {
      return ccross(incident.field(x), n.cast<Complex>());
    });
    const VectorXc h = interp_trace(sp, [&](const Vec3& x, const Vec3& n) {
      return Eigen::Vector3cd(rho * ccross(incident.scaled_curl(x), n.cast<Complex>()));
    });
    out.block(i).head(N) = e;
    out.block(i).tail(N) = h;
  }
  return out;
}

VectorXc StfSystem::apply(const VectorXc& x) const {
  return exterior.apply(x) + interior.apply(x);
}

MatrixXc StfSystem::dense() const { return exterior.dense() + interior.dense(); }

VectorXc StfSystem::mass_solve(const VectorXc& x) const {
  const Eigen::Index n = space.num_dofs();
  VectorXc y(2 * n);
  y.head(n) = pairing.mass_solve(VectorXc(x.head(n)));
  y.tail(n) = pairing.mass_solve(VectorXc(x.tail(n)));
  return y;
}

StfSystem build_stf(const SkeletonMesh& mesh, const MaterialTable& materials,
                    const AssemblyOptions& opt) {
  if (mesh.num_subdomains() != 2)
    throw std::invalid_argument("build_stf: single-trace form needs exactly one inclusion");
  if (materials.size() != 2)
    throw std::invalid_argument("build_stf: material table size does not match mesh");

  TraceSpace space = build_trace_space(mesh, subdomain_boundary(mesh, 0));
  PairingMatrix pairing = build_pairing(space);
  MultitraceBlock exterior = assemble_multitrace(space, materials, opt);

  // The interior Calderon block lives on the same exterior-oriented space:
  // the principal-value matrices carry no orientation, and in the shared
  // orientation the scaled interior Cauchy data coincide with the exterior
  // ones, so the two blocks combine additively.
  TkMatrices tk = assemble_tk(space, materials.k(1), opt);
  MultitraceBlock interior;
  interior.T = std::move(tk.T);
  interior.K = std::move(tk.K);
  interior.k = materials.k(1);
  interior.rho = materials.rho(1);
  interior.n = space.num_dofs();

  return StfSystem{std::move(space), std::move(pairing), std::move(exterior),
                   std::move(interior), materials};
}

VectorXc build_stf_rhs(const IncidentField& incident, const StfSystem& sys) {
  if (incident.k0 != sys.materials.k0)
    throw std::invalid_argument("build_stf_rhs: incident wavenumber disagrees with materials");
  return tested_incident(incident, sys.space, sys.materials.rho(0));
}

ApplyFn lifted_operator(const BlockOperator& op) {
  const BlockOperator* p = &op;  // caller keeps the operator alive
  return [p](const VectorXc& x) { return p->mass_solve(p->apply(x)); };
}

ApplyFn lifted_operator(const StfSystem& sys) {
  const StfSystem* p = &sys;
  return [p](const VectorXc& x) { return p->mass_solve(p->apply(x)); };
}

}  // namespace mtf
