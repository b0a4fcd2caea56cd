#include "mtf/bio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtf/quadrature.hpp"

namespace mtf {

namespace {

constexpr Real kFourPi = 4.0 * PI;

/// Per-triangle data for chart-free basis evaluation: slot k's basis is
/// phi_k(x) = coef[k] * (x - v[k]) with divergence 2*coef[k].
struct TriData {
  std::array<Vec3, 3> v;     // effective vertex positions
  std::array<int, 3> gid;    // effective skeleton vertex ids
  std::array<Real, 3> coef;  // sign * L / (2 * area)
  std::array<int, 3> dof;
  Vec3 centroid;
  Real diam = 0;
  Real two_area = 0;
};

std::vector<TriData> collect_tri_data(const TraceSpace& sp) {
  std::vector<TriData> out(sp.num_triangles());
  for (int t = 0; t < sp.num_triangles(); ++t) {
    TriData& d = out[t];
    const Triangle& tri = sp.triangle(t);
    d.v = {tri.a, tri.b, tri.c};
    d.gid = sp.tri_vertices(t);
    d.dof = sp.tri_dofs(t);
    const Real area = sp.area(t);
    d.two_area = 2 * area;
    for (int s = 0; s < 3; ++s)
      d.coef[s] = sp.tri_signs(t)[s] * sp.dof(d.dof[s]).length / (2 * area);
    d.centroid = (tri.a + tri.b + tri.c) / 3;
    d.diam = std::max({(tri.b - tri.a).norm(), (tri.c - tri.b).norm(),
                       (tri.a - tri.c).norm()});
  }
  return out;
}

/// Cached tensor-rule data on one triangle: physical points and basis values.
struct TriQuad {
  std::vector<Vec3> x;
  std::vector<std::array<Vec3, 3>> phi;
};

TriQuad cache_rule(const TriData& td, const TriangleRule& rule) {
  TriQuad q;
  q.x.resize(rule.size());
  q.phi.resize(rule.size());
  for (int i = 0; i < rule.size(); ++i) {
    const auto& b = rule.bary[i];
    const Vec3 x = b[0] * td.v[0] + b[1] * td.v[1] + b[2] * td.v[2];
    q.x[i] = x;
    for (int s = 0; s < 3; ++s) q.phi[i][s] = td.coef[s] * (x - td.v[s]);
  }
  return q;
}

/// Weighted kernel sums over one triangle pair; slot pair (a,b) is flattened
/// to 3*a+b with a the test slot (x variable) and b the trial slot (y).
struct PairAcc {
  Complex s0{};                  // sum w G
  std::array<Complex, 9> sv{};   // sum w G phi_a(x).phi_b(y)
  std::array<Complex, 9> sk{};   // sum w (grad_x G x phi_b(y)).phi_a(x)
};

inline void accumulate_point(Real k, const Vec3& x, const Vec3& y,
                             const std::array<Vec3, 3>& phix,
                             const std::array<Vec3, 3>& phiy, Real wt,
                             PairAcc& acc) {
  const Vec3 d = x - y;
  const Real r2 = d.squaredNorm();
  const Real r = std::sqrt(r2);
  const Complex g = std::polar(wt / (kFourPi * r), k * r);  // wt * G_k
  // wt * grad-factor: grad_x G = e^{ikr}(ikr-1)/(4 pi r^3) * (x-y)
  const Complex c = g * Complex(-1, k * r) / r2;
  acc.s0 += g;
  std::array<Vec3, 3> dxphi;
  for (int b = 0; b < 3; ++b) dxphi[b] = d.cross(phiy[b]);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      acc.sv[3 * a + b] += g * phix[a].dot(phiy[b]);
      acc.sk[3 * a + b] += c * dxphi[b].dot(phix[a]);
    }
}

/// Vertex permutations aligning the charts of a touching pair with the
/// singular-rule convention (shared simplex first, shared edge traversed the
/// same way on both charts).
struct ChartPerm {
  std::array<int, 3> px{{0, 1, 2}}, py{{0, 1, 2}};
  int shared = 0;
};

ChartPerm shared_perm(const TriData& A, const TriData& B) {
  ChartPerm pm;
  std::array<int, 3> sa{}, sb{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (A.gid[i] == B.gid[j]) {
        sa[pm.shared] = i;
        sb[pm.shared] = j;
        ++pm.shared;
      }
  if (pm.shared == 1) {
    pm.px = {sa[0], (sa[0] + 1) % 3, (sa[0] + 2) % 3};
    pm.py = {sb[0], (sb[0] + 1) % 3, (sb[0] + 2) % 3};
  } else if (pm.shared == 2) {
    if (A.gid[sa[0]] > A.gid[sa[1]]) {
      std::swap(sa[0], sa[1]);
      std::swap(sb[0], sb[1]);
    }
    pm.px = {sa[0], sa[1], 3 - sa[0] - sa[1]};
    pm.py = {sb[0], sb[1], 3 - sb[0] - sb[1]};
  }
  return pm;
}

void singular_pair(Real k, const TriData& A, const TriData& B,
                   const PairRule& rule, const ChartPerm& pm, PairAcc& acc) {
  std::array<Vec3, 3> phix, phiy;
  for (const PairPoint& p : rule.pts) {
    const Vec3 x = p.xb[0] * A.v[pm.px[0]] + p.xb[1] * A.v[pm.px[1]] +
                   p.xb[2] * A.v[pm.px[2]];
    const Vec3 y = p.yb[0] * B.v[pm.py[0]] + p.yb[1] * B.v[pm.py[1]] +
                   p.yb[2] * B.v[pm.py[2]];
    for (int s = 0; s < 3; ++s) {
      phix[s] = A.coef[s] * (x - A.v[s]);
      phiy[s] = B.coef[s] * (y - B.v[s]);
    }
    accumulate_point(k, x, y, phix, phiy, p.w, acc);
  }
}

void tensor_pair(Real k, const TriQuad& qx, const TriQuad& qy,
                 const TriangleRule& rule, PairAcc& acc) {
  const int nx = static_cast<int>(qx.x.size());
  const int ny = static_cast<int>(qy.x.size());
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      accumulate_point(k, qx.x[i], qy.x[j], qx.phi[i], qy.phi[j],
                       rule.w[i] * rule.w[j], acc);
}

/// Add one pair's contribution to T and K; `mirror` also adds the transposed
/// scatter, which equals the (b,a)-ordered pair contribution exactly (the
/// kernels are symmetric under the x/y swap), keeping both matrices
/// bitwise complex-symmetric.
void scatter(const TriData& ta, const TriData& tb, bool mirror, Real k,
             const PairAcc& acc, MatrixXc& T, MatrixXc& K, int ia, int ib) {
  const Real jac = ta.two_area * tb.two_area;
  const Complex ik(0, k);
  const Complex ikinv = k > 0 ? Real(1) / ik : Complex(0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Real divdiv = 4 * ta.coef[a] * tb.coef[b];
      const Complex tval = jac * (ik * acc.sv[3 * a + b] +
                                  ikinv * divdiv * acc.s0);
      const Complex kval = jac * acc.sk[3 * a + b];
      if (!std::isfinite(std::abs(tval)) || !std::isfinite(std::abs(kval)))
        throw std::runtime_error("operator assembly: non-finite entry on "
                                 "triangle pair (" + std::to_string(ia) +
                                 ", " + std::to_string(ib) + ")");
      T(ta.dof[a], tb.dof[b]) += tval;
      K(ta.dof[a], tb.dof[b]) += kval;
      if (mirror) {
        T(tb.dof[b], ta.dof[a]) += tval;
        K(tb.dof[b], ta.dof[a]) += kval;
      }
    }
}

}  // namespace

Complex kernel_eval(Real k, const Vec3& x, const Vec3& y) {
  const Real r = (x - y).norm();
  if (!(r > Real(0)))
    throw std::invalid_argument("kernel_eval: coincident points");
  return std::polar(Real(1) / (kFourPi * r), k * r);
}

TkMatrices assemble_tk(const TraceSpace& space, Real k,
                       const AssemblyOptions& opt) {
  if (k < 0) throw std::invalid_argument("assemble_tk: negative wavenumber");
  if (opt.singular_points < 2)
    throw std::invalid_argument("assemble_tk: need >= 2 singular points");
  const int N = space.num_dofs();
  const int F = space.num_triangles();
  TkMatrices out;
  out.T = MatrixXc::Zero(N, N);
  out.K = MatrixXc::Zero(N, N);

  const std::vector<TriData> td = collect_tri_data(space);
  const TriangleRule rule_reg = gauss_triangle(opt.regular_order);
  const TriangleRule rule_near = gauss_triangle(opt.near_order);
  std::vector<TriQuad> qreg(F), qnear(F);
  for (int t = 0; t < F; ++t) {
    qreg[t] = cache_rule(td[t], rule_reg);
    qnear[t] = cache_rule(td[t], rule_near);
  }
  const PairRule rule_c =
      singular_pair_rule(PairKind::Coincident, opt.singular_points);
  const PairRule rule_e =
      singular_pair_rule(PairKind::Edge, opt.singular_points);
  const PairRule rule_v =
      singular_pair_rule(PairKind::Vertex, opt.singular_points);
  const ChartPerm identity;

  for (int a = 0; a < F; ++a) {
    for (int b = a; b < F; ++b) {
      PairAcc acc;
      if (a == b) {
        singular_pair(k, td[a], td[a], rule_c, identity, acc);
      } else {
        const ChartPerm pm = shared_perm(td[a], td[b]);
        if (pm.shared == 2) {
          singular_pair(k, td[a], td[b], rule_e, pm, acc);
        } else if (pm.shared == 1) {
          singular_pair(k, td[a], td[b], rule_v, pm, acc);
        } else {
          const Real dist = (td[a].centroid - td[b].centroid).norm();
          const bool near =
              dist < opt.near_factor * Real(0.5) * (td[a].diam + td[b].diam);
          if (near)
            tensor_pair(k, qnear[a], qnear[b], rule_near, acc);
          else
            tensor_pair(k, qreg[a], qreg[b], rule_reg, acc);
        }
      }
      scatter(td[a], td[b], a != b, k, acc, out.T, out.K, a, b);
    }
  }
  return out;
}

MatrixXc assemble_efio(const TraceSpace& space, Real k,
                       const AssemblyOptions& opt) {
  if (!(k > 0)) throw std::invalid_argument("assemble_efio: requires k > 0");
  return assemble_tk(space, k, opt).T;
}

MatrixXc assemble_mfio(const TraceSpace& space, Real k,
                       const AssemblyOptions& opt) {
  return assemble_tk(space, k, opt).K;
}

VectorXc MultitraceBlock::apply(const VectorXc& eh) const {
  if (eh.size() != 2 * n)
    throw std::invalid_argument("MultitraceBlock::apply: size mismatch");
  VectorXc out(2 * n);
  out.head(n) = K * eh.head(n) + (Real(1) / rho) * (T * eh.tail(n));
  out.tail(n) = -rho * (T * eh.head(n)) + K * eh.tail(n);
  return out;
}

MatrixXc MultitraceBlock::dense() const {
  MatrixXc out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = K;
  out.topRightCorner(n, n) = (Real(1) / rho) * T;
  out.bottomLeftCorner(n, n) = -rho * T;
  out.bottomRightCorner(n, n) = K;
  return out;
}

MultitraceBlock assemble_multitrace(const TraceSpace& space,
                                    const MaterialTable& materials,
                                    const AssemblyOptions& opt) {
  const int i = space.subdomain();
  MultitraceBlock blk;
  blk.k = materials.k(i);
  blk.rho = materials.rho(i);
  blk.n = space.num_dofs();
  TkMatrices tk = assemble_tk(space, blk.k, opt);
  blk.T = std::move(tk.T);
  blk.K = std::move(tk.K);
  return blk;
}

SparseComplex assemble_transmission(const TraceSpace& space_i,
                                    const TraceSpace& space_j) {
  if (space_i.subdomain() == space_j.subdomain())
    throw std::invalid_argument("assemble_transmission: equal subdomains");
  SparseComplex X(space_j.num_dofs(), space_i.num_dofs());
  std::vector<Eigen::Triplet<Complex>> trips;
  const TriangleRule rule = gauss_triangle(2);  // integrand is quadratic

  for (int ti = 0; ti < space_i.num_triangles(); ++ti) {
    const int tj = space_j.local_triangle(space_i.skeleton_triangle(ti));
    if (tj < 0) continue;
    const Triangle& gi = space_i.triangle(ti);
    const Triangle& gj = space_j.triangle(tj);
    const std::array<Vec3, 3> vi{gi.a, gi.b, gi.c};
    const std::array<Vec3, 3> vj{gj.a, gj.b, gj.c};
    const Vec3 ni = space_i.normal(ti);
    const Real two_area = 2 * space_i.area(ti);
    std::array<Real, 3> ci, cj;
    for (int s = 0; s < 3; ++s) {
      ci[s] = space_i.tri_signs(ti)[s] *
              space_i.dof(space_i.tri_dofs(ti)[s]).length /
              (2 * space_i.area(ti));
      cj[s] = space_j.tri_signs(tj)[s] *
              space_j.dof(space_j.tri_dofs(tj)[s]).length /
              (2 * space_j.area(tj));
    }
    std::array<std::array<Real, 3>, 3> val{};  // [trial n over i][test m over j]
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bq = rule.bary[q];
      const Vec3 x = bq[0] * vi[0] + bq[1] * vi[1] + bq[2] * vi[2];
      for (int a = 0; a < 3; ++a) {
        const Vec3 phi_i = ci[a] * (x - vi[a]);
        for (int m = 0; m < 3; ++m) {
          const Vec3 psi_j = cj[m] * (x - vj[m]);
          val[a][m] += rule.w[q] * phi_i.dot(ni.cross(psi_j));
        }
      }
    }
    for (int a = 0; a < 3; ++a)
      for (int m = 0; m < 3; ++m)
        trips.emplace_back(space_j.tri_dofs(tj)[m], space_i.tri_dofs(ti)[a],
                           Complex(two_area * val[a][m], 0));
  }
  X.setFromTriplets(trips.begin(), trips.end());
  return X;
}

}  // namespace mtf
