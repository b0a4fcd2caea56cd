#include "mtf/precond.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace mtf {
namespace {

// Real sparse matrix applied to a complex vector (Eigen disallows the mixed
// product directly).
VectorXc real_apply(const SparseReal& A, const VectorXc& x) {
  return A * x.real() + Complex(0, 1) * (A * x.imag()).eval();
}

VectorXc ldlt_solve(const Eigen::SimplicialLDLT<SparseReal>& solver,
                    const VectorXc& b) {
  return solver.solve(b.real()).eval().cast<Complex>() +
         Complex(0, 1) * solver.solve(b.imag()).eval().cast<Complex>();
}

}  // namespace

Complex PadeCoefficients::evaluate(Complex z) const {
  Complex out = c0;
  for (int j = 0; j < order(); ++j) out += a[j] * z / (Complex(1) + b[j] * z);
  return out;
}

PadeCoefficients pade_coefficients(int n_terms, Real theta) {
  if (n_terms < 1)
    throw std::invalid_argument("pade_coefficients: need at least one term");
  const Real denom = 2.0 * n_terms + 1.0;
  PadeCoefficients out;
  out.a.resize(n_terms);
  out.b.resize(n_terms);

  // rotate the real coefficients through z -> (1+z) e^{-i theta} - 1
  const Complex em = std::polar(1.0, -theta);     // e^{-i theta}
  const Complex eh = std::polar(1.0, theta / 2);  // e^{+i theta/2}
  Complex r0(1.0, 0.0);                           // value at z = 0
  for (int j = 1; j <= n_terms; ++j) {
    const Real s = std::sin(j * std::numbers::pi_v<Real> / denom);
    const Real c = std::cos(j * std::numbers::pi_v<Real> / denom);
    const Real aj = (2.0 / denom) * s * s;
    const Real bj = c * c;
    const Complex d = Complex(1.0) + bj * (em - Complex(1.0));
    out.a[j - 1] = eh * aj * em / (d * d);
    out.b[j - 1] = bj * em / d;
    r0 += eh * aj * (em - Complex(1.0)) / d;
  }
  // rescale so the approximation is exactly 1 at z = 0
  out.c0 = Complex(1.0, 0.0);
  for (auto& aj : out.a) aj /= r0;
  return out;
}

SparseReal assemble_divdiv(const TraceSpace& space) {
  const int n = space.num_dofs();
  std::vector<Eigen::Triplet<Real>> trips;
  trips.reserve(static_cast<size_t>(space.num_triangles()) * 9);
  for (int t = 0; t < space.num_triangles(); ++t) {
    const auto& dofs = space.tri_dofs(t);
    const auto& signs = space.tri_signs(t);
    const Real area = space.area(t);
    Real div[3];
    for (int s = 0; s < 3; ++s)
      div[s] = signs[s] * space.dof(dofs[s]).length / area;
    for (int s = 0; s < 3; ++s)
      for (int u = 0; u < 3; ++u)
        trips.emplace_back(dofs[s], dofs[u], area * div[s] * div[u]);
  }
  SparseReal D(n, n);
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

OsrcBlock::OsrcBlock(const TraceSpace& space, Real k, const OsrcOptions& opt) {
  if (!(k > 0)) throw std::invalid_argument("OsrcBlock: wavenumber must be positive");
  k_ = k;
  const Real eps = opt.damping > 0 ? opt.damping : 0.4 * std::cbrt(k);
  k_eps_ = Complex(k, eps);
  pade_ = pade_coefficients(opt.np, opt.theta);

  mass_ = build_pairing(space).mass();
  divdiv_ = assemble_divdiv(space);
  mass_solver_ = std::make_unique<Eigen::SimplicialLDLT<SparseReal>>(mass_);
  if (mass_solver_->info() != Eigen::Success)
    throw std::runtime_error("OsrcBlock: mass factorization failed");

  // The div-div Gram represents -grad div against the mass, so the operator
  // argument z = grad div / k_eps^2 corresponds to the matrix pencil
  // (M - b_j D / k_eps^2); the damping keeps 1 + z off the branch cut.
  const Complex invk2 = Complex(1.0) / (k_eps_ * k_eps_);
  const SparseComplex Mc = mass_.cast<Complex>();
  const SparseComplex Dc = divdiv_.cast<Complex>();
  auto factorize = [&](Complex coeff) {
    SparseComplex term = Mc - (coeff * invk2) * Dc;
    term.makeCompressed();
    auto solver = std::make_unique<Eigen::SparseLU<SparseComplex>>();
    solver->compute(term);
    if (solver->info() != Eigen::Success)
      throw std::runtime_error("OsrcBlock: Pade term factorization failed");
    return solver;
  };
  for (int j = 0; j < pade_.order(); ++j)
    term_solvers_.push_back(factorize(pade_.b[j]));
  unit_solver_ = factorize(Complex(1.0));

  // Scalar curl-potential branch: P1 mass/stiffness on the surface vertices,
  // the RWG <-> curl-potential transfer, and the scalar Pade pencils.
  std::unordered_map<int, int> vidx;
  int nv = 0;
  for (int t = 0; t < space.num_triangles(); ++t)
    for (int vid : space.tri_vertices(t))
      if (vidx.emplace(vid, nv).second) ++nv;

  std::vector<Eigen::Triplet<Real>> mp, st, ct;
  for (int t = 0; t < space.num_triangles(); ++t) {
    const Triangle tri = space.triangle(t);
    const Real area = space.area(t);
    const Vec3 nrm = space.normal(t);
    const Vec3 x[3] = {tri.a, tri.b, tri.c};
    const auto& vids = space.tri_vertices(t);
    int lv[3];
    Vec3 g[3];  // P1 barycentric gradients
    for (int a = 0; a < 3; ++a) {
      lv[a] = vidx.at(vids[a]);
      g[a] = nrm.cross(x[(a + 2) % 3] - x[(a + 1) % 3]) / (2.0 * area);
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        mp.emplace_back(lv[a], lv[b], area / 12.0 * (a == b ? 2.0 : 1.0));
        st.emplace_back(lv[a], lv[b], area * g[a].dot(g[b]));
      }
    const auto& dofs = space.tri_dofs(t);
    const auto& signs = space.tri_signs(t);
    const Vec3 cen = tri.centroid();
    for (int s = 0; s < 3; ++s) {
      // Int phi over the triangle, for the piecewise-constant curl of P1
      const Vec3 int_phi =
          signs[s] * space.dof(dofs[s]).length / 2.0 * (cen - x[s]);
      for (int a = 0; a < 3; ++a)
        ct.emplace_back(dofs[s], lv[a], int_phi.dot(g[a].cross(nrm)));
    }
  }
  p1_mass_.resize(nv, nv);
  p1_mass_.setFromTriplets(mp.begin(), mp.end());
  p1_stiff_.resize(nv, nv);
  p1_stiff_.setFromTriplets(st.begin(), st.end());
  curl_transfer_.resize(mass_.rows(), nv);
  curl_transfer_.setFromTriplets(ct.begin(), ct.end());

  p1_mass_solver_ = std::make_unique<Eigen::SimplicialLDLT<SparseReal>>(p1_mass_);
  // pin vertex 0 (the stiffness kernel is the constants, which carry no curl)
  std::vector<Eigen::Triplet<Real>> stp;
  stp.reserve(st.size());
  for (const auto& tr : st)
    if (tr.row() != 0 && tr.col() != 0) stp.push_back(tr);
  stp.emplace_back(0, 0, 1.0);
  SparseReal pinned(nv, nv);
  pinned.setFromTriplets(stp.begin(), stp.end());
  p1_stiff_solver_ = std::make_unique<Eigen::SimplicialLDLT<SparseReal>>(pinned);
  if (p1_mass_solver_->info() != Eigen::Success ||
      p1_stiff_solver_->info() != Eigen::Success)
    throw std::runtime_error("OsrcBlock: P1 factorization failed");

  const SparseComplex Mpc = p1_mass_.cast<Complex>();
  const SparseComplex Sc = p1_stiff_.cast<Complex>();
  for (int j = 0; j < pade_.order(); ++j) {
    SparseComplex term = Mpc - (pade_.b[j] * invk2) * Sc;
    term.makeCompressed();
    auto solver = std::make_unique<Eigen::SparseLU<SparseComplex>>();
    solver->compute(term);
    if (solver->info() != Eigen::Success)
      throw std::runtime_error("OsrcBlock: scalar Pade factorization failed");
    p1_term_solvers_.push_back(std::move(solver));
  }
}

VectorXc OsrcBlock::scalar_sqrt_minus_identity(const VectorXc& q) const {
  // W~ q - q with c0 = 1: only the Pade correction term survives.
  const VectorXc mq = real_apply(p1_mass_, q);
  VectorXc acc = VectorXc::Zero(q.size());
  for (int j = 0; j < pade_.order(); ++j)
    acc += pade_.a[j] * p1_term_solvers_[j]->solve(mq);
  const Complex invk2 = Complex(1.0) / (k_eps_ * k_eps_);
  return ldlt_solve(*p1_mass_solver_, (-invk2 * real_apply(p1_stiff_, acc)).eval());
}

VectorXc OsrcBlock::apply_mte(const VectorXc& x) const {
  const VectorXc u = apply_inv_sqrt(x);
  // weak scalar curl of x, lifted to the curl potential (constant pinned)
  VectorXc rhs = (curl_transfer_.transpose() * x.real()).cast<Complex>() +
                 Complex(0, 1) *
                     (curl_transfer_.transpose() * x.imag()).cast<Complex>();
  rhs[0] = Complex(0.0);
  const VectorXc q = ldlt_solve(*p1_stiff_solver_, rhs);
  const VectorXc w = scalar_sqrt_minus_identity(q);
  return u + ldlt_solve(*mass_solver_, real_apply(curl_transfer_, w));
}

VectorXc OsrcBlock::apply_sqrt(const VectorXc& x) const {
  if (x.size() != size())
    throw std::invalid_argument("OsrcBlock::apply_sqrt: size mismatch");
  const VectorXc mx = real_apply(mass_, x);
  VectorXc acc = VectorXc::Zero(size());
  for (int j = 0; j < pade_.order(); ++j)
    acc += pade_.a[j] * term_solvers_[j]->solve(mx);
  const Complex invk2 = Complex(1.0) / (k_eps_ * k_eps_);
  const VectorXc d = -invk2 * real_apply(divdiv_, acc);
  return pade_.c0 * x + ldlt_solve(*mass_solver_, d);
}

VectorXc OsrcBlock::apply_inv_sqrt(const VectorXc& x) const {
  const VectorXc w = apply_sqrt(x);
  return unit_solver_->solve(real_apply(mass_, w));
}

OsrcBlock build_osrc_block(const TraceSpace& space, const MaterialTable& materials,
                           const OsrcOptions& opt) {
  return OsrcBlock(space, materials.k(space.subdomain()), opt);
}

PrecondKind precond_kind_from_name(const std::string& name) {
  if (name == "none") return PrecondKind::none;
  if (name == "block-osrc" || name == "osrc") return PrecondKind::block_osrc;
  if (name == "block-calderon" || name == "calderon") return PrecondKind::block_calderon;
  throw std::invalid_argument("unknown preconditioner kind: " + name);
}

std::string to_string(PrecondKind kind) {
  switch (kind) {
    case PrecondKind::none: return "none";
    case PrecondKind::block_osrc: return "block-osrc";
    case PrecondKind::block_calderon: return "block-calderon";
  }
  return "none";
}

VectorXc BlockPreconditioner::apply(const VectorXc& x) const {
  if (kind_ == PrecondKind::none) return x;
  if (x.size() != op_->size())
    throw std::invalid_argument("BlockPreconditioner::apply: size mismatch");
  VectorXc y(x.size());
  if (kind_ == PrecondKind::block_osrc) {
    for (int i = 0; i < op_->num_subdomains(); ++i) {
      const Eigen::Index off = op_->offsets[i];
      const Eigen::Index n = blocks_[i].size();
      const Real rho = op_->materials.rho(i);
      y.segment(off, n) = blocks_[i].apply_mte(x.segment(off + n, n)) / rho;
      y.segment(off + n, n) = -rho * blocks_[i].apply_mte(x.segment(off, n));
    }
    return y;
  }
  // block-Calderon: strong form 2 A_i per subdomain
  for (int i = 0; i < op_->num_subdomains(); ++i) {
    const Eigen::Index off = op_->offsets[i];
    const Eigen::Index m = 2 * op_->diagonal[i].n;
    y.segment(off, m) = 2.0 * op_->diagonal[i].apply(x.segment(off, m));
  }
  return op_->mass_solve(y);
}

ApplyFn BlockPreconditioner::fn() const {
  if (kind_ == PrecondKind::none) return {};
  return [this](const VectorXc& v) { return apply(v); };
}

BlockPreconditioner build_preconditioner(PrecondKind kind, const BlockOperator& op,
                                         const OsrcOptions& opt) {
  BlockPreconditioner P;
  P.kind_ = kind;
  P.op_ = &op;
  if (kind == PrecondKind::block_osrc) {
    P.blocks_.reserve(op.spaces.size());
    for (const auto& space : op.spaces)
      P.blocks_.push_back(build_osrc_block(space, op.materials, opt));
  }
  return P;
}

}  // namespace mtf
