#pragma once

// Assembly of the full multi-trace transmission system M = 2A + X: one
// scaled Calderon block per subdomain on the diagonal, sparse
// identity-coupling blocks between neighbouring subdomains, the incident
// plane-wave right-hand side, and the single-trace (PMCHWT) variant used for
// M=1 cross-checks.
//
// Bookkeeping (matching bio.hpp): every row is a functional tested against
// the rotated test field n x phi_m, so the weak identity operator is the
// twisted pairing matrix G, the assembled weak system reads
//   M_w c = 2 G_0 c0_inc   (block 0 only on the right),
// and strong-form compositions lift weak rows to coefficients through the
// per-subdomain mass matrices.  Each subdomain block of the unknown stacks
// [e; h] with e the Dirichlet trace coefficients and h the rho_i-scaled
// Neumann trace coefficients.

#include <map>
#include <utility>
#include <vector>

#include "mtf/bio.hpp"
#include "mtf/krylov.hpp"
#include "mtf/skeleton.hpp"
#include "mtf/spaces.hpp"

namespace mtf {

/// Incident plane wave E(x) = p exp(i k0 d.x); p may be complex (elliptic
/// polarization) and need not be orthogonal to d.
struct IncidentField {
  Eigen::Vector3cd p = Eigen::Vector3cd::Zero();
  Vec3 d = Vec3(1, 0, 0);  ///< unit propagation direction
  Real k0 = 1.0;

  IncidentField() = default;
  /// Throws if |d| deviates from 1 or k0 <= 0.
  IncidentField(const Eigen::Vector3cd& p_, const Vec3& d_, Real k0_);

  Eigen::Vector3cd field(const Vec3& x) const;
  /// Scaled curl (1/(i k0)) curl E = (d x p) exp(i k0 d.x); the Neumann
  /// trace of the incident field is this vector crossed with the normal.
  Eigen::Vector3cd scaled_curl(const Vec3& x) const;
};

/// Block vector over subdomains: block i has length 2*N_i ([e; h] stacked).
struct TraceVector {
  std::vector<Eigen::Index> offsets;  ///< size M+2, offsets.back() = total
  VectorXc data;

  int num_blocks() const { return static_cast<int>(offsets.size()) - 1; }
  Eigen::Index block_size(int i) const { return offsets[i + 1] - offsets[i]; }
  Eigen::VectorBlock<VectorXc> block(int i) {
    return data.segment(offsets[i], block_size(i));
  }
  Eigen::VectorBlock<const VectorXc> block(int i) const {
    return data.segment(offsets[i], block_size(i));
  }
};

/// The assembled local multi-trace operator: diagonal entries 2*A_i, off
/// diagonal entries diag(Itilde^{ji}, Itilde^{ji}) for j in Lambda_i, zero
/// otherwise, together with the per-subdomain pairing/mass bookkeeping
/// needed for strong-form compositions.
struct BlockOperator {
  std::vector<TraceSpace> spaces;        ///< one RWG trace space per subdomain
  std::vector<PairingMatrix> pairings;   ///< twisted pairing + mass, per subdomain
  std::vector<MultitraceBlock> diagonal; ///< A_i (applied with the factor 2)
  /// Coupling blocks: key (i,j) with j in Lambda_i; the matrix has

  /// rows on space_i and columns on space_j and is applied to both the
  /// electric and the magnetic slot with the same sign.
  std::map<std::pair<int, int>, SparseComplex> coupling;
  std::vector<Eigen::Index> offsets;     ///< block starts, size M+2
  MaterialTable materials;

  int num_subdomains() const { return static_cast<int>(spaces.size()); }
  Eigen::Index size() const { return offsets.back(); }

  /// Weak-form matvec y = (2A + X) x.
  VectorXc apply(const VectorXc& x) const;
  /// Dense assembly of the full block grid (small meshes; oracle use).
  MatrixXc dense() const;

  /// Block-diagonal twisted pairing: y_i = diag(G_i, G_i) x_i.
  VectorXc pairing_apply(const VectorXc& x) const;
  /// Block-diagonal mass solve: y_i = diag(M_i, M_i)^{-1} x_i.
  VectorXc mass_solve(const VectorXc& x) const;
  /// Strong-form lift of a weak (row-functional) vector: the approximate
  /// inverse of the pairing used in place of G^{-1} (the twisted RWG pairing
  /// is structurally rank-deficient, so the lift goes through the mass
  /// rotation instead: L = -M^{-1} G M^{-1}, which satisfies L G ~ I).
  VectorXc lift(const VectorXc& x) const;

  /// Zero-initialized block vector matching this operator's layout.
  TraceVector zero_vector() const;
};

/// Assemble the full MTF system for a skeleton mesh and material table.
/// Subdomain i couples to every j in Lambda_i (shared interface); the
/// coupling block (i,j) is assemble_transmission(space_j, space_i), i.e.
/// rows test on space_i and the rotation normal is the trial side's.
BlockOperator build_mtf(const SkeletonMesh& mesh, const MaterialTable& materials,
                        const AssemblyOptions& opt = {});

/// Weak right-hand side 2*u_inc: block 0 carries the tested incident traces
///   b_e[m] = -2 Int E_inc . phi_m,   b_h[m] = -2 rho_0 Int (d x p) e^{ik0 d.x} . phi_m,
/// all other blocks vanish.  (These are the twisted-pairing functionals of
/// gamma_D E_inc and rho_0 gamma_N E_inc, consistent with the weak matrix.)
TraceVector build_rhs(const IncidentField& incident, const BlockOperator& op);

/// Coefficient interpolation of the incident Cauchy data on every
/// subdomain's own trace space (block i = [gamma_D,i E_inc; rho_i
/// gamma_N,i E_inc] coefficients).  Used by consistency tests and far-field
/// post-processing of total vs scattered traces.
TraceVector interpolate_incident(const IncidentField& incident,
                                 const BlockOperator& op);

/// Single-trace (PMCHWT) operator for M = 1: both subdomain Calderon blocks
/// are assembled on the shared exterior-oriented trace space and added; the
/// right-hand side is the (unscaled) tested incident trace vector.  Throws
/// if the mesh has more than one interior subdomain.
struct StfSystem {
  TraceSpace space;          ///< exterior-oriented trace space on Gamma
  PairingMatrix pairing;
  MultitraceBlock exterior;  ///< A_0 (k_0, rho_0)
  MultitraceBlock interior;  ///< A_1 (k_1, rho_1) on the same space
  MaterialTable materials;

  Eigen::Index size() const { return 2 * static_cast<Eigen::Index>(space.num_dofs()); }
  /// Weak matvec y = (A_0 + A_1) x on the shared space.
  VectorXc apply(const VectorXc& x) const;
  MatrixXc dense() const;
  VectorXc mass_solve(const VectorXc& x) const;
};

StfSystem build_stf(const SkeletonMesh& mesh, const MaterialTable& materials,
                    const AssemblyOptions& opt = {});

/// Weak STF right-hand side: the tested incident traces (unscaled).
VectorXc build_stf_rhs(const IncidentField& incident, const StfSystem& sys);

/// Mass-lifted operator and right-hand side for iterative solves: GMRES runs
/// on  x -> mass_solve(apply(x))  so that iteration counts are mesh-scaling
/// free and the residual norm is equivalent to the true weak residual.
ApplyFn lifted_operator(const BlockOperator& op);
ApplyFn lifted_operator(const StfSystem& sys);

}  // namespace mtf
