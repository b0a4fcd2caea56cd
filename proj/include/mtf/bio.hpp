#pragma once

#include "mtf/spaces.hpp"

// Boundary integral operators for the time-harmonic Maxwell transmission
// problem. All matrices here are Galerkin weak forms whose rows are tested
// against the rotated functionals v -> Int v.(n x phi_m); under that pairing
// both the electric (T) and magnetic (K) operators reduce to the plain
// double-layer-style integrals below, and the identity operator is realized
// by the twisted pairing matrix G from build_pairing (NOT the L2 mass).
// The discrete interior Calderon identity therefore reads
//   A_w c = (1/2) G c   (blocks [[K, rho^-1 T], [-rho T, K]], G doubled),
// which is what the projector tests exercise.

namespace mtf {

using SparseComplex = Eigen::SparseMatrix<Complex>;

/// Scalar Helmholtz kernel G_k(x,y) = exp(ik|x-y|) / (4*pi*|x-y|).
/// k = 0 reduces to the Laplace kernel. Throws for coincident points.
Complex kernel_eval(Real k, const Vec3& x, const Vec3& y);

/// Quadrature selection for dense operator assembly.
struct AssemblyOptions {
  int regular_order = 4;    ///< triangle rule order for well-separated pairs
  int near_order = 6;       ///< upgraded order for close (non-touching) pairs
  Real near_factor = 2.0;   ///< close = centroid distance < factor * mean diameter
  int singular_points = 5;  ///< Gauss points per dimension in singular pair rules
};

/// Electric-field integral operator T on a single trace space
/// (complex-symmetric N x N):
///   T_mn = ik Int Int G_k phi_m.phi_n + (1/ik) Int Int G_k div phi_m div phi_n.
/// The hypersingular part has been integrated by parts onto the surface
/// divergences of both arguments, so only the weakly singular kernel remains.
/// Requires k > 0.
MatrixXc assemble_efio(const TraceSpace& space, Real k,
                       const AssemblyOptions& opt = {});

/// Magnetic-field integral operator K (complex-symmetric N x N):
///   K_mn = Int Int (grad_x G_k(x,y) x phi_n(y)) . phi_m(x).
/// Coincident pairs go through the same singular transform; for flat panels
/// the integrand vanishes identically there, which supplies the
/// principal-value cancellation. k = 0 is allowed (static kernel).
MatrixXc assemble_mfio(const TraceSpace& space, Real k,
                       const AssemblyOptions& opt = {});

/// Assemble T and K together in one pass over triangle pairs; the kernel
/// evaluations (the dominant cost) are shared between the two operators.
struct TkMatrices {
  MatrixXc T;
  MatrixXc K;
};
TkMatrices assemble_tk(const TraceSpace& space, Real k,
                       const AssemblyOptions& opt = {});

/// Scaled local multitrace block for one subdomain,
///   A_i = [[K, rho_i^-1 T], [-rho_i T, K]],
/// acting on stacked coefficient vectors [e; h] of length 2N.
/// T is stored once and scaled on application.
struct MultitraceBlock {
  MatrixXc T;       ///< EFIO at k_i
  MatrixXc K;       ///< MFIO at k_i
  Real k = 0.0;     ///< subdomain wavenumber
  Real rho = 1.0;   ///< subdomain admittance scaling
  int n = 0;        ///< dofs per trace component

  /// Apply the 2x2 block to [e; h] (size 2n).
  VectorXc apply(const VectorXc& eh) const;
  /// Assemble the dense 2n x 2n matrix [[K, rho^-1 T], [-rho T, K]].
  MatrixXc dense() const;
};

/// Assemble A_i for the subdomain of `space`, with k_i and rho_i taken from
/// the material table.
MultitraceBlock assemble_multitrace(const TraceSpace& space,
                                    const MaterialTable& materials,
                                    const AssemblyOptions& opt = {});

/// Sparse transmission (identity-coupling) block I~^{ij}: rows test against
/// space_j, columns take trial functions from space_i, and every entry is
///   Int_tau phi_n^i . (n_i x psi_m^j)
/// summed over the triangles tau shared by the two surfaces, with n_i the
/// effective (outward) normal of the domain-side subdomain i. Supports of the
/// two spaces intersect only on Gamma_ij, so no explicit restriction is
/// needed; disjoint surfaces yield an empty matrix. Throws for i = j.
SparseComplex assemble_transmission(const TraceSpace& space_i,
                                    const TraceSpace& space_j);

}  // namespace mtf
