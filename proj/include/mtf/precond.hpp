#pragma once

// Block preconditioners for the multi-trace system: the Pade-localized
// on-surface-radiation-condition (OSRC) electric-to-magnetic block and the
// dense block-Calderon fallback diag(2 A_i), both acting in strong
// (coefficient) form so they compose with the mass-lifted operator.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "mtf/krylov.hpp"
#include "mtf/system.hpp"

namespace mtf {

inline constexpr int kDefaultPadeTerms = 4;
inline constexpr Real kDefaultPadeAngle = 1.0471975511965977462;  // pi/3

/// Rational approximation sqrt(1+z) ~ c0 + sum_j a[j] z / (1 + b[j] z).
/// Coefficients are complex once the branch is rotated.
struct PadeCoefficients {
  Complex c0{1.0, 0.0};
  std::vector<Complex> a, b;

  int order() const { return static_cast<int>(a.size()); }
  Complex evaluate(Complex z) const;
};

/// Pade coefficients of the square root: the real (theta = 0) family is
///   a_j = (2/(2N+1)) sin^2(j pi/(2N+1)),  b_j = cos^2(j pi/(2N+1)),  c0 = 1,
/// and a branch rotation by `theta` substitutes z -> (1+z) e^{-i theta} - 1,
/// re-collects the coefficients, and rescales so the value at z = 0 is
/// exactly 1 (the rotation alone only preserves it up to the Pade error).
/// The rotated branch keeps the approximation bounded near the negative real
/// axis, where the undamped square root would lose accuracy. Throws if
/// n_terms < 1.
PadeCoefficients pade_coefficients(int n_terms = kDefaultPadeTerms,
                                   Real theta = kDefaultPadeAngle);

/// Parameters of the OSRC square-root localization.
struct OsrcOptions {
  int np = kDefaultPadeTerms;      ///< number of Pade terms
  Real theta = kDefaultPadeAngle;  ///< branch-rotation angle (radians)
  /// Damping of the wavenumber, k_eps = k + i*damping; any value <= 0
  /// selects the curvature rule 0.4 * k^(1/3).
  Real damping = 0.0;
};

/// Sparse realization of the square-root surface operators
///   sqrt:     (I + grad_G k_eps^-2 div_G)^(+1/2)
///   inv_sqrt: (I + grad_G k_eps^-2 div_G)^(-1/2)
/// on one subdomain's RWG space, localized with the rotated Pade family: the
/// strong-form square root is
///   x -> c0 x - M^-1 (1/k_eps^2) D sum_j a_j y_j,
///   (M - b_j (1/k_eps^2) D) y_j = M x
/// (D carries a minus sign because the div-div Gram is the weak form of
/// -grad div), with M the RWG mass and D the div-div Gram; the inverse branch
/// composes it with one resolvent solve, (1+z)^(-1/2) = (1+z)^(-1) (1+z)^(1/2).
/// Divergence-free inputs are reproduced exactly by both branches, and every
/// application costs a handful of sparse triangular solves.
class OsrcBlock {
 public:
  /// Builds mass/div-div matrices and factorizes one complex sparse matrix
  /// per Pade term (plus the unit resolvent). Throws on factorization
  /// failure.
  OsrcBlock(const TraceSpace& space, Real k, const OsrcOptions& opt = {});

  Eigen::Index size() const { return mass_.rows(); }
  Real k() const { return k_; }
  Complex k_eps() const { return k_eps_; }
  const PadeCoefficients& pade() const { return pade_; }
  const SparseReal& mass() const { return mass_; }
  const SparseReal& divdiv() const { return divdiv_; }

  /// Square-root branch (order +1 on gradient components).
  VectorXc apply_sqrt(const VectorXc& x) const;
  /// Inverse square-root branch (order -1 on gradient components), acting as
  /// the identity on divergence-free fields.
  VectorXc apply_inv_sqrt(const VectorXc& x) const;
  /// Full magnetic-to-electric surrogate: the inverse branch on gradient
  /// components plus the forward branch on rotational components, the latter
  /// realized through scalar curl potentials,
  ///   Lambda = (1 + grad div/k_eps^2)^(-1/2) + curl (W~ - 1) Lap^+ curl,
  /// with W~ the scalar square root of (1 + Lap/k_eps^2) on vertex (P1)
  /// functions. Both Hodge components then pair with the electric-field
  /// block at the same order and phase, which is what the block
  /// preconditioner needs to cluster one-sidedly.
  VectorXc apply_mte(const VectorXc& x) const;

 private:
  Real k_ = 0.0;
  Complex k_eps_{0.0, 0.0};
  PadeCoefficients pade_;
  SparseReal mass_, divdiv_;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseReal>> mass_solver_;
  std::vector<std::unique_ptr<Eigen::SparseLU<SparseComplex>>> term_solvers_;
  std::unique_ptr<Eigen::SparseLU<SparseComplex>> unit_solver_;  // M - D/k_eps^2

  // scalar (P1) curl-potential branch
  SparseReal p1_mass_, p1_stiff_;
  SparseReal curl_transfer_;  // C[m, v] = Int phi_m . (grad p1_v x n)
  std::unique_ptr<Eigen::SimplicialLDLT<SparseReal>> p1_mass_solver_;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseReal>> p1_stiff_solver_;  // pinned
  std::vector<std::unique_ptr<Eigen::SparseLU<SparseComplex>>> p1_term_solvers_;

  VectorXc scalar_sqrt_minus_identity(const VectorXc& q) const;
};

/// Div-div Gram D_{mn} = Int div phi_m div phi_n (RWG divergences are
/// piecewise constant, so this is an exact sparse assembly).
SparseReal assemble_divdiv(const TraceSpace& space);

/// OSRC block for the subdomain of `space`, with k_i from the material table.
OsrcBlock build_osrc_block(const TraceSpace& space, const MaterialTable& materials,
                           const OsrcOptions& opt = {});

enum class PrecondKind { none, block_osrc, block_calderon };

/// Parses "none", "block-osrc"/"osrc", "block-calderon"/"calderon";
/// throws std::invalid_argument otherwise.
PrecondKind precond_kind_from_name(const std::string& name);
std::string to_string(PrecondKind kind);

/// Block-diagonal strong-form preconditioner over subdomains:
///   none            identity (empty callable),
///   block-osrc      P_i = [[0, T~_i / rho_i], [-rho_i T~_i, 0]],
///   block-calderon  P_i = 2 M_i^-1 A_i  (reuses the assembled dense blocks).
/// The Calderon kind keeps a pointer to the block operator, which must
/// outlive the preconditioner.
class BlockPreconditioner {
 public:
  BlockPreconditioner() = default;  ///< identity (kind none)

  PrecondKind kind() const { return kind_; }
  VectorXc apply(const VectorXc& x) const;
  /// Callable for the gmres precondition slot; empty for kind none, so the
  /// unpreconditioned path stays bit-identical to passing no preconditioner.
  ApplyFn fn() const;

  friend BlockPreconditioner build_preconditioner(PrecondKind kind,
                                                  const BlockOperator& op,
                                                  const OsrcOptions& opt);

 private:
  PrecondKind kind_ = PrecondKind::none;
  const BlockOperator* op_ = nullptr;
  std::vector<OsrcBlock> blocks_;  ///< per subdomain, OSRC kind only
};

BlockPreconditioner build_preconditioner(PrecondKind kind, const BlockOperator& op,
                                         const OsrcOptions& opt = {});

}  // namespace mtf
