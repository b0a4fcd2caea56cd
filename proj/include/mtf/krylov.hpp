#pragma once

// Dense and iterative linear-algebra drivers: an unrestarted GMRES with
// modified Gram-Schmidt orthogonalization, a pivoted dense LU solve, and a
// dense eigenvalue sweep.  All solvers work on complex vectors and accept
// operators as callables so that matrix-free block operators and
// preconditioners plug in without materializing anything.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mtf/skeleton.hpp"

namespace mtf {

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

// Operator action y = Op(x).  An empty std::function means "no operator"
// (identity) where a preconditioner slot accepts it.
using ApplyFn = std::function<VectorXc(const VectorXc&)>;

// Outcome of an iterative solve.
struct SolveReport {
  VectorXc x;                     // final iterate
  std::vector<Real> residuals;    // relative preconditioned residual per iteration (non-increasing)
  int n_gmres = 0;                // number of iterations performed
  bool converged = false;         // true when the tolerance was reached
  Real wall_seconds = 0.0;        // wall-clock time of the solve
};

// Unrestarted GMRES with zero initial guess.  Solves A x = b where `apply`
// realizes A.  When `precond` is non-empty the solve is left-preconditioned:
// the Krylov space is built for P*A and residuals are measured as
// ||P(b - A x)|| / ||P b||.  Orthogonalization is modified Gram-Schmidt with
// one reorthogonalization pass whenever cancellation eats more than half of a
// candidate basis vector.  Throws std::runtime_error (with the iteration
// index) if an operator application produces non-finite values; an exact
// breakdown (new basis vector identically zero before convergence) is also
// reported by exception.
SolveReport gmres(const ApplyFn& apply, const VectorXc& rhs, Real tol = 1e-5,
                  int max_iterations = 2000, const ApplyFn& precond = {});

// Dense LU solve with partial pivoting.  Throws std::invalid_argument on
// shape mismatch and std::runtime_error if the factorization detects a pivot
// at machine-precision scale (singular matrix).
VectorXc lu_solve(const MatrixXc& A, const VectorXc& b);

// Dense eigenvalue computation (LAPACK zgeev, eigenvalues only).  Refuses
// matrices larger than `max_dim` rows to keep accidental O(N^3) sweeps from
// exhausting memory; callers that mean it can raise the cap.
std::vector<Complex> spectrum(const MatrixXc& A, int max_dim = 8000);

// Convenience: materialize a matrix-free operator column by column into a
// dense matrix (for spectrum studies of block operators).
MatrixXc materialize(const ApplyFn& apply, int n);

}  // namespace mtf
