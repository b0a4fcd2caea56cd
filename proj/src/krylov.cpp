#include "mtf/krylov.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mtf {

namespace {

bool all_finite(const VectorXc& v) { return v.allFinite(); }

VectorXc apply_or_identity(const ApplyFn& op, const VectorXc& v) {
  return op ? op(v) : v;
}

}  // namespace

SolveReport gmres(const ApplyFn& apply, const VectorXc& rhs, Real tol,
                  int max_iterations, const ApplyFn& precond) {
  if (!apply) throw std::invalid_argument("gmres: operator callable is empty");
  if (rhs.size() == 0) throw std::invalid_argument("gmres: empty right-hand side");
  if (tol <= 0) throw std::invalid_argument("gmres: tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("gmres: need at least one iteration");

  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0] {
    return std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
  };

  SolveReport report;
  const Eigen::Index n = rhs.size();

  VectorXc r0 = apply_or_identity(precond, rhs);
  if (!all_finite(r0)) throw std::runtime_error("gmres: preconditioned right-hand side is not finite");
  const Real beta = r0.norm();
  if (beta == 0.0) {
    // Zero (preconditioned) data: the zero vector is the exact solution.
    report.x = VectorXc::Zero(n);
    report.converged = true;
    report.wall_seconds = elapsed();
    return report;
  }

  // Arnoldi basis, Hessenberg columns, and the Givens-rotated data.  Columns
  // are grown on demand so short solves on large systems stay cheap.
  std::vector<VectorXc> V;
  V.push_back(r0 / beta);
  std::vector<std::vector<Complex>> H;   // H[j] holds column j (length j+2)
  std::vector<Complex> givens_c, givens_s;
  std::vector<Complex> g;                // rotated residual vector
  g.push_back(Complex(beta, 0.0));

  int iterations = 0;
  bool converged = false;

  for (int j = 0; j < max_iterations; ++j) {
    iterations = j + 1;
    VectorXc w = apply(V[static_cast<size_t>(j)]);
    if (!all_finite(w)) {
      throw std::runtime_error("gmres: operator returned non-finite values at iteration " +
                               std::to_string(iterations));
    }
    if (precond) {
      w = precond(w);
      if (!all_finite(w)) {
        throw std::runtime_error("gmres: preconditioner returned non-finite values at iteration " +
                                 std::to_string(iterations));
      }
    }

    // Modified Gram-Schmidt, with one full reorthogonalization pass if the
    // projection removed more than half of the vector (classic cancellation
    // guard; keeps the basis orthogonal without doubling the cost of every
    // iteration).
    const Real pre_norm = w.norm();
    std::vector<Complex> h(static_cast<size_t>(j) + 2, Complex(0, 0));
    for (int i = 0; i <= j; ++i) {
      const Complex hij = V[static_cast<size_t>(i)].dot(w);  // conjugated dot
      h[static_cast<size_t>(i)] = hij;
      w -= hij * V[static_cast<size_t>(i)];
    }
    if (w.norm() < Real(0.5) * pre_norm) {
      for (int i = 0; i <= j; ++i) {
        const Complex corr = V[static_cast<size_t>(i)].dot(w);
        h[static_cast<size_t>(i)] += corr;
        w -= corr * V[static_cast<size_t>(i)];
      }
    }
    const Real hnext = w.norm();
    h[static_cast<size_t>(j) + 1] = Complex(hnext, 0.0);

    // Apply the accumulated Givens rotations to the new column, then create
    // the rotation that annihilates the subdiagonal entry.
    for (int i = 0; i < j; ++i) {
      const Complex hi = h[static_cast<size_t>(i)];
      const Complex hi1 = h[static_cast<size_t>(i) + 1];
      h[static_cast<size_t>(i)] = std::conj(givens_c[static_cast<size_t>(i)]) * hi +
                                  std::conj(givens_s[static_cast<size_t>(i)]) * hi1;
      h[static_cast<size_t>(i) + 1] = -givens_s[static_cast<size_t>(i)] * hi +
                                      givens_c[static_cast<size_t>(i)] * hi1;
    }
    const Complex a = h[static_cast<size_t>(j)];
    const Complex b = h[static_cast<size_t>(j) + 1];
    const Real denom = std::sqrt(std::norm(a) + std::norm(b));
    Complex c, s;
    if (denom == 0.0) {
      c = Complex(1, 0);
      s = Complex(0, 0);
    } else {
      c = a / denom;
      s = b / denom;
    }
    givens_c.push_back(c);
    givens_s.push_back(s);
    h[static_cast<size_t>(j)] = std::conj(c) * a + std::conj(s) * b;
    h[static_cast<size_t>(j) + 1] = Complex(0, 0);

    const Complex gj = g[static_cast<size_t>(j)];
    g[static_cast<size_t>(j)] = std::conj(c) * gj;
    g.push_back(-s * gj);

    H.push_back(std::move(h));

    const Real rel = std::abs(g[static_cast<size_t>(j) + 1]) / beta;
    report.residuals.push_back(rel);

    if (rel <= tol) {
      converged = true;
      break;
    }
    if (hnext <= Real(100) * std::numeric_limits<Real>::epsilon() * pre_norm) {
      // The Krylov space is exhausted (the new direction vanished under
      // orthogonalization) but the residual is still above the tolerance:
      // the operator is singular on the reachable subspace.
      throw std::runtime_error("gmres: breakdown (H(" + std::to_string(j + 2) + "," +
                               std::to_string(j + 1) + ") = 0) at iteration " +
                               std::to_string(iterations) +
                               " with relative residual " + std::to_string(rel));
    }
    if (j + 1 < max_iterations) V.push_back(w / hnext);
  }

  // Back substitution in the rotated Hessenberg system, then expansion in the
  // Arnoldi basis.
  const int m = iterations;
  std::vector<Complex> y(static_cast<size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    Complex sum = g[static_cast<size_t>(i)];
    for (int l = i + 1; l < m; ++l) sum -= H[static_cast<size_t>(l)][static_cast<size_t>(i)] * y[static_cast<size_t>(l)];
    const Complex hii = H[static_cast<size_t>(i)][static_cast<size_t>(i)];
    if (hii == Complex(0, 0)) {
      throw std::runtime_error("gmres: singular least-squares system at iteration " +
                               std::to_string(i + 1));
    }
    y[static_cast<size_t>(i)] = sum / hii;
  }
  VectorXc x = VectorXc::Zero(n);
  for (int i = 0; i < m; ++i) x += y[static_cast<size_t>(i)] * V[static_cast<size_t>(i)];

  report.x = std::move(x);
  report.n_gmres = iterations;
  report.converged = converged;
  report.wall_seconds = elapsed();
  return report;
}

VectorXc lu_solve(const MatrixXc& A, const VectorXc& b) {
  if (A.rows() != A.cols()) throw std::invalid_argument("lu_solve: matrix must be square");
  if (A.rows() != b.size()) throw std::invalid_argument("lu_solve: dimension mismatch");
  if (A.rows() == 0) throw std::invalid_argument("lu_solve: empty system");

  Eigen::PartialPivLU<MatrixXc> lu(A);
  const auto diag = lu.matrixLU().diagonal();
  const Real dmax = diag.cwiseAbs().maxCoeff();
  const Real dmin = diag.cwiseAbs().minCoeff();
  if (dmax == 0.0 || dmin <= dmax * std::numeric_limits<Real>::epsilon() * Real(A.rows())) {
    throw std::runtime_error("lu_solve: matrix is singular to machine precision");
  }
  return lu.solve(b);
}

extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n, Complex* a,
            const int* lda, Complex* w, Complex* vl, const int* ldvl, Complex* vr,
            const int* ldvr, Complex* work, const int* lwork, Real* rwork, int* info);
}

std::vector<Complex> spectrum(const MatrixXc& A, int max_dim) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spectrum: matrix must be square");
  const int n = static_cast<int>(A.rows());
  if (n == 0) return {};
  if (n > max_dim) {
    throw std::invalid_argument("spectrum: matrix dimension " + std::to_string(n) +
                                " exceeds the cap " + std::to_string(max_dim));
  }

  MatrixXc work_matrix = A;  // zgeev overwrites its input
  std::vector<Complex> eigenvalues(static_cast<size_t>(n));
  std::vector<Real> rwork(static_cast<size_t>(2 * n));
  const int lda = n;
  const int one = 1;
  int info = 0;

  // Workspace query, then the actual sweep.
  Complex work_query;
  int lwork = -1;
  zgeev_("N", "N", &n, work_matrix.data(), &lda, eigenvalues.data(), nullptr, &one,
         nullptr, &one, &work_query, &lwork, rwork.data(), &info);
  if (info != 0) throw std::runtime_error("spectrum: zgeev workspace query failed");
  lwork = static_cast<int>(work_query.real());
  std::vector<Complex> work(static_cast<size_t>(lwork));
  zgeev_("N", "N", &n, work_matrix.data(), &lda, eigenvalues.data(), nullptr, &one,
         nullptr, &one, work.data(), &lwork, rwork.data(), &info);
  if (info != 0) {
    throw std::runtime_error("spectrum: zgeev failed with info = " + std::to_string(info));
  }
  return eigenvalues;
}

MatrixXc materialize(const ApplyFn& apply, int n) {
  if (!apply) throw std::invalid_argument("materialize: operator callable is empty");
  if (n < 0) throw std::invalid_argument("materialize: negative dimension");
  MatrixXc out(n, n);
  VectorXc e = VectorXc::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = Complex(1, 0);
    out.col(j) = apply(e);
    e[j] = Complex(0, 0);
  }
  return out;
}

}  // namespace mtf
