#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>

#include "felod/dofs.hpp"

namespace felod {

using DenseMatrix = Eigen::MatrixXd;

/// A symmetric factorization broke down: the matrix is not positive definite (penalty too small)
/// or a constraint block is rank deficient.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solve finished with a backward error above tolerance.
class SolverAccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SpdBackend {
  Automatic,   ///< supernodal CHOLMOD above large_system_size, simplicial LLT below
  Simplicial,  ///< always Eigen's simplicial LLT (thread-safe, used inside parallel patch loops)
  Supernodal,
};

/// Normwise backward error ||b - Ax|| / (||A||_inf ||x|| + ||b||).
double backward_error(const SparseMatrix& a, const Vector& x, const Vector& b);

/// Sparse Cholesky of a symmetric positive definite matrix with a posteriori residual control.
class SpdSolver {
 public:
  static constexpr int large_system_size = 20000;
  static constexpr double tolerance = 1e-10;

  /// Throws FactorizationError (mentioning `context`) when the matrix is not SPD.
  SpdSolver(const SparseMatrix& matrix, std::string context,
            SpdBackend backend = SpdBackend::Automatic);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  int size() const { return static_cast<int>(matrix_.rows()); }
  const SparseMatrix& matrix() const { return matrix_; }

  /// Solve with one step of iterative refinement; throws SolverAccuracyError above tolerance.
  Vector solve(const Vector& rhs) const;
  /// Column-wise direct solve without refinement.
  DenseMatrix solve(const DenseMatrix& rhs) const;
  /// Backward error of the last vector solve.
  double last_residual() const { return last_residual_; }

 private:
  struct Impl;
  SparseMatrix matrix_;
  std::string context_;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

/// Solver for the symmetric indefinite system [K B^T; B 0][x; mu] = [r; 0] by a Schur complement on
/// the multiplier block: K is factored once, S = B K^{-1} B^T is factored densely.
class SaddlePointSolver {
 public:
  SaddlePointSolver(const SparseMatrix& k, const SparseMatrix& b, std::string context,
                    SpdBackend backend = SpdBackend::Simplicial);

  /// x for each column of r; throws FactorizationError if S is singular.
  DenseMatrix solve(const DenseMatrix& r) const;
  int primal_size() const { return kk_.size(); }
  int constraint_count() const { return static_cast<int>(b_.rows()); }
  const SparseMatrix& constraints() const { return b_; }

 private:
  SpdSolver kk_;
  SparseMatrix b_;
  DenseMatrix y_;  ///< K^{-1} B^T
  Eigen::LDLT<DenseMatrix> schur_;
  std::string context_;
};

/// Dense SPD solve used for small coarse systems; throws FactorizationError if not SPD.
Vector solve_dense_spd(const DenseMatrix& a, const Vector& b, const std::string& context);

}  // namespace felod
