#include "felod/linalg.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <variant>

namespace felod {

namespace {

using Simplicial = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
using Supernodal = Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>;

double inf_norm(const SparseMatrix& a) {
  Vector rows = Vector::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return a.rows() > 0 ? rows.maxCoeff() : 0.0;
}

}  // namespace

double backward_error(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const double denom = inf_norm(a) * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  if (denom == 0.0) return 0.0;
  return (b - a * x).lpNorm<Eigen::Infinity>() / denom;
}

struct SpdSolver::Impl {
  std::variant<std::unique_ptr<Simplicial>, std::unique_ptr<Supernodal>> factor;
  double norm = 0.0;

  template <class Rhs>
  auto solve(const Rhs& rhs) const {
    return std::visit([&](const auto& f) -> DenseMatrix { return f->solve(rhs); }, factor);
  }
};

SpdSolver::SpdSolver(const SparseMatrix& matrix, std::string context, SpdBackend backend)
    : matrix_(matrix), context_(std::move(context)), impl_(std::make_unique<Impl>()) {
  if (matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument(context_ + ": matrix is not square");
  }
  impl_->norm = inf_norm(matrix_);
  const bool supernodal = backend == SpdBackend::Supernodal ||
                          (backend == SpdBackend::Automatic && matrix_.rows() > large_system_size);
  bool ok = false;
  if (supernodal) {
    auto f = std::make_unique<Supernodal>();
    f->compute(matrix_);
    ok = f->info() == Eigen::Success;
    impl_->factor = std::move(f);
  } else {
    auto f = std::make_unique<Simplicial>();
    f->compute(matrix_);
    ok = f->info() == Eigen::Success;
    impl_->factor = std::move(f);
  }
  if (!ok) {
    throw FactorizationError(context_ + ": matrix is not symmetric positive definite");
  }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Vector SpdSolver::solve(const Vector& rhs) const {
  Vector x = impl_->solve(rhs);
  last_residual_ = backward_error(matrix_, x, rhs);
  if (last_residual_ > 1e-14) {
    const Vector r = rhs - matrix_ * x;
    const Vector dx = impl_->solve(r);
    x += dx;
    last_residual_ = backward_error(matrix_, x, rhs);
  }
  if (!(last_residual_ <= tolerance)) {
    throw SolverAccuracyError(context_ + ": backward error " + std::to_string(last_residual_));
  }
  return x;
}

DenseMatrix SpdSolver::solve(const DenseMatrix& rhs) const { return impl_->solve(rhs); }

SaddlePointSolver::SaddlePointSolver(const SparseMatrix& k, const SparseMatrix& b,
                                     std::string context, SpdBackend backend)
    : kk_(k, context, backend), b_(b), context_(std::move(context)) {
  if (b_.cols() != k.rows()) throw std::invalid_argument(context_ + ": constraint size mismatch");
  if (b_.rows() == 0) return;
  y_ = kk_.solve(DenseMatrix(b_.transpose()));
  DenseMatrix s = b_ * y_;
  s = 0.5 * (s + s.transpose()).eval();
  schur_.compute(s);
  const Vector d = schur_.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (schur_.info() != Eigen::Success || !(d.minCoeff() > 1e-13 * dmax)) {
    throw FactorizationError(context_ + ": constraint rows are rank deficient");
  }
}

DenseMatrix SaddlePointSolver::solve(const DenseMatrix& r) const {
  DenseMatrix x = kk_.solve(r);
  if (b_.rows() == 0) return x;
  const DenseMatrix mu = schur_.solve(b_ * x);
  x -= y_ * mu;
  return x;
}

Vector solve_dense_spd(const DenseMatrix& a, const Vector& b, const std::string& context) {
  Eigen::LLT<DenseMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError(context + ": matrix is not symmetric positive definite");
  }
  Vector x = llt.solve(b);
  x += llt.solve(b - a * x);
  return x;
}

}  // namespace felod
