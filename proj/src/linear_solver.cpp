#include "gasnet/linear_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gasnet/error.hpp"

namespace gasnet {

void DenseLuSolver::factorize(const Eigen::MatrixXd& A) {
  ready_ = false;
  if (A.rows() != A.cols() || A.rows() == 0)
    throw SolverError("matrix is not square", std::numeric_limits<double>::infinity());
  if (!A.allFinite())
    throw SolverError("matrix has non-finite entries",
                      std::numeric_limits<double>::infinity());
  lu_.compute(A);
  const double rcond = lu_.rcond();
  condition_ = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rcond >= kSingularRcond)) {
    std::ostringstream os;
    os << "matrix of order " << A.rows()
       << " is singular or numerically rank deficient (condition estimate "
       << condition_ << ")";
    throw SolverError(os.str(), condition_);
  }
  ready_ = true;
  if (counter_) counter_->increment();
}

Eigen::VectorXd DenseLuSolver::solve(const Eigen::VectorXd& b) const {
  return lu_.solve(b);
}

void SparseLuSolver::factorize(const Eigen::SparseMatrix<double>& A) {
  if (!analyzed_ || A.nonZeros() != nnz_) {
    lu_.analyzePattern(A);
    analyzed_ = true;
    nnz_ = A.nonZeros();
  }
  lu_.factorize(A);
  if (lu_.info() != Eigen::Success)
    throw SolverError("sparse LU failed: " + lu_.lastErrorMessage(),
                      std::numeric_limits<double>::infinity());
  if (counter_) counter_->increment();
}

Eigen::VectorXd SparseLuSolver::solve(const Eigen::VectorXd& b) {
  Eigen::VectorXd x = lu_.solve(b);
  if (lu_.info() != Eigen::Success)
    throw SolverError("sparse LU solve failed",
                      std::numeric_limits<double>::infinity());
  return x;
}

}  // namespace gasnet
