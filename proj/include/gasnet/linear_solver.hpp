// LU solvers with factorization counting. Dense partial-pivot LU serves the
// SAS systems; sparse LU serves the banded finite-difference systems.

#ifndef GASNET_LINEAR_SOLVER_HPP
#define GASNET_LINEAR_SOLVER_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>

namespace gasnet {

/// Counts matrix factorizations. Solvers increment it once per successful
/// factorize() call; run telemetry reads it back.
class FactorizationCounter {
public:
  void increment() { ++count_; }
  long value() const { return count_; }
  void reset() { count_ = 0; }

private:
  long count_ = 0;
};

/// Reciprocal condition estimates below this are treated as singular.
inline constexpr double kSingularRcond = 1e-14;

class DenseLuSolver {
public:
  explicit DenseLuSolver(FactorizationCounter* counter = nullptr)
      : counter_(counter) {}

  /// Throws SolverError when A is singular or numerically rank deficient;
  /// the error carries the 1-norm condition estimate.
  void factorize(const Eigen::MatrixXd& A);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  bool ready() const { return ready_; }
  /// Estimated 1-norm condition number of the last factored matrix.
  double condition_estimate() const { return condition_; }

private:
  FactorizationCounter* counter_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool ready_ = false;
  double condition_ = 0.0;
};

/// Sparse LU that analyzes the sparsity pattern on the first factorization
/// and reuses it while the pattern stays the same.
class SparseLuSolver {
public:
  explicit SparseLuSolver(FactorizationCounter* counter = nullptr)
      : counter_(counter) {}

  void factorize(const Eigen::SparseMatrix<double>& A);
  Eigen::VectorXd solve(const Eigen::VectorXd& b);

private:
  FactorizationCounter* counter_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
  Eigen::Index nnz_ = -1;
};

}  // namespace gasnet

#endif  // GASNET_LINEAR_SOLVER_HPP
