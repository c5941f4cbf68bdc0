// Per-cell initial profiles carried from one time step to the next.

#ifndef GASNET_STEP_STATE_HPP
#define GASNET_STEP_STATE_HPP

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "gasnet/polynomial.hpp"
#include "gasnet/steady.hpp"

namespace gasnet {

/// Normalized univariate profile over the cell abscissa dx in [0, 1]:
/// either a polynomial (ascending powers) or a segment of a steady pressure
/// profile, p(x0 + dx * dL) / scale.
class CellProfile {
public:
  struct SteadySegment {
    SteadyProfile profile;
    double cell_index = 0.0;  // x0 = cell_index * dL
    double dL = 0.0;
    double scale = 1.0;
  };

  CellProfile() : repr_(Eigen::VectorXd::Zero(1)) {}

  static CellProfile constant(double value) {
    return polynomial(Eigen::VectorXd::Constant(1, value));
  }
  static CellProfile polynomial(Eigen::VectorXd coeffs) {
    CellProfile c;
    c.repr_ = std::move(coeffs);
    return c;
  }
  static CellProfile steady(const SteadySegment& seg) {
    CellProfile c;
    c.repr_ = seg;
    return c;
  }

  double operator()(double dx) const {
    if (const auto* poly = std::get_if<Eigen::VectorXd>(&repr_))
      return evaluate_univariate(*poly, dx);
    const auto& s = std::get<SteadySegment>(repr_);
    return s.profile((s.cell_index + dx) * s.dL) / s.scale;
  }

  /// Coefficients when polynomial, nullptr otherwise.
  const Eigen::VectorXd* coefficients() const {
    return std::get_if<Eigen::VectorXd>(&repr_);
  }

private:
  std::variant<Eigen::VectorXd, SteadySegment> repr_;
};

struct CellState {
  CellProfile p;
  CellProfile q;
};

struct StepState {
  std::vector<std::vector<CellState>> pipes;  // [pipeline][cell]
};

}  // namespace gasnet

#endif  // GASNET_STEP_STATE_HPP
