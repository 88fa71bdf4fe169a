#pragma once

#include <functional>

#include <Eigen/Dense>

namespace halfres {

using MatVec = std::function<void(const Eigen::VectorXcd& in, Eigen::VectorXcd& out)>;

struct SingularValueEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value of B by power iteration on B^H B from the normalized all-ones vector.
/// Stops when successive estimates agree to rtol (relative).
SingularValueEstimate largest_singular_value(Eigen::Index n, const MatVec& apply,
                                             const MatVec& apply_adjoint, double rtol = 1e-4,
                                             int max_iterations = 3000);

/// Dense convenience overload.
SingularValueEstimate largest_singular_value(const Eigen::MatrixXcd& B, double rtol = 1e-4,
                                             int max_iterations = 3000);

}  // namespace halfres
