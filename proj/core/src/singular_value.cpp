#include "halfres/singular_value.hpp"

#include <cmath>

#include "halfres/errors.hpp"

namespace halfres {

SingularValueEstimate largest_singular_value(Eigen::Index n, const MatVec& apply,
                                             const MatVec& apply_adjoint, double rtol,
                                             int max_iterations) {
  if (n <= 0) throw DomainError("largest_singular_value: empty operator");
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n) / std::sqrt(static_cast<double>(n));
  Eigen::VectorXcd w(n), z(n);
  SingularValueEstimate est;
  double previous = -1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    apply(v, w);
    const double value = w.norm();
    est.value = value;
    est.iterations = it;
    if (!std::isfinite(value)) throw ConvergenceError("largest_singular_value: non-finite iterate");
    if (value == 0.0) {
      est.converged = true;
      return est;
    }
    if (previous >= 0.0 && std::abs(value - previous) <= rtol * value) {
      est.converged = true;
      return est;
    }
    previous = value;
    apply_adjoint(w, z);
    const double zn = z.norm();
    if (zn == 0.0) {
      est.converged = true;
      return est;
    }
    v = z / zn;
  }
  return est;
}

SingularValueEstimate largest_singular_value(const Eigen::MatrixXcd& B, double rtol, int max_iterations) {
  if (B.rows() != B.cols()) throw DomainError("largest_singular_value: square matrix expected");
  return largest_singular_value(
      B.cols(), [&B](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out.noalias() = B * in; },
      [&B](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out.noalias() = B.adjoint() * in; },
      rtol, max_iterations);
}

}  // namespace halfres
