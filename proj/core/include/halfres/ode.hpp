#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "halfres/types.hpp"

namespace halfres {

using OdeState = std::array<cplx, 2>;
using OdeRhs = std::function<OdeState(double, const OdeState&)>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  std::size_t max_steps = 2'000'000;
  double min_step = 1e-14;
};

/// States at every accepted mesh node, in the direction of integration.
struct OdeTrajectory {
  std::vector<double> mesh;
  std::vector<OdeState> states;

  /// State at a node that is exactly on the mesh. Throws DomainError otherwise.
  const OdeState& at(double x) const;
};

/// Adaptive Dormand-Prince 5(4) from x0 to x1 (either direction). Every breakpoint and every
/// output point strictly between the endpoints becomes a mesh node.
/// Throws StiffnessError when the step size collapses or max_steps is exceeded.
OdeTrajectory integrate_adaptive(const OdeRhs& rhs, double x0, double x1, const OdeState& y0,
                                 const OdeOptions& opts, std::span<const double> stops);

/// Dormand-Prince 5th-order steps on a prescribed mesh (first node is the initial point).
/// With a fixed mesh the result is an analytic function of any complex parameter in rhs.
OdeTrajectory integrate_on_mesh(const OdeRhs& rhs, std::span<const double> mesh,
                                const OdeState& y0);

using xcplx = std::complex<long double>;
using OdeStateX = std::array<xcplx, 2>;
using OdeRhsX = std::function<OdeStateX(long double, const OdeStateX&)>;

/// integrate_on_mesh in long double arithmetic; returns the state at every node.
std::vector<OdeStateX> integrate_on_mesh_extended(const OdeRhsX& rhs, std::span<const double> mesh,
                                                  const OdeStateX& y0);

/// Sorted union of meshes (nodes within tol merged); direction follows the first mesh.
std::vector<double> merge_meshes(const std::vector<std::vector<double>>& meshes, double tol = 0.0);

}  // namespace halfres
