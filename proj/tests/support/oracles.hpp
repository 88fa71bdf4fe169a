#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Square well V = -V0 on [0, a), free beyond, h = 1.
// Resonances and bound states are the zeros of
//   F(s) = cos(k a) - i s sin(k a) / k,   k = sqrt(s^2 + V0),
// which is entire in s (both terms are even in k).
cplx square_well_F(cplx sigma, double V0, double a);
cplx square_well_jost_at_zero(cplx sigma, double V0, double a);

// All zeros of square_well_F in the rectangle [re_lo, re_hi] x [im_lo, im_hi], found by Newton
// from a dense seed lattice with the analytic derivative, deduplicated.
std::vector<cplx> square_well_roots(double V0, double a, double re_lo, double re_hi, double im_lo,
                                    double im_hi);

// Dense second-order finite-difference solve of
//   -h^2 u'' + (V(x) - lambda^2) u = g   on [0, X],  u(0) = 0,  u'(X) = i (lambda/h) u(X),
// on n + 1 equispaced nodes. Returns u at the nodes.
std::vector<cplx> robin_bvp_solve(const std::function<double(double)>& V, cplx lambda, double h, double X,
                                  std::size_t n, const std::function<cplx(double)>& g);

// Lowest `count` Dirichlet eigenvalues of -h^2 d^2 + V on [0, L] from a dense second-order
// finite-difference matrix, Richardson-extrapolated over n and 2n interior points.
std::vector<double> dirichlet_eigenvalues(const std::function<double(double)>& V, double L, double h,
                                          std::size_t n, std::size_t count);

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracle
