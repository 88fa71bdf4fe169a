#include "halfres/quasimodes.hpp"

#include <algorithm>
#include <cmath>

#include "halfres/errors.hpp"

#include <lapacke.h>

namespace halfres {

namespace {

// Staggered fourth-order derivative at half points x_{i+1/2}, i = 0..n, acting on the interior
// unknowns u_1..u_n with odd ghosts u_{-1} = -u_1 and u_{n+2} = -u_n.
Eigen::MatrixXd staggered_derivative(std::size_t n, double dx) {
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 1, N);
  auto add = [&](Eigen::Index row, Eigen::Index node, double c) {
    // node in 0..n+1 full-grid numbering; ghosts -1 and n+2.
    if (node == -1) D(row, 0) -= c;
    else if (node == N + 2) D(row, N - 1) -= c;
    else if (node >= 1 && node <= N) D(row, node - 1) += c;
  };
  const double s = 1.0 / (24.0 * dx);
  for (Eigen::Index i = 0; i <= N; ++i) {
    add(i, i - 1, s);
    add(i, i, -27.0 * s);
    add(i, i + 1, 27.0 * s);
    add(i, i + 2, -s);
  }
  return D;
}

// Nonzero entries of row `row` of the staggered derivative, ghosts folded into columns.
std::vector<std::pair<long, double>> derivative_row(long row, long n, double dx) {
  const double s = 1.0 / (24.0 * dx);
  std::vector<std::pair<long, double>> out;
  auto add = [&](long node, double c) {
    long col;
    if (node == -1) { col = 0; c = -c; }
    else if (node == n + 2) { col = n - 1; c = -c; }
    else if (node >= 1 && node <= n) col = node - 1;
    else return;
    for (auto& e : out)
      if (e.first == col) { e.second += c; return; }
    out.emplace_back(col, c);
  };
  add(row - 1, s);
  add(row, -27.0 * s);
  add(row + 1, 27.0 * s);
  add(row + 2, -s);
  return out;
}

double interpolate_abs(const std::vector<double>& x, const std::vector<double>& u, double at) {
  if (at <= x.front()) return std::abs(u.front());
  if (at >= x.back()) return std::abs(u.back());
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double t = (at - x[j - 1]) / (x[j] - x[j - 1]);
  return std::abs((1.0 - t) * u[j - 1] + t * u[j]);
}

}  // namespace

Eigen::MatrixXd dirichlet_matrix(const PotentialModel& model, double L, double h, std::size_t n) {
  if (!(L > 0.0) || !(h > 0.0)) throw DomainError("dirichlet_matrix: need L > 0 and h > 0");
  if (n < 4) throw ResolutionError("dirichlet_matrix: need at least four interior points");
  const double dx = L / static_cast<double>(n + 1);
  const auto D = staggered_derivative(n, dx);
  Eigen::VectorXd a(static_cast<Eigen::Index>(n + 1));
  for (std::size_t i = 0; i <= n; ++i) a(static_cast<Eigen::Index>(i)) = model.a((static_cast<double>(i) + 0.5) * dx, h);
  Eigen::MatrixXd A = h * h * (D.transpose() * a.asDiagonal() * D);
  for (std::size_t i = 0; i < n; ++i)
    A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += model.V(static_cast<double>(i + 1) * dx, h);
  return A;
}

std::size_t default_interior_points(const PotentialModel& model, double L, double h, double points_per_wavelength) {
  double vmin = 0.0, vmax = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double v = model.V(L * i / 400.0, h);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double k = std::sqrt(std::max(1.0, vmax + 1.0 - vmin)) / h;
  const double dx = 2.0 * kPi / (k * points_per_wavelength);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(L / dx)), 400, 20000);
}

std::vector<EigenPair> dirichlet_eigensolve(const PotentialModel& model, double L, double h, std::size_t count,
                                            std::optional<std::size_t> n_interior) {
  const std::size_t n = n_interior ? *n_interior : default_interior_points(model, L, h);
  if (count == 0 || count > n) throw DomainError("dirichlet_eigensolve: count must be in [1, grid size]");
  const double dx = L / static_cast<double>(n + 1);
  double vmin = 0.0, vmax = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    vmin = std::min(vmin, model.V(static_cast<double>(i) * dx, h));
    vmax = std::max(vmax, model.V(static_cast<double>(i) * dx, h));
  }
  const double kmax = std::sqrt(std::max(1.0, vmax + 1.0 - vmin)) / h;
  if (dx * kmax > 2.0 * kPi / 12.0)
    throw ResolutionError("dirichlet_eigensolve: fewer than 12 points per semiclassical wavelength");
  // Banded (kd = 3) symmetric storage, upper triangle, column major.
  const long N = static_cast<long>(n);
  const int kd = 3;
  const int ldab = kd + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  auto band = [&](long i, long j) -> double& { return ab[static_cast<std::size_t>(kd + i - j + j * ldab)]; };
  for (long r = 0; r <= N; ++r) {
    const double w = h * h * model.a((static_cast<double>(r) + 0.5) * dx, h);
    const auto row = derivative_row(r, N, dx);
    for (const auto& [ci, vi] : row)
      for (const auto& [cj, vj] : row)
        if (ci <= cj) band(ci, cj) += w * vi * vj;
  }
  for (long i = 0; i < N; ++i) band(i, i) += model.V(static_cast<double>(i + 1) * dx, h);
  std::vector<double> qwork(1), w(n), z(1);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  std::vector<double> ab_copy = ab;
  const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', static_cast<lapack_int>(n), kd, ab_copy.data(),
                                         ldab, qwork.data(), 1, 0.0, 0.0, 1, static_cast<lapack_int>(count),
                                         2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), 1, ifail.data());
  if (info != 0 || found != static_cast<lapack_int>(count))
    throw ConvergenceError("dirichlet_eigensolve: banded eigensolver failed");

  // Eigenvectors by inverse iteration with a banded LU of A - mu.
  const int ldg = 3 * kd + 1;
  auto eigenvector = [&](double mu) {
    std::vector<double> g(static_cast<std::size_t>(ldg) * n, 0.0);
    for (long j = 0; j < N; ++j)
      for (long i = std::max(0L, j - kd); i <= std::min(N - 1, j + kd); ++i) {
        const double v = i <= j ? band(i, j) : band(j, i);
        g[static_cast<std::size_t>(2 * kd + i - j + j * ldg)] = v - (i == j ? mu : 0.0);
      }
    std::vector<lapack_int> piv(n);
    if (LAPACKE_dgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), static_cast<lapack_int>(n), kd, kd, g.data(), ldg,
                       piv.data()) < 0)
      throw ConvergenceError("dirichlet_eigensolve: banded factorization failed");
    std::vector<double> v(n, 1.0);
    for (int it = 0; it < 3; ++it) {
      if (LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n), kd, kd, 1, g.data(), ldg, piv.data(),
                         v.data(), static_cast<lapack_int>(n)) != 0)
        throw ConvergenceError("dirichlet_eigensolve: banded solve failed");
      double nrm = 0.0;
      for (double x : v) nrm = std::max(nrm, std::abs(x));
      if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ConvergenceError("dirichlet_eigensolve: inverse iteration failed");
      for (double& x : v) x /= nrm;
    }
    return v;
  };
  std::vector<EigenPair> out;
  for (std::size_t k = 0; k < count; ++k) {
    EigenPair p;
    p.eigenvalue = w[k];
    p.dx = dx;
    p.x.resize(n + 2);
    p.u.assign(n + 2, 0.0);
    for (std::size_t i = 0; i < n + 2; ++i) p.x[i] = static_cast<double>(i) * dx;
    p.x.back() = L;
    const auto vec = eigenvector(w[k] + 1e-12 * std::max(1.0, std::abs(w[k])));
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p.u[i + 1] = vec[i];
      norm2 += p.u[i + 1] * p.u[i + 1] * dx;
    }
    const double s = 1.0 / std::sqrt(norm2);
    // Fix the sign so that the first large entry is positive.
    double sign = 1.0;
    for (double v : p.u)
      if (std::abs(v) > 1e-3 / std::sqrt(norm2)) {
        sign = v > 0 ? 1.0 : -1.0;
        break;
      }
    for (double& v : p.u) v *= s * sign;
    out.push_back(std::move(p));
  }
  return out;
}

double default_cutoff_width(double h) { return std::clamp(4.0 * std::sqrt(h), 0.2, 1.0); }

Quasimode build_quasimode(const PotentialModel& model, const EigenPair& pair, double h, CutoffSpec cutoff,
                          const QuasimodeOptions& opts) {
  if (pair.u.size() < 6 || pair.u.size() != pair.x.size()) throw DomainError("build_quasimode: malformed eigenpair");
  if (cutoff.width <= 0.0) cutoff.width = default_cutoff_width(h);
  const double L = pair.x.back();
  if (!(cutoff.x_cut > 0.0) || cutoff.x_cut >= L) throw BadCutoffError("build_quasimode: x_cut must lie in (0, L)");
  if (pair.eigenvalue < 0.0) throw DomainError("build_quasimode: negative eigenvalue has no real frequency");
  if (opts.energy_window &&
      (pair.eigenvalue <= opts.energy_window->first || pair.eigenvalue >= opts.energy_window->second))
    throw DomainError("build_quasimode: eigenvalue outside the energy window");

  double umax = 0.0;
  for (double v : pair.u) umax = std::max(umax, std::abs(v));
  const double tail = interpolate_abs(pair.x, pair.u, cutoff.x_cut) / umax;
  if (tail > opts.tail_threshold)
    throw BadCutoffError("build_quasimode: eigenfunction is not small at the cutoff");

  Quasimode q;
  q.dx = pair.dx;
  q.h = h;
  q.lambda = std::sqrt(pair.eigenvalue);
  q.cutoff = cutoff;
  q.support_radius = std::min(cutoff.x_cut + cutoff.width, L);
  // Extend with zeros by one unit so the stencil sees the whole support.
  const std::size_t extra = static_cast<std::size_t>(std::ceil(1.0 / pair.dx));
  const std::size_t total = pair.x.size() + extra;
  q.x.resize(total);
  q.u.assign(total, 0.0);
  for (std::size_t i = 0; i < total; ++i) q.x[i] = static_cast<double>(i) * pair.dx;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < pair.x.size(); ++i) {
    const double chi = 1.0 - smoothstep5((pair.x[i] - cutoff.x_cut) / cutoff.width);
    q.u[i] = chi * pair.u[i];
    norm2 += q.u[i] * q.u[i] * pair.dx;
  }
  const double s = 1.0 / std::sqrt(norm2);
  for (double& v : q.u) v *= s;
  q.accuracy = quasimode_residual(model, q);
  return q;
}

namespace {

Eigen::VectorXd apply_stencil(const PotentialModel& model, const Quasimode& q, double shift) {
  // Matrix-free D^T diag(a) D on the interior unknowns, same ghosts as dirichlet_matrix.
  const std::size_t n = q.u.size() - 2;
  const auto N = static_cast<long>(n);
  const double dx = q.dx;
  const double s = 1.0 / (24.0 * dx);
  auto node = [&](long k) -> double {
    if (k == -1) return -q.u[1];
    if (k == N + 2) return -q.u[n];
    if (k <= 0 || k >= N + 1) return 0.0;
    return q.u[static_cast<std::size_t>(k)];
  };
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  auto scatter = [&](long k, double v) {
    if (k == -1) out(0) -= v;
    else if (k == N + 2) out(N - 1) -= v;
    else if (k >= 1 && k <= N) out(k - 1) += v;
  };
  for (long i = 0; i <= N; ++i) {
    const double d = s * (node(i - 1) - 27.0 * node(i) + 27.0 * node(i + 1) - node(i + 2));
    const double w = q.h * q.h * model.a((static_cast<double>(i) + 0.5) * dx, q.h) * d;
    scatter(i - 1, s * w);
    scatter(i, -27.0 * s * w);
    scatter(i + 1, 27.0 * s * w);
    scatter(i + 2, -s * w);
  }
  for (long k = 1; k <= N; ++k) out(k - 1) += (model.V(static_cast<double>(k) * dx, q.h) - shift) * q.u[static_cast<std::size_t>(k)];
  return out;
}

}  // namespace

double quasimode_residual(const PotentialModel& model, const Quasimode& q) {
  const Eigen::VectorXd r = apply_stencil(model, q, q.lambda * q.lambda);
  return r.norm() * std::sqrt(q.dx);
}

double rayleigh_quotient(const PotentialModel& model, const Quasimode& q) {
  const Eigen::VectorXd Au = apply_stencil(model, q, 0.0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < Au.size(); ++i) acc += q.u[static_cast<std::size_t>(i) + 1] * Au(i);
  return acc * q.dx;
}

IndependenceReport independence_check(const std::vector<Quasimode>& family, double h, double N, double M) {
  if (family.empty()) throw DomainError("independence_check: empty family");
  if (!(M > 0.0)) throw DomainError("independence_check: M must be > 0");
  const std::size_t m = family.size();
  std::size_t len = 0;
  for (const auto& q : family) len = std::max(len, q.u.size());
  Eigen::MatrixXd G(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      const std::size_t common = std::min(family[i].u.size(), family[j].u.size());
      for (std::size_t k = 0; k < common; ++k) acc += family[i].u[k] * family[j].u[k];
      G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc * family[i].dx;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  IndependenceReport rep;
  rep.margin = std::sqrt(std::max(0.0, es.eigenvalues()(0)));
  rep.threshold = 2.0 * static_cast<double>(m) * std::pow(h, N) / M;
  rep.independent = rep.margin > rep.threshold;
  return rep;
}

}  // namespace halfres
