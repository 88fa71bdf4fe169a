#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "halfres/errors.hpp"
#include "halfres/harness/commands.hpp"

namespace halfres::harness {

ContinuationOptions continuation_options(const ExperimentConfig& cfg, bool check_tolerances) {
  ContinuationOptions o;
  o.ode.rtol = check_tolerances ? cfg.tolerances.check_rtol : cfg.tolerances.ode_rtol;
  o.ode.atol = check_tolerances ? cfg.tolerances.check_atol : cfg.tolerances.ode_atol;
  return o;
}

ScanOptions scan_options(const ExperimentConfig& cfg, bool check_tolerances) {
  ScanOptions o;
  o.boundary_tol = cfg.scan.boundary_tol;
  o.dedup_tol = cfg.scan.dedup_tol;
  o.zero_tol = cfg.scan.zero_tol;
  o.extended_polish = cfg.scan.extended_polish;
  o.continuation = continuation_options(cfg, check_tolerances);
  return o;
}

ClusterResult quasimode_cluster(const PotentialModel& model, const ExperimentConfig& cfg, double h) {
  const auto& q = cfg.quasimode;
  const auto n = default_interior_points(model, q.L, h, q.points_per_wavelength);
  const auto pairs = dirichlet_eigensolve(model, q.L, h, q.eigen_count, n);
  std::vector<const EigenPair*> chosen;
  if (q.target_energy) {
    const auto it = std::min_element(pairs.begin(), pairs.end(), [&](const EigenPair& x, const EigenPair& y) {
      return std::abs(x.eigenvalue - *q.target_energy) < std::abs(y.eigenvalue - *q.target_energy);
    });
    if (it != pairs.end()) chosen.push_back(&*it);
  } else {
    const double lo = cfg.window.a0 + cfg.window.eps, hi = cfg.window.b0 - cfg.window.eps;
    for (const auto& p : pairs)
      if (p.eigenvalue > 0.0 && std::sqrt(p.eigenvalue) > lo && std::sqrt(p.eigenvalue) < hi) chosen.push_back(&p);
  }
  ClusterResult out;
  if (chosen.empty()) {
    out.unmet = "no Dirichlet eigenvalue in the energy window";
    return out;
  }
  const CutoffSpec cut{q.x_cut, q.width.value_or(std::min(default_cutoff_width(h), q.L - q.x_cut))};
  QuasimodeOptions qo;
  qo.tail_threshold = q.tail_threshold;
  for (const auto* p : chosen) {
    out.energies.push_back(p->eigenvalue);
    try {
      out.members.push_back(build_quasimode(model, *p, h, cut, qo));
      out.R = std::max(out.R, out.members.back().accuracy);
    } catch (const BadCutoffError& e) {
      out.unmet = e.what();
    } catch (const DomainError& e) {
      out.unmet = e.what();
    }
  }
  return out;
}

double exclusion_radius(const ExperimentConfig& cfg, double R, double h) {
  if (cfg.S.kind == "fixed") return cfg.S.value;
  return std::min(0.5, std::max(R / (h * h), cfg.S.floor));
}

std::optional<double> smallest_decay_constant(const std::vector<double>& ell, const std::vector<double>& width) {
  double best = 0.0;
  for (std::size_t i = 0; i < ell.size(); ++i) {
    if (!(width[i] > 0.0)) return std::nullopt;
    // log C - l/C is increasing in C.
    const auto g = [&](double C) { return std::log(C) - ell[i] / C - std::log(width[i]); };
    double lo = 1e-8, hi = 1e8;
    if (g(lo) >= 0.0) continue;
    for (int k = 0; k < 200; ++k) {
      const double mid = std::sqrt(lo * hi);
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    best = std::max(best, hi);
  }
  return best;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coefficients) {
  std::size_t deg = coefficients.size();
  while (deg > 0 && coefficients[deg - 1] == cplx(0.0)) --deg;
  if (deg <= 1) return {};
  const auto n = static_cast<Eigen::Index>(deg - 1);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) C(i, n - 1) = -coefficients[static_cast<std::size_t>(i)] / coefficients[deg - 1];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return roots;
}

Json to_json(const Resonance& r) {
  Json j;
  j["lambda"] = to_json(r.lambda);
  j["multiplicity"] = r.multiplicity;
  j["h"] = r.h;
  j["wronskian_derivative_abs"] = number_or_null(std::abs(r.wronskian_derivative));
  return j;
}

Json to_json(const Rect& r) {
  Json j;
  j["re_min"] = r.lo.real();
  j["re_max"] = r.hi.real();
  j["im_min"] = r.lo.imag();
  j["im_max"] = r.hi.imag();
  return j;
}

Json to_json(const SlopeFit& f) {
  Json j;
  j["slope"] = number_or_null(f.slope);
  j["intercept"] = number_or_null(f.intercept);
  j["r_squared"] = number_or_null(f.r_squared);
  return j;
}

}  // namespace halfres::harness
