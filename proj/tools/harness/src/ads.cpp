#include <algorithm>
#include <cmath>

#include "halfres/errors.hpp"
#include "halfres/harness/commands.hpp"
#include "halfres/parallel.hpp"

namespace halfres::harness {

namespace {

std::optional<Resonance> nearest_to(const std::vector<Resonance>& rs, double lambda0) {
  std::optional<Resonance> best;
  for (const auto& r : rs)
    if (!best || std::abs(r.lambda - lambda0) < std::abs(best->lambda - lambda0)) best = r;
  return best;
}

}  // namespace

AdsReport ads_sweep(const ExperimentConfig& cfg, std::size_t threads) {
  require_ell_list(cfg, 4);
  AdsReport rep;
  auto& recs = rep.records;
  recs.resize(cfg.ell_list.size());
  const auto so = scan_options(cfg);
  const auto so_check = scan_options(cfg, true);

  parallel_for(recs.size(), threads, [&](std::size_t i) {
    auto& rec = recs[i];
    rec.ell = cfg.ell_list[i];
    ModelSpec spec = cfg.model;
    spec.name = "ads_like";
    spec.params = {rec.ell};
    try {
      const auto model = build_model(spec);
      rec.h = *model.h_default;
      const double h = rec.h;
      const auto& q = cfg.quasimode;
      const auto pairs =
          dirichlet_eigensolve(model, q.L, h, q.eigen_count, default_interior_points(model, q.L, h, q.points_per_wavelength));
      const double lo = cfg.window.a0 + cfg.window.eps, hi = cfg.window.b0 - cfg.window.eps;
      const EigenPair* pick = nullptr;
      for (const auto& p : pairs)
        if (p.eigenvalue > 0.0 && std::sqrt(p.eigenvalue) > lo && std::sqrt(p.eigenvalue) < hi) {
          pick = &p;
          break;
        }
      if (!pick) {
        rec.status = "no quasimode";
        rec.detail = "no Dirichlet eigenvalue in the window";
        return;
      }
      rec.energy = pick->eigenvalue;
      rec.lambda0 = std::sqrt(rec.energy);
      try {
        QuasimodeOptions qo;
        qo.tail_threshold = q.tail_threshold;
        const CutoffSpec cut{q.x_cut, q.width.value_or(std::min(default_cutoff_width(h), q.L - q.x_cut))};
        rec.R = build_quasimode(model, *pick, h, cut, qo).accuracy;
      } catch (const BadCutoffError& e) {
        rec.detail = e.what();
      }
      const double depth = std::min(cfg.scan.depth, (model.gamma - cfg.window.eps0) * h);
      const Rect box{cplx(rec.lambda0 - cfg.scan.half_width, -depth),
                     cplx(rec.lambda0 + cfg.scan.half_width, cfg.scan.im_upper)};
      rec.nearest = nearest_to(scan_resonances(model, box, h, so).resonances, rec.lambda0);
      if (!rec.nearest) {
        rec.status = "missing resonance";
        rec.detail = "no resonance in the scan box";
        return;
      }
      rec.width = -rec.nearest->lambda.imag() / h;
      const auto check = nearest_to(scan_resonances(model, box, h, so_check).resonances, rec.lambda0);
      rec.width_check = check ? -check->lambda.imag() / h : std::nan("");
      rec.resolved = check && std::abs(rec.width - rec.width_check) <= 0.5 * std::max(rec.width, rec.width_check);
      rec.status = rec.width > 0.0 ? "ok" : "nonpositive width";
    } catch (const Error& e) {
      rec.status = "error";
      rec.detail = e.what();
    }
  });

  std::vector<double> ls, lw, rls, rlw, ws;
  rep.all_positive = true;
  for (const auto& rec : recs) {
    if (rec.status != "ok") {
      rep.all_positive = false;
      continue;
    }
    ls.push_back(rec.ell);
    ws.push_back(rec.width);
    lw.push_back(std::log(rec.width));
    if (rec.resolved) {
      rls.push_back(rec.ell);
      rlw.push_back(std::log(rec.width));
    }
  }
  if (ls.size() >= 2) rep.fit = fit_line(ls, lw);
  if (rls.size() >= 2) rep.resolved_fit = fit_line(rls, rlw);
  if (rep.all_positive) rep.C_min = smallest_decay_constant(ls, ws);
  rep.pass = rep.all_positive && rep.fit && rep.fit->slope < 0.0;
  return rep;
}

}  // namespace halfres::harness
