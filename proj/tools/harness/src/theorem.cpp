#include <algorithm>
#include <cmath>

#include "halfres/errors.hpp"
#include "halfres/harness/commands.hpp"
#include "halfres/parallel.hpp"

namespace halfres::harness {

namespace {

bool inside(const Rect& outer, const Rect& inner) {
  return outer.lo.real() <= inner.lo.real() && outer.lo.imag() <= inner.lo.imag() &&
         outer.hi.real() >= inner.hi.real() && outer.hi.imag() >= inner.hi.imag();
}

int count_in(const std::vector<Resonance>& rs, const Rect& r) {
  int n = 0;
  for (const auto& z : rs)
    if (r.contains(z.lambda)) n += z.multiplicity;
  return n;
}

double median(std::vector<double> v) {
  if (v.empty()) return 1.0;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

}  // namespace

TheoremReport theorem_check(const PotentialModel& model, const ExperimentConfig& cfg, std::size_t threads) {
  require_h_list(cfg);
  for (double h : cfg.h_list)
    if (!(h < 1.0)) throw ConfigError("field 'h_list': theorem-check needs h < 1", "h_list");
  TheoremReport rep;
  rep.model = model.label;
  const auto so = scan_options(cfg);
  const double gamma = model.gamma;
  const auto weight = make_weight(model.x_box, model.x_box + cfg.norm.taper);
  auto& recs = rep.records;
  recs.resize(cfg.h_list.size());

  parallel_for(recs.size(), threads, [&](std::size_t i) {
    auto& rec = recs[i];
    rec.h = cfg.h_list[i];
    const double h = rec.h;
    try {
      const auto cluster = quasimode_cluster(model, cfg, h);
      if (!cluster.unmet.empty() || cluster.members.empty()) {
        rec.status = "hypotheses unmet";
        rec.detail = cluster.unmet.empty() ? "no admissible quasimode" : cluster.unmet;
        for (double e : cluster.energies) rec.lambdas.push_back(std::sqrt(std::max(e, 0.0)));
        return;
      }
      for (const auto& q : cluster.members) rec.lambdas.push_back(q.lambda);
      rec.R = cluster.R;
      rec.m = cluster.members.size();
      rec.S = exclusion_radius(cfg, rec.R, h);
      const auto [lo, hi] = std::minmax_element(rec.lambdas.begin(), rec.lambdas.end());
      const double depth = std::min(cfg.scan.depth, (gamma - cfg.window.eps0) * h);
      rec.scanned = Rect{cplx(*lo - cfg.scan.half_width, -depth), cplx(*hi + cfg.scan.half_width, cfg.scan.im_upper)};
      const auto sr = scan_resonances(model, rec.scanned, h, so);
      rec.resonances = sr.resonances;
      rec.total_winding = sr.total_winding;

      const auto pts = rect_grid(rec.scanned, cfg.norm.nx, cfg.norm.ny);
      std::vector<Disk> excl;
      for (const auto& r : rec.resonances) excl.push_back(Disk{r.lambda, rec.S});
      std::vector<double> wabs;
      for (const auto z : pts) wabs.push_back(std::abs(wronskian(model, z, h, so.continuation).value));
      NormOptions no;
      no.rtol = cfg.norm.rtol;
      no.w_scale = median(wabs);
      no.continuation = so.continuation;
      double lam_max = 0.0;
      for (const auto z : pts) lam_max = std::max(lam_max, std::abs(z));
      const auto grid = default_resolvent_grid(lam_max, h, gamma, weight, cfg.norm.points_per_wavelength);
      rec.norms = norm_scan(model, pts, h, gamma, weight, grid, excl, no, 1);
      rec.norms.S = rec.S;
    } catch (const Error& e) {
      rec.status = "error";
      rec.detail = e.what();
    }
  });

  std::vector<AprioriInput> inputs;
  for (const auto& rec : recs)
    if (rec.status.empty()) inputs.push_back({rec.norms, rec.resonances, rec.total_winding});
  double p = 4.0;
  if (!inputs.empty()) {
    rep.apriori = apriori_bound_check(inputs, cfg.theorem.A_cap);
    p = rep.apriori.p_fit;
  } else {
    rep.apriori.status = "no fit";
  }

  const auto& th = cfg.theorem;
  for (auto& rec : recs) {
    if (!rec.status.empty()) continue;
    const double h = rec.h;
    const double log_inv_h = std::log(1.0 / h);
    rec.gate = std::pow(h, p + th.N + 1.0) / (th.C * log_inv_h);
    rec.gate_met = rec.R <= rec.gate;
    rec.c = std::max(th.C0 * th.B * th.M * rec.R * std::pow(h, -p - th.N - 1.0), std::exp(-th.B / h));
    const auto [lo, hi] = std::minmax_element(rec.lambdas.begin(), rec.lambdas.end());
    const double spread = rec.c * log_inv_h;
    rec.strip = Rect{cplx(*lo - spread, -rec.c), cplx(*hi + spread, 0.0)};
    const Rect enlarged{cplx(*lo - 1.1 * spread, -1.1 * rec.c), cplx(*hi + 1.1 * spread, 0.0)};
    try {
      if (!inside(rec.scanned, enlarged)) {
        const double floor_im = -(gamma - cfg.window.eps0) * h;
        Rect wide{cplx(std::min(rec.scanned.lo.real(), enlarged.lo.real()),
                       std::max(floor_im, std::min(rec.scanned.lo.imag(), enlarged.lo.imag()))),
                  cplx(std::max(rec.scanned.hi.real(), enlarged.hi.real()), rec.scanned.hi.imag())};
        if (wide.lo.real() <= 0.0) wide.lo = cplx(1e-3, wide.lo.imag());
        if (wide.lo.imag() > enlarged.lo.imag() || wide.lo.real() > enlarged.lo.real())
          rec.detail = "strip clipped to the continuation strip";
        const auto sr = scan_resonances(model, wide, h, so);
        rec.scanned = wide;
        rec.resonances = sr.resonances;
        rec.total_winding = sr.total_winding;
      }
      rec.in_strip = count_in(rec.resonances, rec.strip);
      rec.in_enlarged_strip = count_in(rec.resonances, enlarged);
      const double center = 0.5 * (*lo + *hi);
      for (const auto& r : rec.resonances) {
        const double d = std::abs(r.lambda - center);
        if (!rec.nearest || d < rec.nearest_distance) {
          rec.nearest = r;
          rec.nearest_distance = d;
        }
      }
      if (!rec.gate_met)
        rec.status = "hypotheses unmet";
      else if (rec.in_strip >= static_cast<int>(rec.m))
        rec.status = "pass";
      else
        rec.status = "conclusion violated";
    } catch (const Error& e) {
      rec.status = "error";
      rec.detail = e.what();
    }
  }

  std::vector<double> xs, ys;
  for (const auto& rec : recs)
    if (rec.nearest && rec.nearest->lambda.imag() < 0.0) {
      xs.push_back(1.0 / rec.h);
      ys.push_back(std::log(-rec.nearest->lambda.imag()));
    }
  if (xs.size() >= 2) rep.decay_fit = fit_line(xs, ys);
  rep.distance_decreasing = true;
  std::optional<double> prev;
  for (const auto& rec : recs) {
    if (!rec.nearest) continue;
    if (prev && !(rec.nearest_distance < *prev)) rep.distance_decreasing = false;
    prev = rec.nearest_distance;
  }
  rep.all_pass = !recs.empty();
  for (const auto& rec : recs) {
    rep.all_pass = rep.all_pass && rec.status == "pass";
    rep.violated = rep.violated || rec.status == "conclusion violated" || rec.status == "error";
  }
  return rep;
}

}  // namespace halfres::harness
