#include "kslab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kslab/kernels.hpp"

namespace kslab {

namespace {

constexpr double kFloor = 1e-300;

// trapezoid cumulative of a column over [0, t_k], seeded with the t=0 record
template <class Get>
std::vector<double> cum_trapz(const StepRecord& initial, const std::vector<StepRecord>& s,
                              Get get) {
  std::vector<double> out(s.size());
  double acc = 0.0, tprev = 0.0, yprev = get(initial);
  for (std::size_t k = 0; k < s.size(); ++k) {
    acc += 0.5 * (get(s[k]) + yprev) * (s[k].t - tprev);
    out[k] = acc;
    tprev = s[k].t;
    yprev = get(s[k]);
  }
  return out;
}

// right-endpoint cumulative: sum of dt_k * column_k
template <class Get>
std::vector<double> cum_right(const std::vector<StepRecord>& s, Get get) {
  std::vector<double> out(s.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    acc += s[k].dt * get(s[k]);
    out[k] = acc;
  }
  return out;
}

struct WorstMargin {
  double margin = std::numeric_limits<double>::infinity();
  double at_t = 0.0;
  void feed(double m, double t) {
    if (m < margin) {
      margin = m;
      at_t = t;
    }
  }
};

BoundEntry make_entry(std::string id, std::string text, const WorstMargin& w) {
  BoundEntry e;
  e.lemma = std::move(id);
  e.inequality = std::move(text);
  e.margin = w.margin;
  e.pass = w.margin >= 0.0;
  e.at_t = w.at_t;
  return e;
}

// value of a piecewise-linear series column at time t (records + t=0 seed)
template <class Get>
double interp_column(const StepRecord& initial, const std::vector<StepRecord>& s, Get get,
                     double t) {
  double tprev = 0.0, yprev = get(initial);
  for (const StepRecord& r : s) {
    if (t <= r.t) {
      const double w = (r.t == tprev) ? 1.0 : (t - tprev) / (r.t - tprev);
      return yprev + w * (get(r) - yprev);
    }
    tprev = r.t;
    yprev = get(r);
  }
  return yprev;
}

}  // namespace

bool BoundReport::all_pass() const {
  for (const BoundEntry& e : entries)
    if (!e.pass) return false;
  return true;
}

const BoundEntry* BoundReport::find(const std::string& lemma) const {
  for (const BoundEntry& e : entries)
    if (e.lemma == lemma) return &e;
  return nullptr;
}

double mass_ode_bound(double y0, double kappa, double mu, double area, double t) {
  if (!(y0 >= 0.0) || !(mu >= 0.0) || !(area > 0.0))
    throw std::invalid_argument("mass_ode_bound: need y0 >= 0, mu >= 0, area > 0");
  if (y0 == 0.0) return 0.0;
  if (mu == 0.0) return y0 * std::exp(kappa * t);
  const double q = mu / area;
  if (kappa == 0.0) return y0 / (1.0 + q * y0 * t);
  const double e = std::exp(kappa * t);
  return kappa * y0 * e / (kappa + q * y0 * (e - 1.0));
}

StepRecord evaluate_functionals(const Field& u, const Field& v, const FinalWeight* phi) {
  StepRecord r;
  r.mass = integrate(u);
  r.l2u_sq = integral_product(u, u);
  r.l3u = lp_norm(u, 3.0);
  r.linf_u = max_abs(u);
  r.l2v_sq = integral_product(v, v);
  const GradNorms gn = grad_norms(v);
  r.gradv_l2_sq = gn.l2_sq;
  r.gradv_l4_4 = gn.l4_4;
  Field lv = laplacian(v);
  r.lap_v_l2_sq = integral_product(lv, lv);
  if (phi) {
    const int nx = u.grid.nx, ny = u.grid.ny;
    std::vector<double> p0(ny, 0.0), p1(ny, 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) {
      double s0 = 0.0, s1 = 0.0;
      for (int i = 0; i < nx; ++i) {
        const double uc = u.at(i, j);
        s0 += phi->phi(uc);
        s1 += phi->phi_prime(uc) * uc * uc;
      }
      p0[j] = s0;
      p1[j] = s1;
    }
    double s0 = 0.0, s1 = 0.0;
    for (int j = 0; j < ny; ++j) {
      s0 += p0[j];
      s1 += p1[j];
    }
    r.phi_u = u.grid.cell_area() * s0;
    r.phiprime_u_usq = u.grid.cell_area() * s1;
  }
  return r;
}

double reaction_weight_ceiling(const FinalWeight& phi, double kappa, double mu) {
  if (kappa <= 0.0) return 0.0;  // the reaction factor peaks at x = 0
  if (mu == 0.0) return std::numeric_limits<double>::infinity();
  const double xhi = 2.0 * kappa / mu;
  double best = 0.0;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double x = xhi * i / n;
    best = std::max(best, phi.phi_prime(x) * (kappa * x - 0.5 * mu * x * x));
  }
  return best;
}

BoundReport check_bounds(const std::vector<StepRecord>& series, const ModelParams& p,
                         const FamilyNorms& fam, const FinalWeight* phi) {
  BoundReport rep;
  const double tol = p.tol;
  const auto mass_col = [](const StepRecord& r) { return r.mass; };
  const auto u2_col = [](const StepRecord& r) { return r.l2u_sq; };
  const auto v2_col = [](const StepRecord& r) { return r.l2v_sq; };
  const auto lap_col = [](const StepRecord& r) { return r.lap_v_l2_sq; };
  const auto vt_col = [](const StepRecord& r) { return r.vt_l2_sq; };
  const auto g4_col = [](const StepRecord& r) { return r.gradv_l4_4; };

  {  // comparison with the logistic envelope started from twice the rough mass
    WorstMargin w;
    const double y0 = 2.0 * fam.u0_l1;
    auto feed = [&](double t, double mass) {
      const double b = mass_ode_bound(y0, p.kappa, p.mu, fam.area, t);
      w.feed((1.02 * b - mass) / std::max(b, kFloor), t);
    };
    feed(0.0, fam.initial.mass);
    for (const StepRecord& r : series) feed(r.t, r.mass);
    rep.entries.push_back(
        make_entry("mass_ode", "mass(t) <= 1.02 * logistic(2*||u0||_1, kappa, mu/|O|; t)", w));
  }

  if (!series.empty()) {
    // time-integrated square norm controlled by growth, initial mass and final mass
    const auto cum_u2 = cum_trapz(fam.initial, series, u2_col);
    const auto cum_mass = cum_trapz(fam.initial, series, mass_col);
    WorstMargin w;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const double lhs = p.mu * cum_u2[k];
      const double rhs = p.kappa * cum_mass[k] + fam.u0e_l1 - series[k].mass;
      const double scale = std::max({std::fabs(lhs), fam.u0e_l1, kFloor});
      w.feed((rhs - lhs) / scale + tol, series[k].t);
    }
    rep.entries.push_back(make_entry(
        "u_l2_budget",
        "mu*int_0^t ||u||_2^2 <= kappa*int_0^t mass + ||u0e||_1 - mass(t) + tol", w));
  }

  if (!series.empty()) {
    // per-step signal energy balance, forward difference in time
    WorstMargin w;
    const StepRecord* prev = &fam.initial;
    for (const StepRecord& r : series) {
      const double lhs = (r.l2v_sq - prev->l2v_sq) / r.dt + r.l2v_sq;
      const double rhs = r.l2u_sq;
      const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1.0});
      const double slack = tol * (std::fabs(lhs) + std::fabs(rhs)) + r.dt;
      w.feed((rhs + slack - lhs) / scale, r.t);
      prev = &r;
    }
    rep.entries.push_back(make_entry(
        "v_energy", "d/dt ||v||_2^2 + ||v||_2^2 <= ||u||_2^2 + slack(dt)", w));
  }

  if (!series.empty()) {
    // per-step gradient energy balance against the second-derivative norm
    WorstMargin w;
    const StepRecord* prev = &fam.initial;
    for (const StepRecord& r : series) {
      const double lhs = (r.gradv_l2_sq - prev->gradv_l2_sq) / r.dt + r.lap_v_l2_sq;
      const double rhs = r.l2u_sq;
      const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1.0});
      const double slack = tol * (std::fabs(lhs) + std::fabs(rhs)) + r.dt;
      w.feed((rhs + slack - lhs) / scale, r.t);
      prev = &r;
    }
    rep.entries.push_back(make_entry(
        "v_gradient", "d/dt ||grad v||_2^2 + ||lap v||_2^2 <= ||u||_2^2 + slack(dt)", w));
  }

  if (!series.empty()) {
    // time-derivative budget from the equation: v_t = lap v - v + source, source <= u
    const auto a = cum_right(series, vt_col);
    const auto b_lap = cum_right(series, lap_col);
    const auto b_v2 = cum_right(series, v2_col);
    const auto b_u2 = cum_right(series, u2_col);
    WorstMargin w;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const double lhs = a[k];
      const double rhs = 3.0 * (b_lap[k] + b_v2[k] + b_u2[k]);
      const double scale = std::max({lhs, rhs, 1.0});
      w.feed((rhs * (1.0 + tol) + tol - lhs) / scale, series[k].t);
    }
    rep.entries.push_back(make_entry(
        "vt_budget", "int_0^t ||v_t||_2^2 <= 3 (int ||lap v||_2^2 + ||v||_2^2 + ||u||_2^2)", w));
  }

  {  // growth shape of the fourth-power gradient integral on [0.1, min(T,2)]
    const double t_hi = std::min(p.T, 2.0);
    std::vector<double> xs, ys;
    const auto cum_g4 = cum_trapz(fam.initial, series, g4_col);
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (series[k].t >= 0.1 && series[k].t <= t_hi && cum_g4[k] > 0.0) {
        xs.push_back(std::log1p(series[k].t));
        ys.push_back(std::log(cum_g4[k]));
      }
    }
    if (xs.size() >= 8) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
      }
      const double n = static_cast<double>(xs.size());
      const double slope = (n * sxy - sx * sy) / std::max(n * sxx - sx * sx, kFloor);
      WorstMargin w;
      w.feed((3.2 - slope) / 3.2, t_hi);
      rep.entries.push_back(make_entry(
          "gradv4_shape", "log-log slope of int_0^t ||grad v||_4^4 vs (1+t) <= 3.2", w));
    }
  }

  if (phi && !series.empty()) {
    const double ceil = reaction_weight_ceiling(*phi, p.kappa, p.mu);
    if (std::isfinite(ceil)) {
      // weighted-mass budget assembled from the series
      const auto cum_u2 = cum_trapz(fam.initial, series, u2_col);
      const auto cum_g4 = cum_trapz(fam.initial, series, g4_col);
      const double chi4 = std::pow(p.chi, 4);
      const double t_hi = std::min(p.T, 1.0);
      WorstMargin w;
      for (std::size_t k = 0; k < series.size(); ++k) {
        if (series[k].t > t_hi + 1e-12) break;
        const double bound = fam.initial.phi_u + cum_u2[k] + chi4 * cum_g4[k] +
                             ceil * fam.area * series[k].t;
        w.feed((1.05 * bound - series[k].phi_u) / std::max(bound, kFloor), series[k].t);
      }
      if (std::isfinite(w.margin))
        rep.entries.push_back(make_entry(
            "weight_budget",
            "int Phi(u(t)) <= 1.05*(int Phi(u0) + int int u^2 + chi^4 int int |grad v|^4 + c*t*|O|), t <= 1",
            w));
    }
  }

  if (!series.empty()) {
    // clipping must stay a round-off diagnostic, not a mass sink
    WorstMargin w;
    const double cap = 1e-6 * std::max(fam.initial.mass, kFloor);
    w.feed((cap - series.back().clipped_mass) / cap, series.back().t);
    rep.entries.push_back(
        make_entry("clip_budget", "cumulative clipped mass <= 1e-6 * mass(0)", w));
  }

  return rep;
}

double gn_ratio(const Field& f) {
  const GradNorms gn = grad_norms(f);
  if (gn.l2_sq <= kFloor) return 0.0;
  Field lf = laplacian(f);
  const double lap2 = integral_product(lf, lf);
  return gn.l4_4 / (lap2 * gn.l2_sq + gn.l2_sq * gn.l2_sq);
}

double v_seminorm(const StepRecord& initial, const std::vector<StepRecord>& series, double t1,
                  double t2) {
  if (!(t2 > t1) || t1 < 0.0) throw std::invalid_argument("v_seminorm: need 0 <= t1 < t2");
  const double t_end = series.empty() ? 0.0 : series.back().t;
  if (t2 > t_end + 1e-12) throw std::invalid_argument("v_seminorm: window beyond series range");
  const auto v2 = [](const StepRecord& r) { return r.l2v_sq; };
  const auto g2 = [](const StepRecord& r) { return r.gradv_l2_sq; };

  double sup_sq = std::max(interp_column(initial, series, v2, t1),
                           interp_column(initial, series, v2, t2));
  for (const StepRecord& r : series)
    if (r.t >= t1 && r.t <= t2) sup_sq = std::max(sup_sq, r.l2v_sq);
  if (t1 == 0.0) sup_sq = std::max(sup_sq, initial.l2v_sq);

  // integral of the piecewise-linear gradient column clipped to [t1, t2]
  double acc = 0.0, tprev = 0.0, yprev = initial.gradv_l2_sq;
  for (const StepRecord& r : series) {
    const double a = std::max(tprev, t1), b = std::min(r.t, t2);
    if (b > a) {
      const double ya = interp_column(initial, series, g2, a);
      const double yb = interp_column(initial, series, g2, b);
      acc += 0.5 * (ya + yb) * (b - a);
    }
    tprev = r.t;
    yprev = r.gradv_l2_sq;
  }
  (void)yprev;
  return std::sqrt(sup_sq) + std::sqrt(acc);
}

std::vector<double> partition_by_gradient_budget(const StepRecord& initial,
                                                 const std::vector<StepRecord>& series,
                                                 double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("partition: budget must be > 0");
  std::vector<double> cuts{0.0};
  const auto g4 = [](const StepRecord& r) { return r.gradv_l4_4; };
  const auto cum = cum_trapz(initial, series, g4);
  double next = budget;
  for (std::size_t k = 0; k < series.size(); ++k) {
    while (cum[k] >= next) {
      cuts.push_back(series[k].t);
      next += budget;
    }
  }
  const double t_end = series.empty() ? 0.0 : series.back().t;
  if (cuts.back() != t_end) cuts.push_back(t_end);
  return cuts;
}

TestBasis make_dual_basis(const GridSpec& g) {
  static const int modes[12][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2},
                                   {2, 1}, {1, 2}, {2, 2}, {3, 0}, {0, 3}, {3, 3}};
  TestBasis basis;
  for (const auto& m : modes) {
    Field f(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.cx(i), y = g.cy(j);
        const double bump = std::sin(M_PI * x / g.lx) * std::sin(M_PI * y / g.ly);
        f.at(i, j) = std::cos(m[0] * M_PI * x / g.lx) * std::cos(m[1] * M_PI * y / g.ly) *
                     bump * bump * bump;
      }
    Field lf = laplacian(f);
    auto [gx, gy] = grad_centered(f);
    // discrete surrogate of a third-order Sobolev normalization
    double n3 = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double gm = std::sqrt(gx.a[k] * gx.a[k] + gy.a[k] * gy.a[k]);
      n3 += std::pow(std::fabs(f.a[k]), 3) + gm * gm * gm + std::pow(std::fabs(lf.a[k]), 3);
    }
    n3 *= g.cell_area();
    const double s = 1.0 / std::cbrt(std::max(n3, kFloor));
    for (std::size_t k = 0; k < f.size(); ++k) {
      f.a[k] *= s;
      lf.a[k] *= s;
      gx.a[k] *= s;
      gy.a[k] *= s;
    }
    basis.fn.push_back(std::move(f));
    basis.lap.push_back(std::move(lf));
    basis.gx.push_back(std::move(gx));
    basis.gy.push_back(std::move(gy));
  }
  return basis;
}

double dual_norm_proxy(const Field& u, const Field& v, const ModelParams& p,
                       const TestBasis& basis) {
  if (basis.fn.empty()) throw std::invalid_argument("dual_norm_proxy: empty test basis");
  auto [vx, vy] = grad_centered(v);
  double best = 0.0;
  for (std::size_t b = 0; b < basis.fn.size(); ++b) {
    const Field& psi = basis.fn[b];
    const int nx = u.grid.nx, ny = u.grid.ny;
    std::vector<double> part(ny, 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) {
      double s = 0.0;
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * nx + i;
        const double uc = u.a[k];
        s += uc * basis.lap[b].a[k] -
             p.chi * uc * (vx.a[k] * basis.gx[b].a[k] + vy.a[k] * basis.gy[b].a[k]) +
             p.kappa * uc * psi.a[k] - p.mu * uc * uc * psi.a[k];
      }
      part[j] = s;
    }
    double s = 0.0;
    for (int j = 0; j < ny; ++j) s += part[j];
    best = std::max(best, std::fabs(s * u.grid.cell_area()));
  }
  return best;
}

std::vector<double> convex_envelope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (ys.size() != n || n < 2) throw std::invalid_argument("convex_envelope: bad input sizes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("convex_envelope: xs must increase");

  // monotone chain, lower hull in the (x, y) plane
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }

  std::vector<double> out(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 1 < hull.size() && xs[hull[seg + 1]] < xs[i]) ++seg;
    const std::size_t a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
    if (a == b || xs[b] == xs[a]) {
      out[i] = ys[a];
    } else {
      const double w = (xs[i] - xs[a]) / (xs[b] - xs[a]);
      out[i] = ys[a] + w * (ys[b] - ys[a]);
    }
  }
  return out;
}

std::vector<double> equiintegrability_profile(const std::vector<const Field*>& fields,
                                              const std::vector<double>& M_list) {
  if (fields.empty()) throw std::invalid_argument("equiintegrability_profile: no fields");
  std::vector<double> out;
  out.reserve(M_list.size());
  for (double M : M_list) {
    double sup = 0.0;
    for (const Field* f : fields) sup = std::max(sup, tail_mass(*f, M));
    out.push_back(sup);
  }
  return out;
}

}  // namespace kslab
