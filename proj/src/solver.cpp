#include "kslab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kslab/errors.hpp"
#include "kslab/estimates.hpp"
#include "kslab/kernels.hpp"

namespace kslab {

void validate_params(const ModelParams& p) {
  if (!(p.mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  if (!(p.eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (!(p.T >= 0.0)) throw std::invalid_argument("T must be >= 0");
  if (!(p.dt_max > 0.0)) throw std::invalid_argument("dt_max must be > 0");
  if (!(p.cfl > 0.0 && p.cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
  if (!(p.tol >= 0.0)) throw std::invalid_argument("tol must be >= 0");
}

double stable_dt(const SimState& s, const ModelParams& p) {
  const GridSpec& g = s.u.grid;
  double dt = p.dt_max;
  const double drift = std::fabs(p.chi) * grad_max(s.v);
  if (drift > 0.0) dt = std::min(dt, p.cfl * std::min(g.dx(), g.dy()) / drift);
  dt = std::min(dt, p.cfl / (std::fabs(p.kappa) + 2.0 * p.mu * max_abs(s.u) + 1.0));
  return dt;
}

void advance(SimState& s, const ModelParams& p, double dt, SpectralSolver& solver) {
  const int nx = s.u.grid.nx, ny = s.u.grid.ny;

  Field drift = chemo_flux_divergence(s.u, s.v, p.chi);
  Field ustar(s.u.grid);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double uc = s.u.at(i, j);
      ustar.at(i, j) = uc + dt * (-drift.at(i, j) + p.kappa * uc - p.mu * uc * uc);
    }

  Field up = solver.diffusion_solve(ustar, dt, 0.0);
  double clipped = 0.0;
  clip_negative(up, clipped);

  Field vsrc(s.v.grid);
  const bool saturate = p.saturated_source && p.eps > 0.0;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double uc = up.at(i, j);
      const double src = saturate ? uc / (1.0 + p.eps * uc) : uc;
      vsrc.at(i, j) = s.v.at(i, j) + dt * src;
    }
  Field vp = solver.diffusion_solve(vsrc, dt, 1.0);
  clip_negative(vp, clipped);

  s.step_index += 1;
  if (!all_finite(up) || !all_finite(vp))
    throw NumericalAbort(s.step_index, "non-finite field value");
  s.u = std::move(up);
  s.v = std::move(vp);
  s.t += dt;
  s.clipped_mass_cum += clipped;
}

RunResult run_simulation(const Field& u0, const Field& v0, const ModelParams& p,
                         SpectralSolver& solver, std::vector<double> event_times,
                         const FinalWeight* phi) {
  validate_params(p);
  if (!(u0.grid == v0.grid)) throw std::invalid_argument("run: u0 and v0 grids differ");
  if (!all_finite(u0) || !all_finite(v0)) throw NumericalAbort(0, "non-finite initial data");

  event_times.push_back(p.T);
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  std::erase_if(event_times, [&](double e) { return e <= 0.0 || e > p.T; });

  RunResult out;
  out.state = SimState{u0, v0, 0.0, 0, 0.0};
  out.initial = evaluate_functionals(u0, v0, phi);
  out.snapshots.emplace_back(0.0, std::make_pair(u0, v0));
  if (p.T == 0.0) return out;

  Field vprev = v0;
  std::size_t next_event = 0;
  while (out.state.t < p.T - 1e-14 * std::max(1.0, p.T)) {
    double dt = stable_dt(out.state, p);
    while (next_event < event_times.size() &&
           event_times[next_event] <= out.state.t + 1e-14 * std::max(1.0, out.state.t))
      ++next_event;
    const double target = event_times[next_event];
    // land exactly on event times instead of leaving a micro-step behind
    const bool landed = out.state.t + dt >= target - 1e-12 * std::max(1.0, target);
    if (landed) dt = target - out.state.t;

    try {
      advance(out.state, p, dt, solver);
    } catch (const NumericalAbort& abort) {
      out.completed = false;
      out.aborted_at_step = abort.step_index();
      out.abort_reason = abort.what();
      return out;
    }
    if (landed) out.state.t = target;

    StepRecord rec = evaluate_functionals(out.state.u, out.state.v, phi);
    rec.step = out.state.step_index;
    rec.t = out.state.t;
    rec.dt = dt;
    {
      // time-derivative norm of the signal over this step
      const int nx = out.state.v.grid.nx, ny = out.state.v.grid.ny;
      Field w(out.state.v.grid);
#pragma omp parallel for schedule(static)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          w.at(i, j) = (out.state.v.at(i, j) - vprev.at(i, j)) / dt;
      rec.vt_l2_sq = integral_product(w, w);
    }
    rec.clipped_mass = out.state.clipped_mass_cum;
    out.series.push_back(rec);
    vprev = out.state.v;

    if (landed) out.snapshots.emplace_back(target, std::make_pair(out.state.u, out.state.v));
  }
  return out;
}

}  // namespace kslab
