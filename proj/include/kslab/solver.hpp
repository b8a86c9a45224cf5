#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kslab/dct.hpp"
#include "kslab/grid.hpp"
#include "kslab/weight_phi.hpp"

// IMEX time integration: drift and reaction explicit, diffusion/decay
// implicit (spectral), with the saturated signal source u/(1+eps u).
// One step, from (u, v):
//   u* = u + dt (-div(chi u grad v) + kappa u - mu u^2)
//   u+ = (1 - dt Lap)^-1 u*,            then clip tiny negatives
//   v+ = (1 + dt - dt Lap)^-1 (v + dt u+/(1+eps u+)), then clip
// Clipped mass is accumulated, never silently dropped.

namespace kslab {

struct ModelParams {
  double chi = 0.0;
  double kappa = 0.0;
  double mu = 0.0;  // >= 0 (0 turns the quadratic damping off, e.g. pure heat runs)
  double eps = 0.0;  // >= 0 (0 integrates the unregularized limit system)
  double T = 0.0;
  double dt_max = 5e-3;
  double cfl = 0.4;
  double tol = 0.05;  // slack used by the inequality checks
  bool saturated_source = true;  // false: v-equation source is u itself
};

void validate_params(const ModelParams& p);  // throws std::invalid_argument

struct SimState {
  Field u, v;
  double t = 0.0;
  long step_index = 0;
  double clipped_mass_cum = 0.0;
};

// one row of the per-step series (the CSV columns, in order)
struct StepRecord {
  long step = 0;
  double t = 0.0, dt = 0.0;
  double mass = 0.0, l2u_sq = 0.0, l3u = 0.0, linf_u = 0.0;
  double l2v_sq = 0.0, gradv_l2_sq = 0.0, gradv_l4_4 = 0.0, lap_v_l2_sq = 0.0, vt_l2_sq = 0.0;
  double phi_u = 0.0, phiprime_u_usq = 0.0;
  double clipped_mass = 0.0;
};

// explicit-part stability bound:
// min(dt_max, cfl*min(dx,dy)/(|chi| max|grad v|), cfl/(|kappa| + 2 mu max|u| + 1))
double stable_dt(const SimState& s, const ModelParams& p);

// advances state by dt; throws NumericalAbort on non-finite values
void advance(SimState& s, const ModelParams& p, double dt, SpectralSolver& solver);

struct RunResult {
  StepRecord initial;  // functionals of (u0, v0) at t = 0
  std::vector<StepRecord> series;  // one record per accepted step (empty if T = 0)
  std::vector<std::pair<double, std::pair<Field, Field>>> snapshots;  // (t, (u, v)), t=0 first
  SimState state;  // final
  bool completed = true;       // false when the march stopped on non-finite values
  long aborted_at_step = -1;   // step index of the failure, -1 when completed
  std::string abort_reason;
};

// integrates to T, landing exactly on every requested event time (events are
// snapshot instants; T itself is always an event). phi may be null (weight
// columns are then zero). Deterministic: same inputs give identical results.
RunResult run_simulation(const Field& u0, const Field& v0, const ModelParams& p,
                         SpectralSolver& solver, std::vector<double> event_times,
                         const FinalWeight* phi);

}  // namespace kslab
