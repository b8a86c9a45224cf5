#pragma once

#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/rough_data.hpp"
#include "kslab/solver.hpp"

// INI-style run configuration.
//
// Sections and keys (defaults in parentheses; * = required):
//   [grid]   nx*, ny*, lx (1), ly (1)
//   [model]  chi*, kappa*, mu*, eps*, T*, dt_max (5e-3), cfl (0.4), tol (0.05),
//            saturated_source (true)
//   [data]   kind* (spike|multi_spike|plateau_noise|smooth), alpha (1),
//            amplitude (1), centers ("0.5 0.5" / "x y; x y"),
//            v_kind (cosine_mix|constant|kink), v_amplitude (0.5), q0 (2.5),
//            family_k_min (2), family_k_max (8), delta_scale (0.25)
//   [phi]    k_max (12), x_max (0 = auto), march_step (1e-3)
//   [output] dir*, tau (0.1), times (empty list "t1; t2"), ladder_depth (10),
//            jobs (0 = hardware), sweep_probe_time (0.5)
//
// Lines starting with '#' or ';' are comments.  Unknown sections or keys are
// rejected; every rejection names the offending `section.key`.

namespace kslab {

struct RunConfig {
  GridSpec grid;
  ModelParams model;
  RoughDatumSpec data;
  double q0 = 2.5;           // recorded in the manifest, drives no computation
  int family_k_min = 2;      // eps ladder 2^-k used for the weight tail profile
  int family_k_max = 8;
  double delta_scale = 0.25;

  int phi_k_max = 12;
  double phi_x_max = 0.0;    // 0 -> extend to the last knot
  double march_step = 1e-3;

  std::string out_dir;
  double tau = 0.1;               // snapshot interval
  std::vector<double> extra_times;
  int ladder_depth = 10;          // probe times 2^-j, j = 1..depth
  int jobs = 0;                   // sweep worker cap, 0 -> hardware
  double sweep_probe_time = 0.5;  // comparison time t* for eps sweeps
};

RunConfig parse_config_text(const std::string& text);  // throws ConfigError
RunConfig load_config(const std::string& path);        // throws ConfigError

// snapshot event times: multiples of tau plus extra_times, filtered to (0, T]
std::vector<double> snapshot_times(const RunConfig& cfg);

}  // namespace kslab
