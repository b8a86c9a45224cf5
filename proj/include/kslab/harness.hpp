#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kslab/config.hpp"
#include "kslab/convergence.hpp"
#include "kslab/estimates.hpp"
#include "kslab/rough_data.hpp"
#include "kslab/weight_phi.hpp"

// Orchestration and persistence. A run directory contains
//   manifest.json      config echo, derived quantities, file hashes, status
//   series.csv         one row per accepted step (columns in solver.hpp order)
//   snap_u_XXX.csv     density snapshots (XXX counts event times, 000 = t0)
//   snap_v_XXX.csv     signal snapshots
//   bound_report.json  inequality check results
//   phi.json           the constructed weight (when one was built)
// Sweeps add sweep_report.json at the top level with per-member directories
// below it. All pass/fail results are carried in exit codes:
//   0 ok, 2 bad config, 3 numerical abort, 4 failed check/verification.

namespace kslab {

// --- small utilities -------------------------------------------------------

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string hash_hex(std::uint64_t h);
std::string read_text_file(const std::string& path);  // throws std::runtime_error
void write_text_file(const std::string& path, const std::string& text);

// --- serialization ---------------------------------------------------------

std::string series_to_csv(const std::vector<StepRecord>& series);
std::vector<StepRecord> series_from_csv(const std::string& text);

std::string bound_report_to_json(const BoundReport& rep);
BoundReport bound_report_from_json(const std::string& text);

struct PhiArtifact {
  PhiSpec spec;
  FinalWeight weight;
  std::vector<double> eps_ladder;  // family members probed for the tail profile
  double march_step = 0.0;
  double x_max = 0.0;
  double lipschitz_phi_c = 0.0;
};

std::string phi_to_json(const PhiArtifact& art);
PhiArtifact phi_from_json(const std::string& text);  // rebuilds the weight exactly

// --- building blocks shared by the commands --------------------------------

// regularized member at this eps; eps == 0 returns the raw grid samples
FamilyResult build_member(const RunConfig& cfg, double eps, SpectralSolver& solver);

// weight from the measured tail profile of the configured eps ladder
PhiArtifact build_weight_artifact(const RunConfig& cfg, SpectralSolver& solver);

FamilyNorms compute_norms(const RunConfig& cfg, const FamilyResult& fam, const FinalWeight* phi);

struct RunProducts {
  FamilyResult family;
  FamilyNorms norms;
  RunResult result;
  BoundReport report;
};

// family -> simulation -> bound checks (no files touched)
RunProducts execute_run(const RunConfig& cfg, const PhiArtifact* phi, SpectralSolver& solver);

// writes every artifact of a completed (or aborted) run into cfg.out_dir
void persist_run(const RunConfig& cfg, const RunProducts& prod, const PhiArtifact* phi);

// worker count for sweeps: --jobs flag > KS_LAB_JOBS > config > hardware
int sweep_worker_count(const RunConfig& cfg, int jobs_override, std::size_t n_members);

// --- CLI entry points ------------------------------------------------------

int cmd_run(const std::string& config_path);
int cmd_sweep(const std::string& config_path, std::vector<double> eps_list,
              std::vector<int> nx_list, int jobs_override);
int cmd_phi(const std::string& config_path);
int cmd_verify(const std::string& run_dir);
int cmd_report(const std::vector<std::string>& dirs);

}  // namespace kslab
