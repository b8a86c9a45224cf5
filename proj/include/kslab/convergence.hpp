#pragma once

#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/solver.hpp"

namespace kslab {

// --- weak trace of the initial datum -------------------------------------
// Smooth test functions with vanishing normal derivative on the boundary of
// the rectangle: the constant plus slow cosine products (quarter-period in
// each direction so the basis resolves non-symmetric mass placement).

struct TraceBasisFn {
  std::string name;
  Field psi;
  double sup_abs = 1.0;
};

std::vector<TraceBasisFn> make_trace_basis(const GridSpec& g);

struct TraceRow {
  std::string name;
  double ref = 0.0;             // comparison scale for this test function
  std::vector<double> err;      // |<u(t_k) - u0e, psi>| along the time ladder
  bool monotone = false;        // error shrinks as t decreases
  bool final_ok = false;        // smallest-time error below 1% of ref
};

struct TraceTable {
  std::vector<double> times;    // strictly decreasing ladder
  std::vector<TraceRow> rows;
  bool all_ok() const;
};

// `u_at[k]` is the evolved density at `times[k]`; `times` must be strictly
// decreasing and positive.
TraceTable weak_initial_trace(const Field& u0e, const std::vector<const Field*>& u_at,
                              const std::vector<double>& times);

// --- strong trace of the signal ------------------------------------------
// ||v(t) - v0e||_2 against the time-derivative budget accumulated in the
// series (right-endpoint rule, matching the implicit update).

struct VTraceRow {
  double t = 0.0;
  double lhs = 0.0;    // ||v(t) - v0e||_2
  double rhs = 0.0;    // sqrt(t * int_0^t ||v_t||_2^2)
  double ratio = 0.0;  // lhs / rhs  (0 when rhs == 0)
  bool ok = false;     // lhs <= 1.02 * rhs
};

std::vector<VTraceRow> v_initial_trace(const Field& v0e, const std::vector<const Field*>& v_at,
                                       const std::vector<double>& times,
                                       const std::vector<StepRecord>& series);

// --- comparison across the regularization family --------------------------

struct EpsCompareRow {
  double eps_hi = 0.0;
  double eps_lo = 0.0;
  double d_l2 = 0.0;
  double d_linf = 0.0;
};

struct EpsCompareReport {
  std::vector<double> eps;          // strictly decreasing regularization levels
  std::vector<EpsCompareRow> gaps;  // successive member differences at t*
  std::vector<double> dist_l2;      // member distance to the eps = 0 run
  bool gaps_decreasing = false;
  bool dist_decreasing = false;
};

EpsCompareReport compare_eps_members(const std::vector<double>& eps,
                                     const std::vector<const Field*>& members,
                                     const Field& limit);

// L2 / Linf distance between two fields on the same grid.
struct FieldDistance {
  double l2 = 0.0;
  double linf = 0.0;
};
FieldDistance field_distance(const Field& a, const Field& b);

// --- mesh refinement of the rough datum ------------------------------------

struct SmoothingRow {
  int nx = 0;
  double linf_u0_raw = 0.0;    // sup norm of the unclamped sampled datum
  double linf_u_probe = 0.0;   // sup norm of the evolved density at probe_time
};

struct SmoothingReport {
  std::vector<SmoothingRow> rows;  // ordered by increasing nx
  double probe_time = 0.0;
  bool raw_grows = false;      // the sampled datum blows up under refinement
  bool probe_stable = false;   // the evolved field does not
};

SmoothingReport assess_smoothing(std::vector<SmoothingRow> rows, double probe_time);

}  // namespace kslab
