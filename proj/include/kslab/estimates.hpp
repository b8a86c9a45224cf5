#pragma once

#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/solver.hpp"
#include "kslab/weight_phi.hpp"

// Functional evaluation and inequality checks over a completed run.
// Every check reports a signed normalized margin (>= 0 means pass) together
// with the time at which the margin is worst.

namespace kslab {

struct BoundEntry {
  std::string lemma;       // short check id
  std::string inequality;  // human-readable statement
  double margin = 0.0;     // worst signed margin, normalized; pass iff >= 0
  bool pass = false;
  double at_t = 0.0;  // location of the worst margin
};

struct BoundReport {
  std::vector<BoundEntry> entries;
  bool all_pass() const;
  const BoundEntry* find(const std::string& lemma) const;
};

// closed-form solution of y' = kappa y - (mu/area) y^2, y(0) = y0
double mass_ode_bound(double y0, double kappa, double mu, double area, double t);

// all series columns computable from a single state (vt/dt/step left zero)
StepRecord evaluate_functionals(const Field& u, const Field& v, const FinalWeight* phi);

// reference quantities of the initial data needed by the checks
struct FamilyNorms {
  double area = 0.0;
  double u0_l1 = 0.0;      // analytic mass of the rough datum
  double u0e_l1 = 0.0;     // grid mass of the regularized datum actually evolved
  double v0_w12 = 0.0;     // analytic W12 norm of v0
  StepRecord initial;      // functionals of the evolved initial state (t = 0)
};

// largest value of phi'(x) * (kappa x - mu x^2 / 2) over x >= 0; infinite when
// mu = 0 and kappa > 0 (the weight budget check is skipped in that case)
double reaction_weight_ceiling(const FinalWeight& phi, double kappa, double mu);

BoundReport check_bounds(const std::vector<StepRecord>& series, const ModelParams& p,
                         const FamilyNorms& fam, const FinalWeight* phi);

// ratio ||grad f||_4^4 / (||lap f||_2^2 ||grad f||_2^2 + ||grad f||_2^4); 0 for constants
double gn_ratio(const Field& f);

// sup_{t in [t1,t2]} ||v(t)||_2 + sqrt(int_{t1}^{t2} ||grad v||_2^2 dt)
double v_seminorm(const StepRecord& initial, const std::vector<StepRecord>& series, double t1,
                  double t2);

// cut points where the cumulative fourth-power gradient integral crosses
// successive multiples of `budget`; first entry 0, last entry = final time
std::vector<double> partition_by_gradient_budget(const StepRecord& initial,
                                                 const std::vector<StepRecord>& series,
                                                 double budget);

// fixed family of smooth boundary-vanishing test functions, normalized in a
// discrete third-order surrogate norm; carries precomputed derivatives
struct TestBasis {
  std::vector<Field> fn, lap, gx, gy;
};
TestBasis make_dual_basis(const GridSpec& g);

// sup over the basis of |int(u lap(psi) - chi u grad v . grad psi + kappa u psi - mu u^2 psi)|
double dual_norm_proxy(const Field& u, const Field& v, const ModelParams& p,
                       const TestBasis& basis);

// lower convex envelope of samples (xs increasing), evaluated back at xs
std::vector<double> convex_envelope(const std::vector<double>& xs, const std::vector<double>& ys);

// sup over fields of mass above level M, per M
std::vector<double> equiintegrability_profile(const std::vector<const Field*>& fields,
                                              const std::vector<double>& M_list);

}  // namespace kslab
