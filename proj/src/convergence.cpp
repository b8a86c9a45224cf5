#include "kslab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kslab/kernels.hpp"

namespace kslab {

namespace {

constexpr double kFloor = 1e-300;

double pairing(const Field& f, const Field& psi) { return integral_product(f, psi); }

}  // namespace

std::vector<TraceBasisFn> make_trace_basis(const GridSpec& g) {
  static const int modes[8][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 0},
                                  {0, 2}, {2, 1}, {1, 2}, {2, 2}};
  std::vector<TraceBasisFn> basis;
  {
    TraceBasisFn one;
    one.name = "const";
    one.psi = Field(g);
    std::fill(one.psi.a.begin(), one.psi.a.end(), 1.0);
    one.sup_abs = 1.0;
    basis.push_back(std::move(one));
  }
  for (const auto& m : modes) {
    TraceBasisFn fn;
    fn.name = "cos_q" + std::to_string(m[0]) + std::to_string(m[1]);
    fn.psi = Field(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        fn.psi.at(i, j) = std::cos(m[0] * M_PI * g.cx(i) / (4.0 * g.lx)) *
                          std::cos(m[1] * M_PI * g.cy(j) / (4.0 * g.ly));
    fn.sup_abs = 1.0;
    basis.push_back(std::move(fn));
  }
  return basis;
}

bool TraceTable::all_ok() const {
  for (const TraceRow& r : rows)
    if (!r.monotone || !r.final_ok) return false;
  return !rows.empty();
}

TraceTable weak_initial_trace(const Field& u0e, const std::vector<const Field*>& u_at,
                              const std::vector<double>& times) {
  if (u_at.size() != times.size() || times.empty())
    throw std::invalid_argument("weak_initial_trace: times/snapshots mismatch");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0)) throw std::invalid_argument("weak_initial_trace: times must be > 0");
    if (k > 0 && !(times[k] < times[k - 1]))
      throw std::invalid_argument("weak_initial_trace: times must strictly decrease");
  }

  const double mass0 = integrate(u0e);
  TraceTable table;
  table.times = times;
  for (const TraceBasisFn& fn : make_trace_basis(u0e.grid)) {
    TraceRow row;
    row.name = fn.name;
    const double base = pairing(u0e, fn.psi);
    row.ref = std::max(std::fabs(base), mass0 * fn.sup_abs * 1e-2);
    row.err.reserve(times.size());
    for (const Field* u : u_at) {
      if (!(u->grid == u0e.grid))
        throw std::invalid_argument("weak_initial_trace: grid mismatch");
      row.err.push_back(std::fabs(pairing(*u, fn.psi) - base));
    }
    row.monotone = true;
    for (std::size_t k = 1; k < row.err.size(); ++k)
      if (row.err[k] > row.err[k - 1] * 1.05 + 1e-12 * row.ref) row.monotone = false;
    row.final_ok = row.err.back() < 0.01 * row.ref;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<VTraceRow> v_initial_trace(const Field& v0e, const std::vector<const Field*>& v_at,
                                       const std::vector<double>& times,
                                       const std::vector<StepRecord>& series) {
  if (v_at.size() != times.size()) throw std::invalid_argument("v_initial_trace: size mismatch");
  std::vector<VTraceRow> rows;
  rows.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    double cum = 0.0;
    for (const StepRecord& r : series) {
      if (r.t > t + 1e-12) break;
      cum += r.dt * r.vt_l2_sq;
    }
    VTraceRow row;
    row.t = t;
    row.lhs = field_distance(*v_at[k], v0e).l2;
    row.rhs = std::sqrt(std::max(t * cum, 0.0));
    row.ratio = row.rhs > kFloor ? row.lhs / row.rhs : 0.0;
    row.ok = row.lhs <= 1.02 * row.rhs + 1e-14;
    rows.push_back(row);
  }
  return rows;
}

FieldDistance field_distance(const Field& a, const Field& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("field_distance: grid mismatch");
  const int nx = a.grid.nx, ny = a.grid.ny;
  std::vector<double> p2(ny, 0.0), pinf(ny, 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    double s = 0.0, m = 0.0;
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      const double d = a.a[k] - b.a[k];
      s += d * d;
      m = std::max(m, std::fabs(d));
    }
    p2[j] = s;
    pinf[j] = m;
  }
  FieldDistance out;
  double s = 0.0;
  for (int j = 0; j < ny; ++j) {
    s += p2[j];
    out.linf = std::max(out.linf, pinf[j]);
  }
  out.l2 = std::sqrt(s * a.grid.cell_area());
  return out;
}

EpsCompareReport compare_eps_members(const std::vector<double>& eps,
                                     const std::vector<const Field*>& members,
                                     const Field& limit) {
  if (eps.size() != members.size() || eps.size() < 2)
    throw std::invalid_argument("compare_eps_members: need at least two members");
  for (std::size_t k = 1; k < eps.size(); ++k)
    if (!(eps[k] < eps[k - 1]))
      throw std::invalid_argument("compare_eps_members: eps must strictly decrease");

  EpsCompareReport rep;
  rep.eps = eps;
  for (std::size_t k = 0; k + 1 < members.size(); ++k) {
    const FieldDistance d = field_distance(*members[k], *members[k + 1]);
    rep.gaps.push_back({eps[k], eps[k + 1], d.l2, d.linf});
  }
  for (const Field* m : members) rep.dist_l2.push_back(field_distance(*m, limit).l2);

  rep.gaps_decreasing = true;
  for (std::size_t k = 1; k < rep.gaps.size(); ++k)
    if (!(rep.gaps[k].d_l2 < rep.gaps[k - 1].d_l2)) rep.gaps_decreasing = false;
  rep.dist_decreasing = true;
  for (std::size_t k = 1; k < rep.dist_l2.size(); ++k)
    if (!(rep.dist_l2[k] < rep.dist_l2[k - 1])) rep.dist_decreasing = false;
  return rep;
}

SmoothingReport assess_smoothing(std::vector<SmoothingRow> rows, double probe_time) {
  std::sort(rows.begin(), rows.end(),
            [](const SmoothingRow& a, const SmoothingRow& b) { return a.nx < b.nx; });
  SmoothingReport rep;
  rep.rows = std::move(rows);
  rep.probe_time = probe_time;
  if (rep.rows.size() < 2) return rep;
  rep.raw_grows = true;
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    if (!(rep.rows[k].linf_u0_raw >= 1.8 * rep.rows[k - 1].linf_u0_raw)) rep.raw_grows = false;
  const double a = rep.rows[rep.rows.size() - 2].linf_u_probe;
  const double b = rep.rows.back().linf_u_probe;
  rep.probe_stable = a > 0.0 && std::fabs(b - a) / a < 0.10;
  return rep;
}

}  // namespace kslab
