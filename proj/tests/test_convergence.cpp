#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kslab/convergence.hpp"
#include "kslab/grid.hpp"
#include "kslab/kernels.hpp"
#include "kslab/ref_kernels.hpp"
#include "kslab/solver.hpp"

using namespace kslab;

namespace {

Field quarter_mode(const GridSpec& g, int kx, int ky, double base, double amp) {
  Field f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f.at(i, j) = base + amp * std::cos(M_PI * kx * (i + 0.5) / (4.0 * g.nx)) *
                              std::cos(M_PI * ky * (j + 0.5) / (4.0 * g.ny));
  return f;
}

}  // namespace

TEST_CASE("trace basis: constant plus eight slow cosine products") {
  const GridSpec g = make_grid(32, 24, 1.5, 0.75);
  const auto basis = make_trace_basis(g);
  REQUIRE(basis.size() == 9);
  CHECK(basis[0].name == "const");
  for (const auto& b : basis) {
    CHECK(b.sup_abs == doctest::Approx(1.0));
    CHECK(max_abs(b.psi) <= 1.0 + 1e-12);
    CHECK(b.psi.grid == g);
  }
  // constant mode really is constant
  CHECK(max_value(basis[0].psi) == min_value(basis[0].psi));
}

TEST_CASE("weak trace against the constant reduces to mass differences") {
  const GridSpec g = make_grid(24, 24);
  Field u0(g, 1.0);
  Field a(g, 1.5), b(g, 1.25), c(g, 1.0 + 1e-9);
  const std::vector<const Field*> fields{&a, &b, &c};
  const std::vector<double> times{0.4, 0.2, 0.1};
  const TraceTable table = weak_initial_trace(u0, fields, times);
  REQUIRE(table.rows.size() == 9);
  const TraceRow& row = table.rows[0];
  REQUIRE(row.err.size() == 3);
  // <u - u0, 1> = mass - mass0
  CHECK(row.err[0] == doctest::Approx(0.5 * g.area()).epsilon(1e-12));
  CHECK(row.err[1] == doctest::Approx(0.25 * g.area()).epsilon(1e-10));
  CHECK(row.err[2] <= 1e-8);
  CHECK(row.monotone);
  CHECK(row.final_ok);
}

TEST_CASE("weak trace errors match a direct pairing computation") {
  const GridSpec g = make_grid(32, 32);
  const Field u0 = quarter_mode(g, 1, 0, 1.0, 0.5);
  Field u1 = quarter_mode(g, 1, 0, 1.0, 0.3);  // mode partially decayed
  Field u2 = quarter_mode(g, 1, 0, 1.0, 0.45);
  const std::vector<const Field*> fields{&u1, &u2};
  const std::vector<double> times{0.2, 0.05};
  const TraceTable table = weak_initial_trace(u0, fields, times);
  const auto basis = make_trace_basis(g);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      Field diff = *fields[k];
      for (std::size_t q = 0; q < diff.size(); ++q) diff.a[q] -= u0.a[q];
      const double want = std::fabs(ref::integral_product(diff, basis[r].psi));
      CHECK(table.rows[r].err[k] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("weak trace validates its inputs") {
  const GridSpec g = make_grid(16, 16);
  Field u0(g, 1.0), u1(g, 1.1);
  const std::vector<const Field*> one{&u1};
  CHECK_THROWS_AS(weak_initial_trace(u0, one, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(weak_initial_trace(u0, one, {}), std::invalid_argument);
  CHECK_THROWS_AS(weak_initial_trace(u0, one, {-0.1}), std::invalid_argument);
  const std::vector<const Field*> two{&u1, &u1};
  CHECK_THROWS_AS(weak_initial_trace(u0, two, {0.2, 0.2}), std::invalid_argument);
  const GridSpec g2 = make_grid(24, 16);
  Field other(g2, 1.0);
  const std::vector<const Field*> bad{&other};
  CHECK_THROWS_AS(weak_initial_trace(u0, bad, {0.1}), std::invalid_argument);
}

TEST_CASE("signal trace compares drift to the accumulated time-derivative budget") {
  const GridSpec g = make_grid(16, 16);
  const Field v0(g, 1.0);
  // v(t) = v0 + a t (uniform): ||v(t)-v0||_2 = a t sqrt(area)
  const double a = 0.2, c = 0.05;  // c: constant ||v_t||^2 column
  Field v1(g, 1.0 + a * 0.1), v2(g, 1.0 + a * 0.4);
  std::vector<StepRecord> series;
  for (int k = 1; k <= 100; ++k) {
    StepRecord r;
    r.step = k;
    r.dt = 0.005;
    r.t = k * 0.005;
    r.vt_l2_sq = c;
    series.push_back(r);
  }
  const std::vector<const Field*> fields{&v1, &v2};
  const std::vector<double> times{0.1, 0.4};
  const auto rows = v_initial_trace(v0, fields, times, series);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    // rhs = sqrt(t * c * t) with the right-endpoint cumulative being exact here
    CHECK(row.rhs == doctest::Approx(row.t * std::sqrt(c)).epsilon(1e-12));
    CHECK(row.lhs == doctest::Approx(a * row.t * std::sqrt(g.area())).epsilon(1e-12));
    CHECK(row.ratio == doctest::Approx(a / std::sqrt(c)).epsilon(1e-10));
    CHECK(row.ok == (row.lhs <= 1.02 * row.rhs + 1e-14));
  }
  // a = 0.2 < sqrt(0.05) ~ 0.2236, so the comparison holds with room to spare
  CHECK(rows[0].ok);
}

TEST_CASE("field distance: exact values and grid checks") {
  const GridSpec g = make_grid(16, 16);
  Field x(g, 1.0), y(g, 1.0);
  y.at(3, 3) = 2.0;
  const FieldDistance d = field_distance(x, y);
  CHECK(d.linf == 1.0);
  CHECK(d.l2 == doctest::Approx(std::sqrt(g.cell_area())).epsilon(1e-13));
  const GridSpec g2 = make_grid(16, 24);
  Field z(g2, 1.0);
  CHECK_THROWS_AS(field_distance(x, z), std::invalid_argument);
}

TEST_CASE("family comparison flags monotone gap and limit-distance decay") {
  const GridSpec g = make_grid(16, 16);
  const Field limit(g, 1.0);
  Field m1(g, 2.0), m2(g, 1.5), m3(g, 1.2);  // dist 1.0, 0.5, 0.2; gaps 0.5, 0.3
  const std::vector<double> eps{0.04, 0.02, 0.01};
  const std::vector<const Field*> members{&m1, &m2, &m3};
  const EpsCompareReport rep = compare_eps_members(eps, members, limit);
  REQUIRE(rep.gaps.size() == 2);
  REQUIRE(rep.dist_l2.size() == 3);
  CHECK(rep.gaps[0].eps_hi == 0.04);
  CHECK(rep.gaps[0].eps_lo == 0.02);
  CHECK(rep.gaps[0].d_l2 == doctest::Approx(0.5 * std::sqrt(g.area())).epsilon(1e-12));
  CHECK(rep.gaps[1].d_l2 == doctest::Approx(0.3 * std::sqrt(g.area())).epsilon(1e-12));
  CHECK(rep.dist_l2[0] == doctest::Approx(1.0 * std::sqrt(g.area())).epsilon(1e-12));
  CHECK(rep.gaps_decreasing);
  CHECK(rep.dist_decreasing);

  // non-monotone variant
  Field w2(g, 1.9);  // gap1 = 0.1 < gap2 = 0.7, dist up then down
  const std::vector<const Field*> bad{&m1, &w2, &m3};
  const EpsCompareReport rep2 = compare_eps_members(eps, bad, limit);
  CHECK_FALSE(rep2.gaps_decreasing);

  // validation
  CHECK_THROWS_AS(compare_eps_members({0.04, 0.04, 0.01}, members, limit), std::invalid_argument);
  CHECK_THROWS_AS(compare_eps_members({0.04, 0.02}, members, limit), std::invalid_argument);
}

TEST_CASE("refinement assessment separates rough data from the evolved field") {
  std::vector<SmoothingRow> rows;
  rows.push_back({128, 2.0, 5.02});
  rows.push_back({64, 1.0, 5.0});   // deliberately unordered on input
  rows.push_back({256, 4.0, 5.05});
  const SmoothingReport rep = assess_smoothing(rows, 0.5);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].nx == 64);  // sorted on output
  CHECK(rep.rows[2].nx == 256);
  CHECK(rep.probe_time == 0.5);
  CHECK(rep.raw_grows);      // doubles each refinement (>= 1.8x)
  CHECK(rep.probe_stable);   // last two probes within 10%

  // growth below the bar
  std::vector<SmoothingRow> flat{{64, 1.0, 5.0}, {128, 1.5, 5.0}, {256, 2.2, 5.0}};
  CHECK_FALSE(assess_smoothing(flat, 0.5).raw_grows);

  // probe drifting by more than 10%
  std::vector<SmoothingRow> drift{{64, 1.0, 5.0}, {128, 2.0, 5.0}, {256, 4.0, 6.0}};
  CHECK_FALSE(assess_smoothing(drift, 0.5).probe_stable);
}
