#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kslab/dct.hpp"
#include "kslab/grid.hpp"
#include "kslab/kernels.hpp"
#include "kslab/rough_data.hpp"
#include "oracles.hpp"

using namespace kslab;

namespace {

// amplitude that normalizes the centered alpha=1 spike on the unit square to mass 1
constexpr double kUnitSpikeAmp = 0.28364816427662776;

RoughDatumSpec unit_spike() {
  RoughDatumSpec s;
  s.kind = DatumKind::spike;
  s.centers = {{0.5, 0.5}};
  s.alpha = 1.0;
  s.amplitude = kUnitSpikeAmp;
  s.v_kind = VKind::cosine_mix;
  s.v_amplitude = 0.5;
  return s;
}

double inv_r_box_integral(double cx, double cy, double lx, double ly) {
  // integral of |x-c|^{-1} over the box as four corner rectangles
  return oracle::corner_rectangle_inv_r(cx, cy) + oracle::corner_rectangle_inv_r(lx - cx, cy) +
         oracle::corner_rectangle_inv_r(cx, ly - cy) +
         oracle::corner_rectangle_inv_r(lx - cx, ly - cy);
}

}  // namespace

TEST_CASE("spike L1 norm matches the corner-rectangle closed form") {
  RoughDatumSpec s = unit_spike();
  CHECK(u0_l1_analytic(s, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(u0_l1_analytic(s, 1.0, 1.0) ==
        doctest::Approx(s.amplitude * inv_r_box_integral(0.5, 0.5, 1.0, 1.0)).epsilon(1e-8));

  s.centers = {{0.3, 0.65}};
  CHECK(u0_l1_analytic(s, 1.0, 1.0) ==
        doctest::Approx(s.amplitude * inv_r_box_integral(0.3, 0.65, 1.0, 1.0)).epsilon(1e-8));

  RoughDatumSpec m = s;
  m.kind = DatumKind::multi_spike;
  m.centers = {{0.3, 0.65}, {0.7, 0.2}};
  const double want = s.amplitude * (inv_r_box_integral(0.3, 0.65, 1.0, 1.0) +
                                     inv_r_box_integral(0.7, 0.2, 1.0, 1.0));
  CHECK(u0_l1_analytic(m, 1.0, 1.0) == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("bounded-kind masses match the independent quadrature oracle") {
  RoughDatumSpec s = unit_spike();
  s.kind = DatumKind::smooth;
  s.amplitude = 0.8;
  const double lx = 1.3, ly = 0.7;
  s.centers = {{0.5, 0.35}};
  auto f = [&](double x, double y) { return u0_value(s, lx, ly, x, y); };
  CHECK(u0_l1_analytic(s, lx, ly) ==
        doctest::Approx(oracle::quad2d(f, 0, lx, 0, ly, 1e-10)).epsilon(1e-8));
  CHECK(u0_l1_analytic(s, lx, ly) == doctest::Approx(0.5 * 0.8 * lx * ly).epsilon(1e-9));

  s.kind = DatumKind::plateau_noise;
  s.amplitude = 1.6;
  // quadrature of the smooth oscillation over exactly the plateau box, plus
  // the closed form: both cosine factors integrate to zero over the box
  auto pat = [&](double x, double y) {
    return s.amplitude *
           (1.0 + 0.5 * std::cos(23.0 * M_PI * x / lx) * std::cos(29.0 * M_PI * y / ly));
  };
  const double box =
      oracle::quad2d(pat, 0.25 * lx, 0.75 * lx, 0.25 * ly, 0.75 * ly, 1e-8);
  CHECK(u0_l1_analytic(s, lx, ly) == doctest::Approx(box).epsilon(1e-6));
  CHECK(u0_l1_analytic(s, lx, ly) == doctest::Approx(0.25 * s.amplitude * lx * ly).epsilon(1e-7));
}

TEST_CASE("signal data norms match their closed forms") {
  RoughDatumSpec s = unit_spike();
  s.v_amplitude = 0.5;

  s.v_kind = VKind::cosine_mix;
  W12Norms w = v0_w12_analytic(s, 1.0, 1.0);
  CHECK(w.l2_sq == doctest::Approx(35.0 / 32.0 * 0.25).epsilon(1e-9));
  CHECK(w.grad_l2_sq == doctest::Approx(M_PI * M_PI / 4.0 * 0.25).epsilon(1e-9));

  s.v_kind = VKind::kink;
  w = v0_w12_analytic(s, 1.0, 1.0);
  CHECK(w.l2_sq == doctest::Approx(7.0 / 3.0 * 0.25).epsilon(1e-9));
  CHECK(w.grad_l2_sq == doctest::Approx(4.0 * 0.25).epsilon(1e-9));

  s.v_kind = VKind::constant;
  w = v0_w12_analytic(s, 2.0, 1.5);
  CHECK(w.l2_sq == doctest::Approx(0.25 * 3.0).epsilon(1e-12));
  CHECK(w.grad_l2_sq == 0.0);

  // quadrature cross-check on a non-square domain
  s.v_kind = VKind::cosine_mix;
  const double lx = 1.4, ly = 0.6;
  auto vv = [&](double x, double y) {
    const double v = v0_value(s, lx, ly, x, y);
    return v * v;
  };
  auto gg = [&](double x, double y) {
    double gx = 0.0, gy = 0.0;
    v0_grad_value(s, lx, ly, x, y, &gx, &gy);
    return gx * gx + gy * gy;
  };
  w = v0_w12_analytic(s, lx, ly);
  CHECK(w.l2_sq == doctest::Approx(oracle::quad2d(vv, 0, lx, 0, ly, 1e-10)).epsilon(1e-7));
  CHECK(w.grad_l2_sq == doctest::Approx(oracle::quad2d(gg, 0, lx, 0, ly, 1e-10)).epsilon(1e-7));
}

TEST_CASE("spike super-level tails decay like 1/M") {
  // {u0 >= M} is the disc of radius R = amplitude/M, well inside the domain
  // for every threshold used here, so the tail has the exact polar value
  // int_{r <= R} (amplitude/r) dA = 2 pi amplitude R = 2 pi amplitude^2 / M
  const RoughDatumSpec s = unit_spike();
  std::vector<double> logM, logT;
  double tail16 = 0.0;
  for (int p = 4; p <= 12; ++p) {
    const double M = std::pow(2.0, p);
    const double tail = 2.0 * M_PI * s.amplitude * s.amplitude / M;
    if (p == 4) tail16 = tail;
    logM.push_back(std::log(M));
    logT.push_back(std::log(tail));
  }
  // least-squares slope of log(tail) against log(M)
  const int n = static_cast<int>(logM.size());
  double mx = 0, my = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) { mx += logM[i]; my += logT[i]; }
  mx /= n; my /= n;
  for (int i = 0; i < n; ++i) { sxx += (logM[i] - mx) * (logM[i] - mx); sxy += (logM[i] - mx) * (logT[i] - my); }
  const double slope = sxy / sxx;
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));

  // grid-level tail at a resolvable threshold agrees with the oracle
  const GridSpec g = make_grid(512, 512);
  const Field u = sample_u0(s, g);
  CHECK(tail_mass(u, 16.0) == doctest::Approx(tail16).epsilon(0.02));
}

TEST_CASE("sampled spike mass converges to the analytic mass") {
  const RoughDatumSpec s = unit_spike();
  const double exact = u0_l1_analytic(s, 1.0, 1.0);
  double prev = 1e300;
  for (int n : {64, 128, 256}) {
    const GridSpec g = make_grid(n, n);
    const double err = std::fabs(integrate(sample_u0(s, g)) - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3 * exact);
}

TEST_CASE("sampled spike has unbounded square integral under refinement") {
  const RoughDatumSpec s = unit_spike();
  std::vector<double> l2sq;
  for (int n : {32, 64, 128, 256}) {
    const GridSpec g = make_grid(n, n);
    const Field u = sample_u0(s, g);
    l2sq.push_back(integral_product(u, u));
  }
  // logarithmic divergence: increments stay bounded away from zero
  const double inc0 = l2sq[1] - l2sq[0];
  for (std::size_t k = 1; k + 1 < l2sq.size(); ++k) {
    const double inc = l2sq[k + 1] - l2sq[k];
    CHECK(inc > 0.5 * inc0);
  }
  // theory: each doubling adds about 2 pi amplitude^2 ln 2
  const double theory = 2.0 * M_PI * s.amplitude * s.amplitude * std::log(2.0);
  CHECK(inc0 == doctest::Approx(theory).epsilon(0.35));
}

TEST_CASE("centered spike samples inherit the square's symmetries") {
  const GridSpec g = make_grid(64, 64);
  const Field u = sample_u0(unit_spike(), g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      CHECK(u.at(i, j) == u.at(g.nx - 1 - i, j));
      CHECK(u.at(i, j) == u.at(i, g.ny - 1 - j));
    }
}

TEST_CASE("spec validation rejects inconsistent data") {
  RoughDatumSpec s = unit_spike();
  CHECK_NOTHROW(validate_spec(s, 1.0, 1.0));
  s.alpha = 2.0;
  CHECK_THROWS_AS(validate_spec(s, 1.0, 1.0), std::invalid_argument);
  s.alpha = 0.0;
  CHECK_THROWS_AS(validate_spec(s, 1.0, 1.0), std::invalid_argument);
  s = unit_spike();
  s.centers = {{1.5, 0.5}};
  CHECK_THROWS_AS(validate_spec(s, 1.0, 1.0), std::invalid_argument);
  s = unit_spike();
  s.centers = {{0.2, 0.2}, {0.8, 0.8}};
  CHECK_THROWS_AS(validate_spec(s, 1.0, 1.0), std::invalid_argument);  // spike wants one center
  s.kind = DatumKind::multi_spike;
  CHECK_NOTHROW(validate_spec(s, 1.0, 1.0));
  s.centers.clear();
  CHECK_THROWS_AS(validate_spec(s, 1.0, 1.0), std::invalid_argument);
  s = unit_spike();
  s.amplitude = -1.0;
  CHECK_THROWS_AS(validate_spec(s, 1.0, 1.0), std::invalid_argument);
  s = unit_spike();
  s.v_amplitude = -0.5;
  CHECK_THROWS_AS(validate_spec(s, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("boundedness classification") {
  RoughDatumSpec s = unit_spike();
  CHECK_FALSE(datum_is_bounded(s));
  s.kind = DatumKind::multi_spike;
  CHECK_FALSE(datum_is_bounded(s));
  s.kind = DatumKind::plateau_noise;
  CHECK(datum_is_bounded(s));
  s.kind = DatumKind::smooth;
  CHECK(datum_is_bounded(s));
}

TEST_CASE("regularized family keeps every guaranteed invariant along the ladder") {
  const RoughDatumSpec s = unit_spike();
  const GridSpec g = make_grid(128, 128);
  SpectralSolver solver(g);
  const Field raw = sample_u0(s, g);
  const double mass_exact = u0_l1_analytic(s, 1.0, 1.0);
  const W12Norms w_exact = v0_w12_analytic(s, 1.0, 1.0);

  double prev_err = 1e300;
  double final_err = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double eps = std::pow(2.0, -k);
    const FamilyResult fam = build_family(s, g, eps, solver);
    CHECK(fam.eps == eps);
    CHECK(fam.clamp_level == doctest::Approx(1.0 / eps));
    CHECK(fam.delta == doctest::Approx(0.25 * std::sqrt(eps)));
    CHECK(min_value(fam.u0e) >= 0.0);
    CHECK(max_value(fam.u0e) <= fam.clamp_level * (1.0 + 1e-12));
    CHECK(integrate(fam.u0e) <= 2.0 * mass_exact * (1.0 + 1e-12));
    const double w12_sq = integral_product(fam.v0e, fam.v0e) + grad_norms(fam.v0e).l2_sq;
    CHECK(w12_sq <= 4.0 * w_exact.norm_sq() * (1.0 + 1e-10));
    CHECK_FALSE(fam.rescaled_u);
    CHECK_FALSE(fam.rescaled_v);

    Field diff = fam.u0e;
    for (std::size_t q = 0; q < diff.size(); ++q) diff.a[q] -= raw.a[q];
    const double err = lp_norm(diff, 1.0);
    CHECK(err <= prev_err * (1.0 + 1e-9));
    prev_err = err;
    final_err = err;
  }
  CHECK(final_err < 0.05 * mass_exact);
}

TEST_CASE("regularization is a no-op limit for bounded smooth data") {
  RoughDatumSpec s = unit_spike();
  s.kind = DatumKind::smooth;
  s.amplitude = 1.0;
  const GridSpec g = make_grid(64, 64);
  SpectralSolver solver(g);
  const Field raw = sample_u0(s, g);

  // clamp threshold far above the datum: family member is exactly the filtered sample
  const FamilyResult fam = build_family(s, g, 0.25, solver);
  const Field filtered = solver.heat_filter(raw, fam.delta);
  for (std::size_t q = 0; q < raw.size(); ++q)
    CHECK(fam.u0e.a[q] == doctest::Approx(filtered.a[q]).epsilon(1e-13));

  // and the small-eps member converges to the sample in L1
  const FamilyResult tight = build_family(s, g, std::pow(2.0, -10), solver);
  Field diff = tight.u0e;
  for (std::size_t q = 0; q < diff.size(); ++q) diff.a[q] -= raw.a[q];
  CHECK(lp_norm(diff, 1.0) < 1e-3 * integrate(raw));
}

TEST_CASE("family construction is deterministic") {
  const RoughDatumSpec s = unit_spike();
  const GridSpec g = make_grid(64, 64);
  SpectralSolver s1(g), s2(g);
  const FamilyResult a = build_family(s, g, 0.01, s1);
  const FamilyResult b = build_family(s, g, 0.01, s2);
  for (std::size_t q = 0; q < a.u0e.size(); ++q) {
    CHECK(a.u0e.a[q] == b.u0e.a[q]);
    CHECK(a.v0e.a[q] == b.v0e.a[q]);
  }
}
