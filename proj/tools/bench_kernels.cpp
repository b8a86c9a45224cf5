// Timing comparison between the OpenMP kernels and their serial reference
// implementations, plus the fast spectral diffusion solve against the direct
// cosine-expansion oracle. Every timed pair is also checked for agreement, so
// the benchmark doubles as a smoke test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "kslab/dct.hpp"
#include "kslab/kernels.hpp"
#include "kslab/ref_kernels.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

kslab::Field make_test_field(const kslab::GridSpec& g, double phase) {
  kslab::Field f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f.at(i, j) = 1.5 + std::cos(M_PI * g.cx(i) / g.lx + phase) *
                             std::cos(2.0 * M_PI * g.cy(j) / g.ly) +
                   0.25 * std::cos(3.0 * M_PI * g.cx(i) / g.lx);
  return f;
}

double time_ms(int reps, const std::function<void()>& fn) {
  fn();  // warm up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

double max_diff(const kslab::Field& a, const kslab::Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.a[i] - b.a[i]));
  return m;
}

void row(const char* name, double par_ms, double ser_ms, double diff) {
  std::printf("  %-22s %10.3f %10.3f %8.2fx   %.3e\n", name, par_ms, ser_ms,
              ser_ms / std::max(par_ms, 1e-9), diff);
}

}  // namespace

int main() {
  for (int n : {128, 256, 512}) {
    const kslab::GridSpec g = kslab::make_grid(n, n);
    const kslab::Field u = make_test_field(g, 0.0);
    const kslab::Field v = make_test_field(g, 0.7);
    const int reps = n <= 256 ? 40 : 10;

    std::printf("grid %dx%d (%d reps)\n", n, n, reps);
    std::printf("  %-22s %10s %10s %9s   %s\n", "kernel", "par ms", "serial ms", "speedup",
                "max diff");

    {
      double a = 0.0, b = 0.0;
      const double tp = time_ms(reps, [&] { a = kslab::integrate(u); });
      const double ts = time_ms(reps, [&] { b = kslab::ref::integrate(u); });
      row("integrate", tp, ts, std::fabs(a - b));
    }
    {
      kslab::Field a, b;
      const double tp = time_ms(reps, [&] { a = kslab::laplacian(u); });
      const double ts = time_ms(reps, [&] { b = kslab::ref::laplacian(u); });
      row("laplacian", tp, ts, max_diff(a, b));
    }
    {
      kslab::Field a, b;
      const double tp = time_ms(reps, [&] { a = kslab::chemo_flux_divergence(u, v, 5.0); });
      const double ts = time_ms(reps, [&] { b = kslab::ref::chemo_flux_divergence(u, v, 5.0); });
      row("chemo_flux_divergence", tp, ts, max_diff(a, b));
    }
    {
      kslab::GradNorms a, b;
      const double tp = time_ms(reps, [&] { a = kslab::grad_norms(v); });
      const double ts = time_ms(reps, [&] { b = kslab::ref::grad_norms(v); });
      row("grad_norms", tp, ts,
          std::max(std::fabs(a.l2_sq - b.l2_sq), std::fabs(a.l4_4 - b.l4_4)));
    }
    {
      double a = 0.0, b = 0.0;
      const double tp = time_ms(reps, [&] { a = kslab::tail_mass(u, 1.0); });
      const double ts = time_ms(reps, [&] { b = kslab::ref::tail_mass(u, 1.0); });
      row("tail_mass", tp, ts, std::fabs(a - b));
    }
    if (n <= 128) {
      kslab::SpectralSolver solver(g);
      kslab::Field a, b;
      const double tp = time_ms(reps, [&] { a = solver.diffusion_solve(u, 1e-3, 0.0); });
      const double ts = time_ms(3, [&] { b = kslab::ref::diffusion_solve_direct(u, 1e-3, 0.0); });
      row("diffusion (fft/direct)", tp, ts, max_diff(a, b));
    } else {
      kslab::SpectralSolver solver(g);
      kslab::Field a;
      const double tp = time_ms(reps, [&] { a = solver.diffusion_solve(u, 1e-3, 0.0); });
      std::printf("  %-22s %10.3f %10s %9s   %s\n", "diffusion (fft)", tp, "-", "-", "-");
    }
    std::printf("\n");
  }
  return 0;
}
