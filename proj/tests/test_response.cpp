#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "fixtures.hpp"
#include "kerrcmm/response.hpp"
#include "kerrcmm/steady_state.hpp"
#include "kerrcmm/units.hpp"

using namespace kerrcmm;
using doctest::Approx;
using units::hz_to_rad;
using units::rad_to_hz;

namespace {

OperatingPoint red_op() {
  const auto p = fixtures::red_params();
  const auto d = fixtures::red_drive();
  const auto roots = solve_branches(p, d);
  REQUIRE(roots.size() == 1);
  return make_operating_point(p, d, roots.back());
}

OperatingPoint blue_op() {
  const auto p = fixtures::blue_params();
  const auto d = fixtures::blue_drive();
  const auto roots = solve_branches(p, d);
  REQUIRE(roots.size() == 1);
  return make_operating_point(p, d, roots.back());
}

// Linear grid in Hz on the probe axis, converted to rad/s point by point
// (the same recipe the frozen values below were produced with).
std::vector<double> lin_grid(double lo_hz, double hi_hz, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] =
        hz_to_rad(lo_hz + (hi_hz - lo_hz) * i / static_cast<double>(n - 1));
  }
  return g;
}

struct FeatureStats {
  double peak_offset_hz = 0.0;  // argmax of |S - S_bg|^2 relative to omega_b_tilde
  double fwhm_hz = 0.0;         // full width at half maximum of |S - S_bg|^2
};

// Width of the narrow magnomechanical feature after subtracting the smooth
// polariton background, from linear interpolation of the half-maximum
// crossings on a 0.5 Hz grid around the dressed mechanical frequency.
FeatureStats feature_stats(const OperatingPoint& op) {
  const double wb_hz = rad_to_hz(op.omega_b_tilde);
  const auto grid = lin_grid(wb_hz - 5000.0, wb_hz + 5000.0, 20001);
  const auto s1 = reflection_spectrum(op, grid);
  const auto s0 = reflection_background(op, grid);
  std::vector<double> v(grid.size());
  std::size_t vi = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v[i] = std::norm(s1[i] - s0[i]);
    if (v[i] > v[vi]) vi = i;
  }
  const double half = v[vi] / 2.0;
  double left = grid.front(), right = grid.back();
  for (std::size_t i = vi; i > 0; --i) {
    if (v[i - 1] < half) {
      const double t = (half - v[i - 1]) / (v[i] - v[i - 1]);
      left = grid[i - 1] + t * (grid[i] - grid[i - 1]);
      break;
    }
  }
  for (std::size_t i = vi; i + 1 < grid.size(); ++i) {
    if (v[i + 1] < half) {
      const double t = (half - v[i + 1]) / (v[i] - v[i + 1]);
      right = grid[i + 1] - t * (grid[i + 1] - grid[i]);
      break;
    }
  }
  return {rad_to_hz(grid[vi]) - wb_hz, rad_to_hz(right - left)};
}

}  // namespace

TEST_CASE("operating point carries the dressed detunings and effective coupling") {
  const auto p = fixtures::red_params();
  const auto d = fixtures::red_drive();
  const auto roots = solve_branches(p, d);
  REQUIRE(roots.size() == 1);
  const auto op = make_operating_point(p, d, roots.back());
  const double x = roots.back().occupation;

  CHECK(op.delta_a == p.omega_a - d.omega_d);
  CHECK(op.delta_m == p.omega_m_bare - d.omega_d);
  CHECK(op.delta_m_tilde == Approx(op.delta_m + 2.0 * p.k_m * x).epsilon(1e-14));
  CHECK(op.omega_b_tilde == Approx(p.omega_b + p.k_cross * x).epsilon(1e-14));
  CHECK(std::abs(op.g_eff) == Approx(p.g_mb * std::sqrt(x)).epsilon(1e-12));

  // Frozen dressed frequencies at the shipped red operating point.
  CHECK(rad_to_hz(op.omega_b_tilde) == Approx(11025279.269787).epsilon(1e-10));
  CHECK(rad_to_hz(op.delta_m_tilde) == Approx(-1499999.809853).epsilon(1e-9));
}

TEST_CASE("bare susceptibilities peak on resonance with height 2/kappa") {
  OperatingPoint op{};
  op.params = reference_defaults();
  op.delta_a = hz_to_rad(8.0e6);
  op.delta_m_tilde = hz_to_rad(-1.5e6);
  op.omega_b_tilde = op.params.omega_b;

  const auto on_resonance = [](std::complex<double> chi, double kappa) {
    CHECK(chi.real() == Approx(2.0 / kappa).epsilon(1e-13));
    CHECK(std::abs(chi.imag()) < 1e-13 * std::abs(chi.real()));
  };
  on_resonance(chi_a(op, op.delta_a), op.params.kappa_a);
  on_resonance(chi_m(op, op.delta_m_tilde), op.params.kappa_m);
  on_resonance(chi_b(op, op.omega_b_tilde), op.params.kappa_b);

  // Half width at half maximum sits at kappa/2 on either side of the peak.
  const double peak = 2.0 / op.params.kappa_a;
  CHECK(std::abs(chi_a(op, op.delta_a + op.params.kappa_a / 2.0)) ==
        Approx(peak / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(std::abs(chi_a(op, op.delta_a - op.params.kappa_a / 2.0)) ==
        Approx(peak / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("cavity dressing splits the magnon response by twice the coupling") {
  SUBCASE("without the cavity coupling the dressed response is the bare one") {
    OperatingPoint op{};
    op.params = reference_defaults();
    op.params.g_ma = 0.0;
    op.delta_a = hz_to_rad(8.0e6);
    op.delta_m_tilde = hz_to_rad(-1.5e6);
    for (double w_hz : {-5.0e6, -1.5e6, 0.0, 2.0e6, 9.0e6}) {
      const double w = hz_to_rad(w_hz);
      CHECK(std::abs(chi_ma(op, w) - chi_m(op, w)) < 1e-14 * std::abs(chi_m(op, w)));
    }
  }

  SUBCASE("matched detunings produce two polariton peaks around the midpoint") {
    auto p = fixtures::red_params();
    p.omega_m_bare = p.omega_a;  // degenerate modes: maximal hybridization
    const auto d = fixtures::red_drive(-50.0);
    const auto roots = solve_branches(p, d);
    REQUIRE(!roots.empty());
    const auto op = make_operating_point(p, d, roots.front());

    const double da_hz = rad_to_hz(op.delta_a);
    const auto grid = lin_grid(da_hz - 12.0e6, da_hz + 12.0e6, 4801);
    double m_lo = 0.0, m_hi = 0.0, w_lo = 0.0, w_hi = 0.0;
    for (double w : grid) {
      const double a = std::norm(chi_ma(op, w));
      if (w < op.delta_a && a > m_lo) {
        m_lo = a;
        w_lo = w;
      }
      if (w > op.delta_a && a > m_hi) {
        m_hi = a;
        w_hi = w;
      }
    }
    // Peak separation tracks 2 g_ma; the finite linewidths push the maxima
    // apart by about a percent at these parameters.
    CHECK(rad_to_hz(w_hi - w_lo) == Approx(2.0 * rad_to_hz(p.g_ma)).epsilon(0.02));
    // The midpoint is strongly suppressed relative to both peaks.
    const double mid = std::norm(chi_ma(op, op.delta_a));
    CHECK(mid < 0.1 * m_lo);
    CHECK(mid < 0.1 * m_hi);
  }
}

TEST_CASE("effective mechanical susceptibility reduces to the bare one without coupling") {
  auto op = red_op();
  op.g_eff = 0.0;
  for (double off_hz : {-2000.0, -500.0, 0.0, 300.0, 1500.0}) {
    const double w = op.omega_b_tilde + hz_to_rad(off_hz);
    CHECK(std::abs(chi_b_eff(op, w) - chi_b(op, w)) < 1e-14 * std::abs(chi_b(op, w)));
  }

  // With the coupling detached the pole is exactly the bare dressed one.
  const auto pole = phonon_pole(op);
  CHECK(pole.real() == Approx(op.omega_b_tilde).epsilon(1e-12));
  CHECK(pole.imag() == Approx(-op.params.kappa_b / 2.0).epsilon(1e-9));
}

TEST_CASE("frozen response values at the red operating point") {
  const auto op = red_op();
  const auto r = evaluate_response(op, EvalMode::one_shot);

  // Red-detuned drive: negative spring shift, positive damping change.
  CHECK(r.spring_shift < 0.0);
  CHECK(r.linewidth_change > 0.0);

  CHECK(rad_to_hz(r.spring_shift) == Approx(-541.549153).epsilon(1e-6));
  CHECK(rad_to_hz(r.cross_kerr_shift) == Approx(-5520.730213).epsilon(1e-6));
  CHECK(rad_to_hz(r.total_shift) == Approx(-6062.279366).epsilon(1e-6));
  CHECK(rad_to_hz(r.linewidth_change) == Approx(268.964891).epsilon(1e-6));

  // one_shot evaluates exactly at the dressed mechanical frequency, and the
  // total is the plain sum of its two parts.
  CHECK(r.evaluated_at == op.omega_b_tilde);
  CHECK(r.total_shift == r.spring_shift + r.cross_kerr_shift);

  // The convenience wrappers report the same one_shot numbers.
  CHECK(spring_shift(op) == r.spring_shift);
  CHECK(cross_kerr_shift(op) == r.cross_kerr_shift);
  CHECK(linewidth_change(op) == r.linewidth_change);
}

TEST_CASE("self-consistent evaluation converges onto the shifted frequency") {
  const auto op = red_op();
  const auto r1 = evaluate_response(op, EvalMode::one_shot);
  const auto r2 = evaluate_response(op, EvalMode::self_consistent);

  CHECK(rad_to_hz(r2.spring_shift) == Approx(-541.624127).epsilon(1e-6));
  CHECK(rad_to_hz(r2.linewidth_change) == Approx(268.818041).epsilon(1e-6));

  // Fixed point: the evaluation frequency is the dressed frequency plus the
  // spring shift computed there.
  CHECK(rad_to_hz(r2.evaluated_at - op.omega_b_tilde) ==
        Approx(rad_to_hz(r2.spring_shift)).epsilon(1e-6));

  // The two modes agree to 1%: the shift is tiny against the polariton widths.
  CHECK(std::abs(r2.spring_shift - r1.spring_shift) < 0.01 * std::abs(r1.spring_shift));
  CHECK(std::abs(r2.linewidth_change - r1.linewidth_change) <
        0.01 * std::abs(r1.linewidth_change));
}

TEST_CASE("frozen response values at the blue operating point") {
  const auto op = blue_op();
  const auto r = evaluate_response(op, EvalMode::one_shot);

  // Blue-detuned drive: positive spring shift, negative damping change.
  CHECK(r.spring_shift > 0.0);
  CHECK(r.linewidth_change < 0.0);

  CHECK(rad_to_hz(r.spring_shift) == Approx(363.107216).epsilon(1e-6));
  CHECK(rad_to_hz(r.cross_kerr_shift) == Approx(-6614.999971).epsilon(1e-6));
  CHECK(rad_to_hz(r.linewidth_change) == Approx(-58.286325).epsilon(1e-6));

  // Coarse anchors: at this point the spring shift sits a few percent from
  // +370 Hz and the cross-Kerr pull dominates the total at about -6.5 kHz.
  CHECK(rad_to_hz(r.spring_shift) == Approx(370.0).epsilon(0.03));
  CHECK(rad_to_hz(r.total_shift) == Approx(-6500.0).epsilon(0.05));
}

TEST_CASE("phonon pole matches the perturbative shift and width to 1e-3") {
  for (const auto& op : {red_op(), blue_op()}) {
    const auto r = evaluate_response(op, EvalMode::one_shot);
    const std::complex<double> expect(
        op.omega_b_tilde + r.spring_shift,
        -0.5 * (op.params.kappa_b + r.linewidth_change));
    const auto pole = phonon_pole(op);
    CHECK(std::abs(pole - expect) / std::abs(expect) < 1e-3);
  }

  // Frozen location at the red point.
  const auto pole = phonon_pole(red_op());
  CHECK(rad_to_hz(pole.real()) == Approx(11025010.414688).epsilon(1e-9));
  CHECK(rad_to_hz(pole.imag()) == Approx(266.514129).epsilon(1e-6));
}

TEST_CASE("red probe reflection stays passive and carries the narrow feature") {
  const auto op = red_op();
  const auto r = evaluate_response(op, EvalMode::one_shot);
  const double kb_eff_hz = rad_to_hz(op.params.kappa_b + r.linewidth_change);

  SUBCASE("broad window: |S| <= 1 with the frozen maximum at the edge") {
    const auto grid = lin_grid(-25.0e6, 25.0e6, 2001);
    const auto s = reflection_spectrum(op, grid);
    double mx = 0.0;
    for (const auto& v : s) mx = std::max(mx, std::abs(v));
    CHECK(mx <= 1.0 + 1e-9);
    CHECK(mx == Approx(0.998917605).epsilon(1e-6));
  }

  SUBCASE("a closed probe port reflects everything") {
    auto closed = op;
    closed.params.kappa_2 = 0.0;
    const auto grid = lin_grid(-25.0e6, 25.0e6, 401);
    double worst = 0.0;
    for (const auto& v : reflection_spectrum(closed, grid)) {
      worst = std::max(worst, std::abs(v - 1.0));
    }
    CHECK(worst < 1e-15);
  }

  SUBCASE("detaching the coupling reproduces the background exactly") {
    auto bare = op;
    bare.g_eff = 0.0;
    const auto grid = lin_grid(-25.0e6, 25.0e6, 401);
    const auto s = reflection_spectrum(bare, grid);
    const auto b = reflection_background(bare, grid);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != b[i]) ++mismatches;
    }
    CHECK(mismatches == 0);
  }

  SUBCASE("the |S| peak sits within the effective linewidth of the dressed frequency") {
    const double wb_hz = rad_to_hz(op.omega_b_tilde);
    const auto grid = lin_grid(wb_hz - 3000.0, wb_hz + 3000.0, 6001);  // 1 Hz steps
    const auto s = reflection_spectrum(op, grid);
    std::size_t zi = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::abs(s[i]) > std::abs(s[zi])) zi = i;
    }
    const double off_hz = rad_to_hz(grid[zi]) - wb_hz;
    CHECK(std::abs(off_hz - 448.0) <= 2.0);
    CHECK(std::abs(off_hz) < kb_eff_hz);
    CHECK(std::abs(s[zi]) == Approx(0.774670675).epsilon(1e-6));
  }

  SUBCASE("feature width tracks the broadened mechanical linewidth") {
    const auto fs = feature_stats(op);
    CHECK(std::abs(fs.peak_offset_hz + 51.5) <= 1.0);
    const double ratio = fs.fwhm_hz / kb_eff_hz;
    CHECK(ratio == Approx(1.104726).epsilon(1e-4));
    CHECK(ratio > 0.8);
    CHECK(ratio < 1.2);
  }

  SUBCASE("the polariton background is smooth across the zoom window") {
    const double wb_hz = rad_to_hz(op.omega_b_tilde);
    const auto grid = lin_grid(wb_hz - 5000.0, wb_hz + 5000.0, 2001);
    const auto b = reflection_background(op, grid);
    double lo = 2.0, hi = 0.0;
    for (const auto& v : b) {
      lo = std::min(lo, std::abs(v));
      hi = std::max(hi, std::abs(v));
    }
    CHECK(hi - lo < 0.01);
  }
}

TEST_CASE("blue probe reflection stays passive with a narrowed feature") {
  const auto op = blue_op();
  const auto r = evaluate_response(op, EvalMode::one_shot);
  const double kb_eff_hz = rad_to_hz(op.params.kappa_b + r.linewidth_change);

  const auto grid = lin_grid(-25.0e6, 25.0e6, 2001);
  const auto s = reflection_spectrum(op, grid);
  double mx = 0.0;
  for (const auto& v : s) mx = std::max(mx, std::abs(v));
  CHECK(mx <= 1.0 + 1e-9);
  CHECK(mx == Approx(0.998992698).epsilon(1e-6));

  // Anti-damping narrows the feature below the bare mechanical linewidth.
  CHECK(kb_eff_hz < rad_to_hz(op.params.kappa_b));
  const auto fs = feature_stats(op);
  CHECK(std::abs(fs.peak_offset_hz - 79.0) <= 2.0);
  const double ratio = fs.fwhm_hz / kb_eff_hz;
  CHECK(ratio == Approx(1.137085).epsilon(1e-4));
  CHECK(ratio > 0.8);
  CHECK(ratio < 1.2);
}
