#include <catch2/catch.hpp>

#include <cmath>
#include <complex>

#include "slp/kerr.hpp"
#include "slp/medium.hpp"
#include "slp/propagator.hpp"
#include "slp/spin_transport.hpp"
#include "slp/state.hpp"

using namespace slp;

namespace {

// synthetic medium: xi = sigma n c / 2 = 1.832e11 at density 8e9 cm^-3
MediumParams synthetic_medium(double density_cm3 = 8e9) {
  MediumParams m;
  m.lambda = 0.8e-6;
  m.gamma = 1e7;
  m.density = density_cm3 * 1e6;
  m.length = 0.8;
  m.n_s = 1.012;
  m.n_c = 1.0;
  return m;
}

Grid test_grid(int nz = 1024, double l_sim = 1.0) {
  const double dz = l_sim / nz;
  return Grid::make(nz, l_sim, dz / speed_of_light);
}

PolaritonState matched_gaussian(const Grid& g, double center, double width) {
  auto st = PolaritonState::zeros(g.nz);
  st.psi_plus = gaussian_envelope(g, center, width);
  st.psi_minus = st.psi_plus;
  for (int i = 0; i < g.nz; ++i)
    st.spin_s[i] = -0.5 * (st.psi_plus[i] + st.psi_minus[i]);
  return st;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("measure moments and matching", "[propagator]") {
  auto g = test_grid();

  SECTION("symmetric gaussian at midpoint") {
    auto st = matched_gaussian(g, 0.5, 0.03);
    auto r = measure(st, g);
    REQUIRE(r.centroid == Approx(0.5).margin(1e-6));
    REQUIRE(r.matching_residual == Approx(0.0).margin(1e-15));
  }
  SECTION("one-sided field has residual 1") {
    auto st = PolaritonState::zeros(g.nz);
    st.psi_plus = gaussian_envelope(g, 0.5, 0.03);
    auto r = measure(st, g);
    REQUIRE(r.matching_residual == Approx(1.0).epsilon(1e-12));
  }
  SECTION("gaussian of amplitude std w has intensity rms w/sqrt(2)") {
    const double w = 0.04;
    auto st = matched_gaussian(g, 0.5, w);
    auto r = measure(st, g);
    REQUIRE(r.rms_width == Approx(w / std::sqrt(2.0)).epsilon(1e-6));
  }
  SECTION("zero field throws") {
    auto st = PolaritonState::zeros(g.nz);
    REQUIRE_THROWS_AS(measure(st, g), SolverError);
  }
}

TEST_CASE("forward slow light advances at c/eta with unchanged shape",
          "[propagator]") {
  auto d = derive(synthetic_medium());
  auto g = test_grid();
  const double om2_total = d.g2n / 500.0; // eta = 500
  TwoFieldStepper stepper(g, d);

  auto st = PolaritonState::zeros(g.nz);
  st.psi_plus = gaussian_envelope(g, 0.3, 0.03);

  ControlDrive drive;
  drive.a = 1e-4;
  drive.schedule = {{0.0, om2_total, 0.0}};

  TwoFieldStepper::RunOptions opt;
  opt.t0 = 0.0;
  opt.t1 = 8.3e-8; // drift of about 0.05 m at c/eta
  opt.report_stride = 1000;
  auto traj = stepper.run(st, drive, opt);

  std::vector<double> ts, cs, ws;
  for (const auto& r : traj) {
    ts.push_back(r.t);
    cs.push_back(r.centroid);
    ws.push_back(r.rms_width);
  }
  const double v_meas = fit_slope(ts, cs);
  const auto co = slow_light(drive.sample(0.0), d);
  REQUIRE(co.v_g == Approx(speed_of_light / co.eta).epsilon(1e-12));
  REQUIRE(v_meas == Approx(co.v_g).epsilon(0.01));
  // no backward drive, no spreading channel: shape preserved
  REQUIRE(ws.back() == Approx(ws.front()).epsilon(0.01));
}

TEST_CASE("pulse matching pulls the fields together", "[propagator]") {
  auto d = derive(synthetic_medium(8e10)); // xi = 1.832e12
  auto g = test_grid();
  const double om2_total = d.g2n / 500.0;
  TwoFieldStepper stepper(g, d);

  auto st = PolaritonState::zeros(g.nz);
  st.psi_plus = gaussian_envelope(g, 0.5, 0.03);

  ControlDrive::Sample balanced{0.5 * om2_total, 0.5 * om2_total};
  REQUIRE(measure(st, g).matching_residual == Approx(1.0).epsilon(1e-12));
  // matching is established within a propagation distance c/xi << pulse width
  for (int k = 0; k < 20; ++k) stepper.step(st, balanced, g.dt);
  REQUIRE(measure(st, g).matching_residual < 0.05);
  for (int k = 0; k < 400; ++k) stepper.step(st, balanced, g.dt);
  REQUIRE(measure(st, g).matching_residual < 0.05);
}

TEST_CASE("steady mismatch scales like 1/xi", "[propagator]") {
  auto g = test_grid();
  const double xi_base = 0.3 / g.dt;
  const double sigma = 3.0 / (4.0 * pi) * 0.8e-6 * 0.8e-6;
  const double density1_cm3 =
      xi_base / (0.5 * sigma * speed_of_light) / 1e6;

  double residual[2];
  for (int pass = 0; pass < 2; ++pass) {
    auto m = synthetic_medium(pass == 0 ? density1_cm3 : 10.0 * density1_cm3);
    auto d = derive(m);
    TwoFieldStepper stepper(g, d);
    auto st = matched_gaussian(g, 0.5, 0.03);
    ControlDrive::Sample balanced{0.5 * d.g2n / 500.0, 0.5 * d.g2n / 500.0};
    for (int k = 0; k < 3000; ++k) stepper.step(st, balanced, g.dt);
    residual[pass] = measure(st, g).matching_residual;
  }
  REQUIRE(residual[0] > 0.0);
  REQUIRE(residual[1] > 0.0);
  REQUIRE(residual[0] / residual[1] >= 3.0);
}

TEST_CASE("uniform stored excitation rotates the field exactly",
          "[propagator]") {
  auto d = derive(synthetic_medium());
  auto g = test_grid(512);
  const auto kerr = make_kerr_params(d, 2e-6, 16.0 * d.gamma);
  TwoFieldStepper stepper(g, d, kerr);

  auto st = matched_gaussian(g, 0.5, 0.05);
  const double n1 = 2.5;
  for (auto& x : st.spin_sprime) x = std::sqrt(n1);

  const double om2_total = d.g2n / 500.0;
  ControlDrive::Sample balanced{0.5 * om2_total, 0.5 * om2_total};
  const auto co = slow_light(balanced, d);

  const int nsteps = 200;
  for (int k = 0; k < nsteps; ++k) stepper.step(st, balanced, g.dt);
  const double T = nsteps * g.dt;

  const int ic = g.nz / 2;
  const double expected = kerr.beta.real() / co.eta * n1 * T;
  const double wrapped = std::remainder(expected, 2.0 * pi);
  REQUIRE(std::arg(st.psi_plus[ic]) == Approx(wrapped).margin(1e-9));
  REQUIRE(std::arg(st.psi_minus[ic]) ==
          Approx(std::arg(st.psi_plus[ic])).margin(1e-12));
  // two-photon loss: |psi| shrank by exp(-Im(beta) n1 T / eta)
  const double decay = std::exp(-kerr.beta.imag() / co.eta * n1 * T);
  REQUIRE(std::abs(st.psi_plus[ic]) ==
          Approx(decay * std::exp(-0.0)).epsilon(0.02));
}

TEST_CASE("zero initial field gives an all-zero trajectory", "[propagator]") {
  auto d = derive(synthetic_medium());
  auto g = test_grid(256);
  TwoFieldStepper stepper(g, d);
  auto st = PolaritonState::zeros(g.nz);
  ControlDrive drive;
  drive.a = 1e-4;
  drive.schedule = {{0.0, 1e15, 1e15}};
  TwoFieldStepper::RunOptions opt;
  opt.t1 = 100 * g.dt;
  opt.report_stride = 10;
  auto traj = stepper.run(st, drive, opt);
  REQUIRE(traj.size() > 2);
  for (const auto& r : traj) {
    REQUIRE(r.norm == 0.0);
    REQUIRE(r.centroid == 0.0);
    REQUIRE(r.rms_width == 0.0);
  }
}

TEST_CASE("balanced drive: width spreads at the dispersion-relation rate",
          "[propagator]") {
  auto d = derive(synthetic_medium());
  auto g = test_grid(1024);
  const double om2_total = d.g2n / 500.0;
  TwoFieldStepper stepper(g, d);
  auto st = matched_gaussian(g, 0.5, 0.02);
  ControlDrive drive;
  drive.a = 1e-4;
  drive.schedule = {{0.0, 0.5 * om2_total, 0.5 * om2_total}};
  const auto co = slow_light(drive.sample(0.0), d);
  const double diffusion = 4.0 * co.alpha_plus * co.alpha_minus *
                           speed_of_light * speed_of_light / (co.eta * d.xi);

  TwoFieldStepper::RunOptions opt;
  opt.t1 = 1.6e-7;
  opt.report_stride = 2000;
  auto traj = stepper.run(st, drive, opt);
  std::vector<double> ts, w2;
  for (const auto& r : traj) {
    ts.push_back(r.t);
    w2.push_back(r.rms_width * r.rms_width);
  }
  // intensity-moment width grows as D t (the amplitude-gaussian variance
  // grows at 2D)
  const double slope = fit_slope(ts, w2);
  REQUIRE(slope == Approx(diffusion).epsilon(0.15));

  // stationarity over the spreading time: drift well below the width
  REQUIRE(std::abs(traj.back().centroid - traj.front().centroid) <
          0.01 * traj.front().rms_width);
}

TEST_CASE("centroid speed follows c(a+ - a-)/eta", "[propagator]") {
  auto d = derive(synthetic_medium());
  auto g = test_grid(1024);
  const double om2_total = d.g2n / 500.0;
  const double imbalance = 0.1;
  TwoFieldStepper stepper(g, d);
  auto st = matched_gaussian(g, 0.4, 0.03);
  ControlDrive drive;
  drive.a = 1e-4;
  drive.schedule = {{0.0, 0.5 * om2_total * (1 + imbalance),
                     0.5 * om2_total * (1 - imbalance)}};
  const auto co = slow_light(drive.sample(0.0), d);

  TwoFieldStepper::RunOptions opt;
  opt.t1 = 2.5e-6;
  opt.report_stride = 5000;
  auto traj = stepper.run(st, drive, opt);
  std::vector<double> ts, cs;
  for (const auto& r : traj) {
    ts.push_back(r.t);
    cs.push_back(r.centroid);
  }
  REQUIRE(fit_slope(ts, cs) == Approx(co.v_g).epsilon(0.02));
}

TEST_CASE("drive stepped from balanced to imbalanced sets the pulse moving",
          "[propagator]") {
  auto d = derive(synthetic_medium());
  auto g = test_grid(1024);
  const double om2_total = d.g2n / 500.0;
  const double imbalance = 0.1;
  TwoFieldStepper stepper(g, d);
  auto st = matched_gaussian(g, 0.4, 0.03);

  // balanced hold, fast ramp, then a steady drag
  const double t_hold = 4e-7, t_ramp = 4e-8, t_end = 2.8e-6;
  ControlDrive drive;
  drive.a = 1e-4;
  drive.schedule = {
      {0.0, 0.5 * om2_total, 0.5 * om2_total},
      {t_hold, 0.5 * om2_total, 0.5 * om2_total},
      {t_hold + t_ramp, 0.5 * om2_total * (1 + imbalance),
       0.5 * om2_total * (1 - imbalance)},
      {t_end, 0.5 * om2_total * (1 + imbalance),
       0.5 * om2_total * (1 - imbalance)}};

  TwoFieldStepper::RunOptions opt;
  opt.t1 = t_end;
  opt.report_stride = 5000;
  auto traj = stepper.run(st, drive, opt);

  std::vector<double> ts, cs;
  double c_hold_end = 0.0;
  for (const auto& r : traj) {
    if (r.t <= t_hold) c_hold_end = r.centroid;
    if (r.t > t_hold + 2 * t_ramp) {
      ts.push_back(r.t);
      cs.push_back(r.centroid);
    }
  }
  // stationary during the balanced hold
  REQUIRE(std::abs(c_hold_end - traj.front().centroid) < 1e-4);
  // drifting at v_g afterwards
  const auto co = slow_light(drive.sample(t_end), d);
  REQUIRE(fit_slope(ts, cs) == Approx(co.v_g).epsilon(0.02));
}

TEST_CASE("halving dt and dz cuts the error by about four", "[propagator]") {
  // slightly unbalanced spreading pulse against a fine-grid reference
  auto med = synthetic_medium(2e9);
  auto d = derive(med);
  const double l_sim = 1.0;
  const double T = 2.0e-7;
  const double om2_total = d.g2n / 200.0;
  ControlDrive::Sample drive{0.51 * om2_total, 0.49 * om2_total};

  auto solve = [&](int nz) {
    Grid g = Grid::make(nz, l_sim, l_sim / nz / speed_of_light);
    TwoFieldStepper stepper(g, d);
    auto st = matched_gaussian(g, 0.5, 0.04);
    const long n = std::lround(T / g.dt);
    for (long k = 0; k < n; ++k) stepper.step(st, drive, g.dt);
    return st;
  };

  auto coarse = solve(128);
  auto mid = solve(256);
  auto fine = solve(1024);

  // cubic interpolation of the fine solution onto coarser cell centers
  auto sample_onto = [&](const PolaritonState& src, int src_nz, int dst_nz) {
    std::vector<cdouble> out(dst_nz);
    const double ratio = static_cast<double>(src_nz) / dst_nz;
    for (int i = 0; i < dst_nz; ++i) {
      const double x = (i + 0.5) * ratio - 0.5;
      const int j = static_cast<int>(std::floor(x));
      const double t = x - j;
      auto at = [&](int idx) -> cdouble {
        return (idx < 0 || idx >= src_nz) ? cdouble{} : src.psi_plus[idx];
      };
      out[i] = -t * (1 - t) * (2 - t) / 6.0 * at(j + 2) +
               (2 - t) * (1 - t * t) / 2.0 * at(j + 1) +
               t * (2 - t) * (1 + t) / 2.0 * at(j) +
               t * (t * t - 1) / 6.0 * at(j - 1);
    }
    return out;
  };

  auto err = [&](const PolaritonState& run, int nz) {
    auto ref = sample_onto(fine, 1024, nz);
    double e = 0.0, n = 0.0;
    for (int i = 0; i < nz; ++i) {
      e += std::norm(run.psi_plus[i] - ref[i]);
      n += std::norm(ref[i]);
    }
    return std::sqrt(e / n);
  };

  const double e_coarse = err(coarse, 128);
  const double e_mid = err(mid, 256);
  REQUIRE(e_coarse / e_mid > 3.0);
  REQUIRE(e_coarse / e_mid < 12.0);
}

TEST_CASE("symmetric combination is conserved while the mismatch dies",
          "[propagator][property]") {
  auto d = derive(synthetic_medium(8e10)); // fast matching
  auto g = test_grid(1024);
  const double om2_total = d.g2n / 500.0;
  TwoFieldStepper stepper(g, d);

  auto st = PolaritonState::zeros(g.nz);
  st.psi_plus = gaussian_envelope(g, 0.5, 0.03);
  ControlDrive::Sample balanced{0.5 * om2_total, 0.5 * om2_total};

  auto norms = [&](const PolaritonState& s) {
    double sym = 0.0, anti = 0.0;
    for (int i = 0; i < g.nz; ++i) {
      sym += std::norm(0.5 * (s.psi_plus[i] + s.psi_minus[i]));
      anti += std::norm(s.psi_plus[i] - s.psi_minus[i]);
    }
    return std::pair{std::sqrt(sym * g.dz), std::sqrt(anti * g.dz)};
  };

  stepper.step(st, balanced, g.dt); // let the injected mismatch relax
  auto [sym0, anti0] = norms(st);
  REQUIRE(anti0 < sym0);
  for (int k = 0; k < 1000; ++k) stepper.step(st, balanced, g.dt);
  auto [sym1, anti1] = norms(st);
  REQUIRE(sym1 == Approx(sym0).epsilon(1e-3));
  REQUIRE(anti1 < 0.05 * sym1);
}

TEST_CASE("adiabatic transport conserves the norm over 1e4 steps",
          "[propagator][property]") {
  auto d = derive(synthetic_medium());
  auto g = test_grid(512);
  SpinTransport transport(g, d, std::nullopt, {false});
  auto st = PolaritonState::zeros(g.nz);
  st.spin_s = gaussian_envelope(g, 0.25, 0.02);
  SpinTransport::mirror(st);

  const double om2_total = d.g2n / 500.0;
  const double imbalance = 1e-4;
  ControlDrive::Sample fwd{0.5 * om2_total * (1 + imbalance),
                           0.5 * om2_total * (1 - imbalance)};
  ControlDrive::Sample bwd{fwd.om2_minus, fwd.om2_plus};
  const auto co_f = slow_light(fwd, d);
  const auto co_b = slow_light(bwd, d);
  const double dt = g.dz / co_f.v_g; // one cell per step: exact transport

  const double n0 = l2_norm(st.spin_s, g.dz);
  // drag back and forth, 128 cells each way, 1e4 steps in total
  for (int k = 0; k < 10000; ++k)
    transport.step(st, (k / 128) % 2 == 0 ? co_f : co_b, dt);
  const double n1 = l2_norm(st.spin_s, g.dz);
  REQUIRE(std::abs(n1 - n0) / n0 < 1e-6);
  // the mismatch is identically zero in this mode
  REQUIRE(measure(st, g).matching_residual == 0.0);
}

TEST_CASE("nan in the field aborts the run", "[propagator]") {
  auto d = derive(synthetic_medium());
  auto g = test_grid(128);
  TwoFieldStepper stepper(g, d);
  auto st = matched_gaussian(g, 0.5, 0.05);
  st.psi_plus[10] = {std::nan(""), 0.0};
  ControlDrive drive;
  drive.a = 1e-4;
  drive.schedule = {{0.0, 1e15, 1e15}};
  TwoFieldStepper::RunOptions opt;
  opt.t1 = 10 * g.dt;
  REQUIRE_THROWS_AS(stepper.run(st, drive, opt), SolverError);
}
