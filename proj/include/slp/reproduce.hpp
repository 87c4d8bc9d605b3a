#pragma once

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "slp/kerr.hpp"
#include "slp/medium.hpp"
#include "slp/modes.hpp"
#include "slp/propagator.hpp"
#include "slp/protocol.hpp"
#include "slp/radial_oracle.hpp"
#include "slp/spin_transport.hpp"
#include "slp/state.hpp"

namespace slp {

/// One row of the reproduction table: a published reference value or a
/// cross-validation between independent computation routes.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace reproduce_detail {

inline MediumParams reference_medium() {
  MediumParams m;
  m.lambda = 0.8e-6;
  m.gamma = 2.0 * pi * 3e6;
  m.density = 1e20; // 1e14 cm^-3
  m.length = 300e-6;
  m.n_s = 1.012;
  m.n_c = 1.0;
  return m;
}

inline MediumParams synthetic_medium(double density_cm3) {
  MediumParams m;
  m.lambda = 0.8e-6;
  m.gamma = 1e7;
  m.density = density_cm3 * 1e6;
  m.length = 0.8;
  m.n_s = 1.012;
  m.n_c = 1.0;
  return m;
}

inline double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

inline std::string um(double meters) {
  std::ostringstream os;
  os << std::setprecision(4) << meters * 1e6 << " um";
  return os.str();
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

inline double fit_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
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

inline PolaritonState matched_gaussian(const Grid& g, double center,
                                       double width) {
  auto st = PolaritonState::zeros(g.nz);
  st.psi_plus = gaussian_envelope(g, center, width);
  st.psi_minus = st.psi_plus;
  for (int i = 0; i < g.nz; ++i)
    st.spin_s[i] = -0.5 * (st.psi_plus[i] + st.psi_minus[i]);
  return st;
}

struct ProtocolPoint {
  ExecutionResult result;
  double v_g = 0.0;
  KerrParams kerr;
  double eta = 0.0;
};

inline ProtocolPoint run_protocol_point(double v_g, double l_sprime,
                                        bool spreading, int nz, double l_sim,
                                        double probe_center) {
  const auto derived = derive(reference_medium());
  const auto kerr = make_kerr_params(derived, 2e-6, 16.0 * derived.gamma);
  const double eta = 1e6;
  const double l_s = 300e-6;
  const double sig_p = l_s / 4.0, sig_x = l_sprime / 4.0;
  const double sig_eff = std::hypot(sig_p, sig_x);

  StandardPlanSpec spec;
  spec.om2_total = derived.g2n / eta;
  spec.v_g_drag = v_g;
  spec.drag_distance = 8.0 * sig_eff;
  spec.probe.center = probe_center;
  spec.probe.width = sig_p;
  spec.probe.excitations = 1e-6;
  spec.signal.center = probe_center + 4.0 * sig_eff;
  spec.signal.width = sig_x;
  spec.signal.excitations = 1.0;

  ProtocolParams params;
  params.derived = derived;
  params.kerr = kerr;
  params.l_s = l_s;
  params.l_sprime = l_sprime;
  params.spreading = spreading;

  const double dz = l_sim / nz;
  Grid grid = Grid::make(nz, l_sim, dz / speed_of_light);
  ProtocolPoint out;
  out.result = execute(make_standard_plan(spec, derived), params, grid);
  out.v_g = v_g;
  out.kerr = kerr;
  out.eta = eta;
  return out;
}

} // namespace reproduce_detail

/// Run the full reference-reproduction table. Each row checks a published
/// value or an independent-oracle agreement at its stated tolerance.
inline std::vector<CriterionResult> run_acceptance_suite() {
  using namespace reproduce_detail;
  std::vector<CriterionResult> table;
  const auto derived = derive(reference_medium());

  { // 1: guided-mode radius, gaussian control beam
    Timer timer;
    const auto mode = guided_radius_exact(100e-6, derived);
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 1;
    r.name = "guided-mode radius, gaussian a = 100 um";
    const double err = rel_err(mode.radius, 13e-6);
    r.pass = err <= 0.05 && r.seconds < 1e-3;
    std::ostringstream os;
    os << "R = " << um(mode.radius) << " vs 13 um (+/-5%)";
    r.detail = os.str();
    table.push_back(r);
  }

  { // 2: guided-mode radius, bessel first lobe
    Timer timer;
    const auto mode = guided_radius_exact(20e-6, derived);
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 2;
    r.name = "guided-mode radius, bessel lobe a = 20 um";
    r.pass = rel_err(mode.radius, 5.7e-6) <= 0.05;
    r.detail = "R = " + um(mode.radius) + " vs 5.7 um (+/-5%)";
    table.push_back(r);
  }

  { // 3: smallest guided mode
    Timer timer;
    const double rmin = min_guided_radius(derived);
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 3;
    r.name = "minimum guided radius";
    r.pass = rel_err(rmin, 1.6e-6) <= 0.05;
    r.detail = "R_min = " + um(rmin) + " vs 1.6 um (+/-5%)";
    table.push_back(r);
  }

  { // 4: rayleigh ranges and the diffraction-free extension
    Timer timer;
    const auto mode = guided_radius_exact(100e-6, derived);
    const double z0_control = rayleigh_range(100e-6, 0.8e-6);
    const double z0_guided = rayleigh_range(mode.radius, 0.8e-6);
    const double extension = diffraction_extension(100e-6, derived);
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 4;
    r.name = "rayleigh ranges and extension factor";
    // the quoted 0.06 cm is a one-digit rounding of pi (13 um)^2 / lambda
    // = 0.066 cm; the 5% band is taken around the value the quoted radius
    // implies
    const double z0_quoted_radius = rayleigh_range(13e-6, 0.8e-6);
    const bool ok_control = rel_err(z0_control, 3.9e-2) <= 0.05;
    const bool ok_guided = rel_err(z0_guided, z0_quoted_radius) <= 0.05;
    const bool ok_ext = extension >= 55.0 && extension <= 70.0;
    r.pass = ok_control && ok_guided && ok_ext;
    std::ostringstream os;
    os << std::setprecision(4) << "z0 = " << z0_control * 100 << " cm vs 3.9, "
       << z0_guided * 100 << " cm vs 0.066 (quoted as 0.06), extension "
       << extension << " in [55,70]";
    r.detail = os.str();
    table.push_back(r);
  }

  { // 5: optical depth of the slab
    Timer timer;
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 5;
    r.name = "optical depth of the 300 um slab";
    r.pass = derived.d0 >= 1e3;
    std::ostringstream os;
    os << "d0 = " << std::setprecision(4) << derived.d0 << " >= 1e3";
    r.detail = os.str();
    table.push_back(r);
  }

  { // 6: transverse eigensolve against the closed form
    Timer timer;
    const auto co = slow_light({1e14, 1e14}, derived);
    const auto mode = guided_radius_exact(100e-6, derived);
    const double omega = guided_mode_omega(mode, co, derived);
    const auto oracle = radial_oracle(100e-6, omega, co, derived, {512, 0.0});
    const double strength = -co.eta * omega / speed_of_light;
    const double closed_form =
        std::pow(2.0 * 100e-6 * 100e-6 / (derived.k0 * strength), 0.25);
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 6;
    r.name = "radial eigensolve vs closed-form radius";
    const double err = rel_err(oracle.ground_radius, closed_form);
    r.pass = err <= 0.01 && r.seconds < 10.0;
    std::ostringstream os;
    os << "ground radius " << um(oracle.ground_radius) << " vs "
       << um(closed_form) << " (" << std::setprecision(2) << err * 100
       << "%, tol 1%)";
    r.detail = os.str();
    table.push_back(r);
  }

  { // 7: centroid drift speed across drive imbalances
    Timer timer;
    const auto d = derive(synthetic_medium(8e9));
    const double om2_total = d.g2n / 500.0;
    bool all_ok = true;
    std::ostringstream os;
    os << std::setprecision(3);
    for (double imbalance : {0.05, 0.1, 0.2}) {
      Grid g = Grid::make(1024, 1.0, 1.0 / 1024 / speed_of_light);
      TwoFieldStepper stepper(g, d);
      auto st = matched_gaussian(g, 0.4, 0.03);
      ControlDrive drive;
      drive.a = 1e-4;
      drive.schedule = {{0.0, 0.5 * om2_total * (1.0 + imbalance),
                         0.5 * om2_total * (1.0 - imbalance)}};
      const auto co = slow_light(drive.sample(0.0), d);
      TwoFieldStepper::RunOptions opt;
      opt.t1 = 0.03 / co.v_g; // drift of 3 cm
      opt.report_stride = 4000;
      auto traj = stepper.run(st, drive, opt);
      std::vector<double> ts, cs;
      for (const auto& row : traj) {
        ts.push_back(row.t);
        cs.push_back(row.centroid);
      }
      const double v_meas = fit_slope(ts, cs);
      const double err = rel_err(v_meas, co.v_g);
      all_ok = all_ok && err <= 0.02;
      os << "|a+-a-| = " << imbalance << ": " << err * 100 << "%  ";
    }
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 7;
    r.name = "centroid speed vs c(a+ - a-)/eta (tol 2%)";
    r.pass = all_ok && r.seconds < 60.0;
    r.detail = os.str();
    table.push_back(r);
  }

  { // 8: stationary spreading rate
    Timer timer;
    const auto d = derive(synthetic_medium(8e9)); // xi dt = 0.6 on this grid
    const double om2_total = d.g2n / 500.0;
    Grid g = Grid::make(1024, 1.0, 1.0 / 1024 / speed_of_light);
    TwoFieldStepper stepper(g, d);
    auto st = matched_gaussian(g, 0.5, 0.02);
    ControlDrive drive;
    drive.a = 1e-4;
    drive.schedule = {{0.0, 0.5 * om2_total, 0.5 * om2_total}};
    const auto co = slow_light(drive.sample(0.0), d);
    const double diffusion = 4.0 * co.alpha_plus * co.alpha_minus *
                             speed_of_light * speed_of_light /
                             (co.eta * d.xi);
    TwoFieldStepper::RunOptions opt;
    opt.t1 = 1.6e-7;
    opt.report_stride = 2000;
    auto traj = stepper.run(st, drive, opt);
    std::vector<double> ts, w2;
    for (const auto& row : traj) {
      ts.push_back(row.t);
      w2.push_back(row.rms_width * row.rms_width);
    }
    const double slope = fit_slope(ts, w2);
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 8;
    r.name = "rms-width^2 growth vs 4 a+ a- c^2/(eta xi) (tol 10%)";
    const double err = rel_err(slope, diffusion);
    r.pass = err <= 0.10;
    std::ostringstream os;
    os << "slope " << std::setprecision(4) << slope << " vs D = " << diffusion
       << " (" << std::setprecision(2) << err * 100 << "%)";
    r.detail = os.str();
    table.push_back(r);
  }

  { // 9: pulse matching sharpens with optical depth
    Timer timer;
    Grid g = Grid::make(1024, 1.0, 1.0 / 1024 / speed_of_light);
    const double sigma = 3.0 / (4.0 * pi) * 0.8e-6 * 0.8e-6;
    const double xi1 = 0.3 / g.dt;
    const double density1_cm3 = xi1 / (0.5 * sigma * speed_of_light) / 1e6;
    double residual[2];
    for (int pass = 0; pass < 2; ++pass) {
      const auto d =
          derive(synthetic_medium(pass == 0 ? density1_cm3 : 10 * density1_cm3));
      TwoFieldStepper stepper(g, d);
      auto st = matched_gaussian(g, 0.5, 0.03);
      ControlDrive::Sample balanced{0.5 * d.g2n / 500.0, 0.5 * d.g2n / 500.0};
      for (int k = 0; k < 3000; ++k) stepper.step(st, balanced, g.dt);
      residual[pass] = measure(st, g).matching_residual;
    }
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 9;
    r.name = "matching residual drops >= 3x for 10x optical depth";
    const double ratio = residual[0] / residual[1];
    r.pass = ratio >= 3.0;
    std::ostringstream os;
    os << std::setprecision(3) << "residuals " << residual[0] << " -> "
       << residual[1] << " (ratio " << ratio << ")";
    r.detail = os.str();
    table.push_back(r);
  }

  { // 10: numeric drag phase vs closed-form quadrature, 10-point sweep
    Timer timer;
    const double vg0 = 0.0327022841546676;
    bool all_ok = true;
    double worst = 0.0;
    for (double vg_scale : {0.5, 0.75, 1.0, 1.5, 2.0}) {
      for (double l_sprime : {75e-6, 50e-6}) {
        auto point = run_protocol_point(vg0 * vg_scale, l_sprime, false, 4096,
                                        2e-3, 0.7e-3);
        const double err = rel_err(point.result.report.phi_numeric,
                                   point.result.report.phi_analytic);
        worst = std::max(worst, err);
        all_ok = all_ok && err <= 1e-3;
      }
    }
    CriterionResult r;
    r.seconds = timer.seconds();
    r.id = 10;
    r.name = "drag phase vs closed form, 10-point sweep (tol 1e-3)";
    r.pass = all_ok && r.seconds < 300.0;
    std::ostringstream os;
    os << "worst relative deviation " << std::setprecision(3) << worst;
    r.detail = os.str();
    table.push_back(r);
  }

  { // 11 and 12: the reference operating point
    Timer timer;
    auto point = run_protocol_point(0.0327022841546676, 75e-6, true, 8192,
                                    11e-3, 4.95e-3);
    const auto& rep = point.result.report;
    {
      CriterionResult r;
      r.seconds = timer.seconds();
      r.id = 11;
      r.name = "operating point: phi within 3x of pi, bounded";
      const bool in_range =
          rep.phi_numeric >= pi / 3.0 && rep.phi_numeric <= 3.0 * pi;
      const bool bounded = rep.phi_numeric <= rep.phi_bound;
      r.pass = in_range && bounded;
      std::ostringstream os;
      os << std::setprecision(4) << "phi = " << rep.phi_numeric << " rad = "
         << rep.phi_numeric / pi << " pi, bound " << rep.phi_bound << " rad";
      r.detail = os.str();
      table.push_back(r);
    }
    {
      CriterionResult r;
      r.seconds = 0.0;
      r.id = 12;
      r.name = "loss formula disagrees with the quoted few percent";
      bool flagged = false;
      for (const auto& n : rep.notes)
        if (n.find("few-percent") != std::string::npos) flagged = true;
      r.pass = rep.loss_probability > 0.1 && rep.loss_probability < 1.0 &&
               flagged;
      std::ostringstream os;
      os << std::setprecision(3) << "p = 1 - exp(-2 phi gamma/Delta) = "
         << rep.loss_probability << " (far above a few percent, flagged)";
      r.detail = os.str();
      table.push_back(r);
    }
  }

  return table;
}

inline int print_acceptance_table(const std::vector<CriterionResult>& table,
                                  std::ostream& os) {
  int failures = 0;
  for (const auto& r : table) {
    os << (r.pass ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << "  "
       << r.name << ": " << r.detail << "  [" << std::setprecision(3)
       << std::fixed << r.seconds << " s]\n";
    os.unsetf(std::ios::fixed);
    if (!r.pass) ++failures;
  }
  os << (failures == 0 ? "all criteria passed\n"
                       : std::to_string(failures) + " criteria failed\n");
  return failures;
}

} // namespace slp
