#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slp/grid.hpp"
#include "slp/kerr.hpp"
#include "slp/medium.hpp"
#include "slp/numerics.hpp"
#include "slp/spin_transport.hpp"
#include "slp/state.hpp"

namespace slp {

/// Longitudinal envelope of a stored pulse. `width` is the amplitude standard
/// deviation for gaussian shapes and the full plateau length otherwise.
/// `excitations` fixes the stored number N = (1/L) integral |S|^2 dz.
struct EnvelopeSpec {
  enum class Shape { gaussian, plateau };
  Shape shape = Shape::gaussian;
  double center = 0.0;
  double width = 0.0;
  double edge = 0.0; // plateau edge scale; 0 = width/16
  double excitations = 0.0;

  double amplitude_at(double z) const {
    if (shape == Shape::gaussian) {
      const double u = (z - center) / width;
      return std::exp(-0.5 * u * u);
    }
    const double e = edge > 0.0 ? edge : width / 16.0;
    const double lo = center - 0.5 * width, hi = center + 0.5 * width;
    return 0.25 * (1.0 + std::erf((z - lo) / e)) *
           (1.0 + std::erf((hi - z) / e));
  }

  double support_lo() const {
    return shape == Shape::gaussian ? center - 10.0 * width
                                    : center - 0.5 * width - 10.0 * width / 16.0;
  }
  double support_hi() const {
    return shape == Shape::gaussian ? center + 10.0 * width
                                    : center + 0.5 * width + 10.0 * width / 16.0;
  }

  /// Amplitude scale that realizes `excitations` for medium length L.
  double scale(double medium_length) const {
    if (excitations <= 0.0) return 0.0;
    const double norm = adaptive_simpson(
        [this](double z) {
          const double u = amplitude_at(z);
          return u * u;
        },
        support_lo(), support_hi(), 1e-14 * width);
    return std::sqrt(excitations * medium_length / norm);
  }

  /// Excitation density n(z) = |S(z)|^2 as an analytic profile.
  std::function<double(double)> density(double medium_length) const {
    const double a = scale(medium_length);
    return [a, *this](double z) {
      const double u = amplitude_at(z);
      return a * a * u * u;
    };
  }
};

/// Stored spin excitation bookkeeping.
struct StoredExcitation {
  std::vector<cdouble> envelope;
  double excitations = 0.0; // N = (1/L) sum |S'|^2 dz
  double length = 0.0;      // envelope length (4 sigma or plateau width), m

  void validate(double medium_length) const {
    if (excitations < 0.0)
      throw ValidationError("protocol: stored excitation number must be >= 0");
    if (length > medium_length)
      throw ValidationError(
          "protocol: stored envelope longer than the medium");
  }
};

inline double excitation_number(const std::vector<cdouble>& f, double dz,
                                double medium_length) {
  double s = 0.0;
  for (const auto& x : f) s += std::norm(x);
  return s * dz / medium_length;
}

// ---------------------------------------------------------------------------
// protocol plan

struct RampDrive {
  double om2_plus_target = 0.0;
  double om2_minus_target = 0.0;
  double duration = 0.0;
};
struct RamanPi {};
struct StorePulse {
  EnvelopeSpec envelope;
};
struct Hold {
  double duration = 0.0;
};
struct Retrieve {
  int direction = +1; // +1 forward, -1 backward
};

using ProtocolEvent =
    std::variant<RampDrive, RamanPi, StorePulse, Hold, Retrieve>;

/// Ordered control sequence: store signal, swap it to the shelved coherence
/// with a Raman pi pulse, store the probe, convert to a stationary pulse,
/// drag it across the stored excitation, retrieve.
struct ProtocolPlan {
  double om2_plus0 = 0.0; // drive intensities at t = 0
  double om2_minus0 = 0.0;
  std::vector<ProtocolEvent> events;

  void validate() const {
    int stores = 0, ramans = 0, retrieves = 0;
    bool raman_seen_between = false;
    for (const auto& ev : events) {
      if (std::holds_alternative<StorePulse>(ev)) {
        if (stores == 1 && ramans == 0)
          throw ValidationError(
              "protocol: probe injected before the Raman pi pulse");
        ++stores;
      } else if (std::holds_alternative<RamanPi>(ev)) {
        if (stores != 1)
          throw ValidationError(
              "protocol: Raman pi pulse must follow exactly one stored pulse");
        ++ramans;
        raman_seen_between = true;
      } else if (std::holds_alternative<Retrieve>(ev)) {
        ++retrieves;
      } else if (const auto* r = std::get_if<RampDrive>(&ev)) {
        if (!(r->duration > 0.0))
          throw ValidationError("protocol: ramp duration must be > 0");
        if (r->om2_plus_target < 0.0 || r->om2_minus_target < 0.0)
          throw ValidationError("protocol: ramp targets must be nonnegative");
      } else if (const auto* h = std::get_if<Hold>(&ev)) {
        if (!(h->duration > 0.0))
          throw ValidationError("protocol: hold duration must be > 0");
      }
    }
    if (stores != 2)
      throw ValidationError("protocol: plan needs exactly two stored pulses "
                            "(signal then probe)");
    if (ramans != 1 || !raman_seen_between)
      throw ValidationError("protocol: plan needs exactly one Raman pi pulse "
                            "between signal storage and probe injection");
    if (retrieves != 1 ||
        !std::holds_alternative<Retrieve>(events.back()))
      throw ValidationError("protocol: plan must end with a single retrieve");
  }
};

/// Canonical timing sequence. The probe is injected at the balanced
/// (stationary) operating point, held, ramped to a slight imbalance that
/// realizes the drag velocity, dragged across the stored excitation, and
/// retrieved. The total control intensity stays constant so eta is fixed.
struct StandardPlanSpec {
  double om2_total = 0.0;
  double v_g_drag = 0.0;      // m/s, > 0
  double drag_distance = 0.0; // m
  double ramp_duration = 0.0;
  double hold_duration = 0.0;
  EnvelopeSpec signal;
  EnvelopeSpec probe;
};

inline ProtocolPlan make_standard_plan(const StandardPlanSpec& s,
                                       const DerivedParams& d) {
  if (!(s.om2_total > 0.0))
    throw ValidationError("protocol: control intensity must be > 0");
  if (!(s.v_g_drag > 0.0))
    throw ValidationError("protocol: drag velocity must be > 0");
  if (!(s.drag_distance > 0.0))
    throw ValidationError("protocol: drag distance must be > 0");
  const double eta = d.g2n / s.om2_total;
  const double imbalance = eta * s.v_g_drag / speed_of_light;
  if (imbalance >= 1.0)
    throw ValidationError("protocol: drag velocity exceeds c/eta for the "
                          "configured control intensity");
  const double ramp =
      s.ramp_duration > 0.0 ? s.ramp_duration
                            : 0.02 * s.drag_distance / s.v_g_drag;
  const double hold = s.hold_duration > 0.0 ? s.hold_duration : 0.25 * ramp;

  ProtocolPlan p;
  p.om2_plus0 = 0.5 * s.om2_total;
  p.om2_minus0 = 0.5 * s.om2_total;
  p.events.push_back(StorePulse{s.signal});
  p.events.push_back(RamanPi{});
  p.events.push_back(StorePulse{s.probe});
  p.events.push_back(Hold{hold});
  p.events.push_back(RampDrive{0.5 * s.om2_total * (1.0 + imbalance),
                               0.5 * s.om2_total * (1.0 - imbalance), ramp});
  p.events.push_back(Hold{s.drag_distance / s.v_g_drag});
  p.events.push_back(Retrieve{+1});
  return p;
}

// ---------------------------------------------------------------------------
// closed-form spin solutions and the phase-shift formulas

/// Closed-form solution of the coupled spin pair for constant v_g with
/// spreading ignored: the moving coherence picks up the phase of the stored
/// density integrated over the traversed window, and vice versa. Integrals
/// are done by adaptive quadrature of the supplied density profiles.
struct AnalyticSpinSolution {
  std::function<cdouble(double)> s0;      // S(z, 0)
  std::function<cdouble(double)> sprime0; // S'(z, 0)
  std::function<double(double)> n1;       // |S'(z)|^2, static
  std::function<double(double)> n2_0;     // |S(z, 0)|^2
  cdouble beta{0.0, 0.0};
  double eta = 1.0;
  double v_g = 0.0;
  double t = 0.0;

  cdouble spin_s(double z) const {
    const double lo = z - v_g * t;
    const double window = adaptive_simpson(n1, lo, z, 1e-13 * std::abs(z - lo) + 1e-30);
    const cdouble phase = cdouble(0.0, 1.0) * beta / (eta * v_g) * window;
    return std::exp(phase) * s0(lo);
  }

  cdouble spin_sprime(double z) const {
    const double hi = v_g * t - z;
    double window = 0.0;
    if (hi > 0.0)
      window = adaptive_simpson([this](double u) { return n2_0(-u); }, 0.0,
                                hi, 1e-13 * hi + 1e-30);
    const cdouble phase = cdouble(0.0, 1.0) * beta / (eta * v_g) * window;
    return std::exp(phase) * sprime0(z);
  }
};

inline AnalyticSpinSolution analytic_solution(
    std::function<cdouble(double)> s0, std::function<cdouble(double)> sprime0,
    const KerrParams& kerr, double eta, double v_g, double t) {
  if (t < 0.0) throw ValidationError("protocol: analytic solution needs t >= 0");
  if (!(v_g > 0.0))
    throw ValidationError("protocol: analytic solution needs v_g > 0");
  AnalyticSpinSolution a;
  a.s0 = s0;
  a.sprime0 = sprime0;
  a.n1 = [sprime0](double z) { return std::norm(sprime0(z)); };
  a.n2_0 = [s0](double z) { return std::norm(s0(z)); };
  a.beta = kerr.beta;
  a.eta = eta;
  a.v_g = v_g;
  a.t = t;
  return a;
}

/// phi = Re[beta] L N / (eta v_g): the fully-traversed cross-phase. The shift
/// is proportional to the interaction time, i.e. inversely proportional to
/// the drag group velocity.
inline double phase_shift_formula(const KerrParams& kerr, double eta,
                                  double medium_length, double n_sprime,
                                  double v_g) {
  if (!(v_g > 0.0))
    throw ValidationError("protocol: v_g = 0 never completes the traversal "
                          "(infinite interaction time)");
  return kerr.beta.real() / (eta * v_g) * medium_length * n_sprime;
}

/// Upper bound phi <= d0 (gamma/Delta) (sigma/(pi R^2)) l_s^2 / (L l_s').
inline double phase_bound(const DerivedParams& d, const KerrParams& kerr,
                          double l_s, double l_sprime, double medium_length) {
  if (!(l_sprime > 0.0 && l_s > 0.0 && medium_length > 0.0))
    throw ValidationError("protocol: lengths must be positive");
  if (!(l_sprime <= l_s && l_s <= medium_length))
    throw ValidationError(
        "protocol: bound expects l_s' <= l_s <= medium length");
  return d.d0 * (kerr.gamma / kerr.delta) * (d.sigma / kerr.mode_area) *
         (l_s * l_s / (medium_length * l_sprime));
}

/// Two-photon loss p = 1 - exp(-2 phi gamma / Delta), from the fixed ratio
/// Im(beta)/Re(beta) = gamma/Delta.
inline double loss_probability(double phi, const KerrParams& kerr) {
  if (phi < 0.0) throw ValidationError("protocol: phi must be >= 0");
  return 1.0 - std::exp(-2.0 * phi * kerr.gamma / kerr.delta);
}

// ---------------------------------------------------------------------------
// protocol execution

struct PhaseShiftReport {
  double phi_numeric = 0.0;
  double phi_analytic = 0.0;
  double phi_bound = 0.0;
  double loss_probability = 0.0;
  std::vector<std::string> notes;
};

struct ProtocolParams {
  DerivedParams derived;
  KerrParams kerr;
  double l_s = 0.0;      // probe envelope length, m
  double l_sprime = 0.0; // stored envelope length, m
  bool spreading = true;
  double cfl = 0.5;
  int min_steps_per_event = 16;
  int report_stride = 8;
  double max_kerr_rotation_per_step = 0.05; // rad
};

struct ExecutionResult {
  PhaseShiftReport report;
  std::vector<StepReport> trajectory;
  StoredExcitation stored; // the shelved excitation after the Raman pulse
  double numeric_loss = 0.0; // 1 - |S_int|^2 / |S_ref|^2 after retrieval
};

namespace detail {

struct DriveState {
  double om2_plus = 0.0;
  double om2_minus = 0.0;
};

inline double principal_angle(double a) {
  while (a > pi) a -= 2.0 * pi;
  while (a < -pi) a += 2.0 * pi;
  return a;
}

} // namespace detail

/// Run the plan on the adiabatic spin-transport integrator, against a
/// reference run with no stored excitation. Returns the unwrapped differential
/// probe phase at the moving centroid after retrieval, the closed-form value,
/// the bound and the loss formula. Records (rather than fails on) adiabaticity
/// and traversal warnings.
inline ExecutionResult execute(const ProtocolPlan& plan,
                               const ProtocolParams& params, const Grid& grid) {
  plan.validate();
  const DerivedParams& d = params.derived;

  PolaritonState st_int = PolaritonState::zeros(grid.nz);
  PolaritonState st_ref = PolaritonState::zeros(grid.nz);
  SpinTransport stepper(grid, d, params.kerr,
                        SpinTransport::Options{params.spreading});

  detail::DriveState drive{plan.om2_plus0, plan.om2_minus0};
  double t = 0.0;
  bool probe_stored = false;
  int stores_seen = 0;
  double phi = 0.0, last_wrapped = 0.0;
  double kerr_exposure_time = 0.0;
  double ideal_displacement = 0.0;
  double probe_center0 = 0.0;
  double drag_eta = 0.0, drag_vg = 0.0;
  std::function<double(double)> n1_profile;
  double n1_peak = 0.0;
  ExecutionResult out;
  std::vector<StepReport>& traj = out.trajectory;

  auto sample_phase = [&](void) {
    if (!probe_stored) return;
    double w = 0.0, m1 = 0.0;
    for (int i = 0; i < grid.nz; ++i) {
      const double inten = std::norm(st_ref.spin_s[i]);
      w += inten;
      m1 += inten * grid.z(i);
    }
    if (!(w > 0.0)) return;
    int ic = static_cast<int>(m1 / w / grid.dz);
    if (ic < 0) ic = 0;
    if (ic >= grid.nz) ic = grid.nz - 1;
    const cdouble num = st_int.spin_s[ic];
    const cdouble ref = st_ref.spin_s[ic];
    if (num == cdouble{} || ref == cdouble{}) return;
    const double wrapped = std::arg(num * std::conj(ref));
    phi += detail::principal_angle(wrapped - last_wrapped);
    last_wrapped = wrapped;
  };

  auto integrate_segment = [&](double duration, detail::DriveState from,
                               detail::DriveState to) {
    const auto at = [&](double u) {
      return ControlDrive::Sample{from.om2_plus + u * (to.om2_plus - from.om2_plus),
                                  from.om2_minus +
                                      u * (to.om2_minus - from.om2_minus)};
    };
    // step size: spatial CFL on the fastest v_g in the segment, plus a cap on
    // the per-step Kerr rotation so the unwrapped phase tracks cleanly
    double vmax = 0.0;
    for (int k = 0; k <= 32; ++k) {
      const auto co = slow_light(at(k / 32.0), d);
      vmax = std::max(vmax, std::abs(co.v_g));
    }
    double dt = duration / params.min_steps_per_event;
    if (vmax > 0.0) dt = std::min(dt, params.cfl * grid.dz / vmax);
    if (params.kerr.beta.real() > 0.0 && n1_peak > 0.0) {
      const auto co0 = slow_light(at(0.0), d);
      const double rate = params.kerr.beta.real() / co0.eta * n1_peak;
      if (rate > 0.0)
        dt = std::min(dt, params.max_kerr_rotation_per_step / rate);
    }
    const long nsteps = std::max<long>(1, std::lround(std::ceil(duration / dt)));
    const double h = duration / nsteps;
    for (long k = 0; k < nsteps; ++k) {
      const auto s = at((k + 0.5) / nsteps);
      const auto co = slow_light(s, d);
      stepper.step(st_int, co, h);
      stepper.step(st_ref, co, h);
      t += h;
      if (probe_stored) {
        kerr_exposure_time += h;
        ideal_displacement += co.v_g * h;
        drag_eta = co.eta;
        if (co.v_g != 0.0) drag_vg = co.v_g;
      }
      sample_phase();
      if ((k + 1) % params.report_stride == 0 || k + 1 == nsteps) {
        StepReport r;
        bool zero = true;
        for (const auto& x : st_int.spin_s)
          if (x != cdouble{}) { zero = false; break; }
        r = zero ? StepReport{} : measure(st_int, grid, t);
        r.t = t;
        traj.push_back(r);
      }
    }
  };

  for (const auto& ev : plan.events) {
    if (const auto* sp = std::get_if<StorePulse>(&ev)) {
      ++stores_seen;
      const double amp = sp->envelope.scale(d.length);
      if (stores_seen == 1) {
        // signal pulse: present only in the interaction run
        for (int i = 0; i < grid.nz; ++i)
          st_int.spin_s[i] = amp * sp->envelope.amplitude_at(grid.z(i));
        n1_profile = sp->envelope.density(d.length);
        n1_peak = 0.0;
        for (int i = 0; i < grid.nz; ++i)
          n1_peak = std::max(n1_peak, std::norm(st_int.spin_s[i]));
      } else {
        for (int i = 0; i < grid.nz; ++i) {
          const cdouble v = amp * sp->envelope.amplitude_at(grid.z(i));
          st_int.spin_s[i] = v;
          st_ref.spin_s[i] = v;
        }
        probe_stored = true;
        probe_center0 = sp->envelope.center;
        last_wrapped = 0.0;
      }
      SpinTransport::mirror(st_int);
      SpinTransport::mirror(st_ref);
    } else if (std::holds_alternative<RamanPi>(ev)) {
      st_int.spin_sprime.swap(st_int.spin_s);
      st_ref.spin_sprime.swap(st_ref.spin_s);
      out.stored.envelope = st_int.spin_sprime;
      out.stored.excitations =
          excitation_number(st_int.spin_sprime, grid.dz, d.length);
      out.stored.length = params.l_sprime;
      out.stored.validate(d.length);
    } else if (const auto* rd = std::get_if<RampDrive>(&ev)) {
      detail::DriveState to{rd->om2_plus_target, rd->om2_minus_target};
      integrate_segment(rd->duration, drive, to);
      drive = to;
    } else if (const auto* h = std::get_if<Hold>(&ev)) {
      integrate_segment(h->duration, drive, drive);
    } else if (std::holds_alternative<Retrieve>(ev)) {
      break;
    }
  }

  out.report.phi_numeric = phi;

  // closed-form reference: the same traversed window integrated by quadrature
  if (n1_profile && drag_vg > 0.0) {
    const double window = adaptive_simpson(
        n1_profile, probe_center0, probe_center0 + ideal_displacement,
        1e-13 * std::max(ideal_displacement, 1e-30));
    out.report.phi_analytic =
        params.kerr.beta.real() / (drag_eta * drag_vg) * window;
  }
  out.report.phi_bound =
      phase_bound(d, params.kerr, params.l_s, params.l_sprime, d.length);
  out.report.loss_probability =
      loss_probability(std::abs(out.report.phi_numeric), params.kerr);

  double ni = 0.0, nr = 0.0;
  for (int i = 0; i < grid.nz; ++i) {
    ni += std::norm(st_int.spin_s[i]);
    nr += std::norm(st_ref.spin_s[i]);
  }
  out.numeric_loss = nr > 0.0 ? 1.0 - ni / nr : 0.0;

  const double adiabatic = kerr_exposure_time > 0.0 && drag_eta > 0.0
                               ? std::pow(speed_of_light / params.l_s, 2) *
                                     kerr_exposure_time / (drag_eta * d.xi)
                               : 0.0;
  if (adiabatic > 1.0)
    out.report.notes.push_back(
        "adiabaticity parameter (c/l_s)^2 t/(eta xi) = " +
        std::to_string(adiabatic) + " exceeds 1; spreading corrections are "
        "not small");
  if (ideal_displacement < params.l_sprime)
    out.report.notes.push_back(
        "drag displacement below the stored envelope length; phase not "
        "saturated");
  if (out.report.loss_probability > 0.1)
    out.report.notes.push_back(
        "two-photon loss probability " +
        std::to_string(out.report.loss_probability) +
        " is far above the few-percent regime usually quoted for a phase of "
        "order pi at Delta = 16 gamma; the formula p = 1 - exp(-2 phi "
        "gamma/Delta) does not reach a few percent there");
  return out;
}

} // namespace slp
