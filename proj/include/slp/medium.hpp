#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slp/constants.hpp"
#include "slp/error.hpp"

namespace slp {

/// Physical parameters of the resonant atomic medium. All quantities SI.
struct MediumParams {
  double lambda = 0.0;      // signal wavelength, m
  double gamma = 0.0;       // optical polarization decay, rad/s
  double density = 0.0;     // atoms/m^3
  double length = 0.0;      // medium extent along z, m
  double n_s = 1.0;         // background index at the signal frequency
  double n_c = 1.0;         // background index at the control frequency
  double omega_ratio = 1.0; // control/signal carrier frequency ratio

  void validate() const {
    if (!(lambda > 0.0)) throw ValidationError("medium: lambda must be > 0");
    if (!(gamma > 0.0)) throw ValidationError("medium: gamma must be > 0");
    if (!(density > 0.0)) throw ValidationError("medium: density must be > 0");
    if (!(length > 0.0)) throw ValidationError("medium: length must be > 0");
    if (!(n_s >= 1.0)) throw ValidationError("medium: n_s must be >= 1");
    if (!(n_c >= 1.0)) throw ValidationError("medium: n_c must be >= 1");
    if (!(omega_ratio > 0.0))
      throw ValidationError("medium: omega_ratio must be > 0");
  }

  bool operator==(const MediumParams&) const = default;
};

/// Quantities derived from MediumParams. The collective coupling follows the
/// convention g^2 N = (sigma/2) n gamma c, which makes the optical depth
/// d0 = xi L / c = n sigma L / 2.
struct DerivedParams {
  double k0 = 0.0;           // signal wavevector 2*pi/lambda, 1/m
  double delta_k = 0.0;      // wavevector mismatch k_s - k_c, 1/m
  double sigma = 0.0;        // resonant scattering cross-section, m^2
  double g2n = 0.0;          // collective coupling g^2 N, 1/s^2
  double xi = 0.0;           // resonant absorption rate g^2 N / gamma, 1/s
  double d0 = 0.0;           // optical depth xi L / c
  double gamma = 0.0;        // copied from MediumParams for convenience
  double density = 0.0;      // copied
  double length = 0.0;       // copied
};

inline DerivedParams derive(const MediumParams& m) {
  m.validate();
  DerivedParams d;
  d.k0 = 2.0 * pi / m.lambda;
  d.sigma = 3.0 / (4.0 * pi) * m.lambda * m.lambda;
  d.delta_k = d.k0 * (m.n_s - m.n_c * m.omega_ratio);
  if (!(d.delta_k > 0.0))
    throw ValidationError(
        "medium: delta_k <= 0, phasematching requires n_s > n_c (no "
        "waveguiding possible)");
  d.g2n = 0.5 * d.sigma * m.density * m.gamma * speed_of_light;
  d.xi = d.g2n / m.gamma;
  d.d0 = d.xi * m.length / speed_of_light;
  d.gamma = m.gamma;
  d.density = m.density;
  d.length = m.length;
  return d;
}

enum class BeamProfile { gaussian, bessel };

/// Counter-propagating control drive: |Omega_+|^2 and |Omega_-|^2 schedules
/// (piecewise linear in time) plus the transverse profile scale a.
struct ControlDrive {
  struct Breakpoint {
    double t = 0.0;        // s
    double om2_plus = 0.0; // rad^2/s^2
    double om2_minus = 0.0;
    bool operator==(const Breakpoint&) const = default;
  };

  BeamProfile profile = BeamProfile::gaussian;
  double a = 0.0; // Gaussian waist or first Bessel lobe radius, m
  std::vector<Breakpoint> schedule;

  void validate() const {
    if (!(a > 0.0)) throw ValidationError("drive: a must be > 0");
    if (schedule.empty())
      throw ValidationError("drive: schedule needs at least one breakpoint");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      const auto& b = schedule[i];
      if (b.om2_plus < 0.0 || b.om2_minus < 0.0)
        throw ValidationError("drive: intensities must be nonnegative");
      if (i > 0 && !(schedule[i - 1].t < b.t))
        throw ValidationError("drive: breakpoint times must increase");
    }
  }

  struct Sample {
    double om2_plus = 0.0;
    double om2_minus = 0.0;
    double total() const { return om2_plus + om2_minus; }
  };

  /// Piecewise-linear interpolation, clamped at the schedule ends.
  Sample sample(double t) const {
    if (schedule.empty()) return {};
    if (t <= schedule.front().t)
      return {schedule.front().om2_plus, schedule.front().om2_minus};
    if (t >= schedule.back().t)
      return {schedule.back().om2_plus, schedule.back().om2_minus};
    auto hi = std::upper_bound(
        schedule.begin(), schedule.end(), t,
        [](double x, const Breakpoint& b) { return x < b.t; });
    auto lo = hi - 1;
    double u = (t - lo->t) / (hi->t - lo->t);
    return {lo->om2_plus + u * (hi->om2_plus - lo->om2_plus),
            lo->om2_minus + u * (hi->om2_minus - lo->om2_minus)};
  }

  bool operator==(const ControlDrive&) const = default;
};

/// Slow-light coefficients for one drive sample.
struct SlowLightCoefficients {
  double alpha_plus = 0.0;  // |Omega_+|^2 / (|Omega_+|^2 + |Omega_-|^2)
  double alpha_minus = 0.0; // complement; alpha_plus + alpha_minus == 1
  double eta = 0.0;         // g^2 N / (|Omega_+|^2 + |Omega_-|^2)
  double v_g = 0.0;         // c (alpha_plus - alpha_minus) / eta, m/s
};

inline SlowLightCoefficients slow_light(const ControlDrive::Sample& s,
                                        const DerivedParams& d) {
  const double total = s.total();
  if (!(total > 0.0))
    throw ValidationError(
        "drive: both control intensities are zero, slow-light coefficients "
        "undefined");
  SlowLightCoefficients out;
  out.alpha_plus = s.om2_plus / total;
  out.alpha_minus = s.om2_minus / total;
  out.eta = d.g2n / total;
  out.v_g = speed_of_light * (out.alpha_plus - out.alpha_minus) / out.eta;
  return out;
}

} // namespace slp
