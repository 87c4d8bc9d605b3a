#pragma once

#include <cmath>
#include <complex>

#include "slp/constants.hpp"
#include "slp/error.hpp"
#include "slp/medium.hpp"

namespace slp {

/// Transversely guided stationary-pulse mode. The confined eigenvector has
/// equal forward/backward amplitudes; the finite radius exists only for
/// negative two-photon detuning, which guided_mode_omega() reports.
struct GuidedMode {
  double radius = 0.0;              // 1/e field radius, m
  std::complex<double> amplitude_ratio{1.0, 0.0}; // A_+ / A_-
  double beta_wave = 0.0;           // longitudinal wavevector, 1/m
  double confinement = 0.0;         // delta_k * k0 * a^2, dimensionless
};

/// Exact guided radius for a quadratic transverse drive-intensity profile:
/// R = a 2^{1/4} [sqrt(1 + delta_k k0 a^2) - 1]^{-1/2}.
inline GuidedMode guided_radius_exact(double a, const DerivedParams& d) {
  if (!(a > 0.0)) throw ValidationError("modes: a must be > 0");
  const double confinement = d.delta_k * d.k0 * a * a;
  if (!(confinement > 0.0))
    throw ValidationError("modes: nonpositive confinement parameter, no "
                          "confined transverse mode exists");
  GuidedMode m;
  m.confinement = confinement;
  m.radius = a * std::pow(2.0, 0.25) /
             std::sqrt(std::sqrt(1.0 + confinement) - 1.0);
  m.amplitude_ratio = {1.0, 0.0};
  m.beta_wave = 0.0;
  return m;
}

/// Strong-confinement limit R = a [2 / (delta_k k0 a^2)]^{1/4}, valid for
/// confinement >> 1. `warned` (optional) is set when confinement < 100.
inline double guided_radius_strong(double a, const DerivedParams& d,
                                   bool* warned = nullptr) {
  if (!(a > 0.0)) throw ValidationError("modes: a must be > 0");
  const double confinement = d.delta_k * d.k0 * a * a;
  if (!(confinement > 0.0))
    throw ValidationError("modes: nonpositive confinement parameter");
  if (warned) *warned = confinement < 100.0;
  return a * std::pow(2.0 / confinement, 0.25);
}

/// Smallest guided radius: the self-consistent point R = a of the
/// strong-confinement relation, R_min = sqrt(2 / (delta_k k0)).
inline double min_guided_radius(const DerivedParams& d) {
  if (!(d.delta_k > 0.0))
    throw ValidationError("modes: delta_k must be > 0");
  return std::sqrt(2.0 / (d.delta_k * d.k0));
}

inline double rayleigh_range(double waist, double lambda) {
  if (!(waist > 0.0)) throw ValidationError("modes: waist must be > 0");
  if (!(lambda > 0.0)) throw ValidationError("modes: lambda must be > 0");
  return pi * waist * waist / lambda;
}

/// Ratio of control-beam Rayleigh range to guided-mode Rayleigh range: how
/// far the guided geometry extends the diffraction-free propagation length.
inline double diffraction_extension(double a, const DerivedParams& d) {
  const GuidedMode m = guided_radius_exact(a, d);
  const double lambda = 2.0 * pi / d.k0;
  return rayleigh_range(a, lambda) / rayleigh_range(m.radius, lambda);
}

/// Sideband frequency of the guided mode at beta = 0 (real, and negative for
/// any confined mode: the two-photon detuning sits on the phasematched side).
inline double guided_mode_omega(const GuidedMode& m,
                                const SlowLightCoefficients& coeffs,
                                const DerivedParams& d) {
  const double c = speed_of_light;
  return (2.0 * c / (d.k0 * m.radius * m.radius) - d.delta_k * c) / coeffs.eta;
}

/// One point of the stationary-pulse dispersion relation
/// eta omega = (2c/(k0 R^2) - delta_k c) - i (c beta)^2 / xi
///             + (alpha_+ - alpha_-) c beta.
struct DispersionPoint {
  double beta_wave = 0.0;
  std::complex<double> omega{0.0, 0.0}; // rad/s
  double v_g = 0.0;                     // m/s
  double diffusion = 0.0;               // spreading coefficient, m^2/s
};

/// Evaluate the dispersion relation at wavevector beta. With xi_infinite the
/// dissipative term is dropped (the lossless limit).
inline DispersionPoint dispersion(double beta, const GuidedMode& mode,
                                  const SlowLightCoefficients& coeffs,
                                  const DerivedParams& d,
                                  bool xi_infinite = false) {
  if (!(mode.radius > 0.0) || !std::isfinite(mode.radius))
    throw ValidationError("modes: dispersion requires a finite guided mode");
  const double c = speed_of_light;
  const double offset = 2.0 * c / (d.k0 * mode.radius * mode.radius) -
                        d.delta_k * c;
  const double cb = c * beta;
  std::complex<double> eta_omega(offset +
                                     (coeffs.alpha_plus - coeffs.alpha_minus) *
                                         cb,
                                 xi_infinite ? 0.0 : -cb * cb / d.xi);
  DispersionPoint p;
  p.beta_wave = beta;
  p.omega = eta_omega / coeffs.eta;
  p.v_g = c * (coeffs.alpha_plus - coeffs.alpha_minus) / coeffs.eta;
  p.diffusion = 4.0 * coeffs.alpha_plus * coeffs.alpha_minus * c * c /
                (coeffs.eta * d.xi);
  return p;
}

} // namespace slp
