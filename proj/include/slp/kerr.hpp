#pragma once

#include <complex>

#include "slp/constants.hpp"
#include "slp/error.hpp"
#include "slp/medium.hpp"
#include "slp/numerics.hpp"

namespace slp {

/// Cross-Kerr coupling of the guided probe to a stored spin excitation.
/// With the quantization area identified with the mode area, the single-atom
/// coupling is g^2 = g^2 N / (n pi R^2 L) and the per-excitation light shift
/// is beta = (g^2/Delta)(1 + i gamma/Delta).
struct KerrParams {
  double delta = 0.0;    // detuning from the auxiliary transition, rad/s
  double gamma = 0.0;    // rad/s
  double g_tilde2 = 0.0; // coupling strength, rad^2/s^2
  cdouble beta{0.0, 0.0}; // complex light shift per excitation, rad/s
  double mode_area = 0.0; // pi R^2, m^2
};

inline KerrParams make_kerr_params(const DerivedParams& d, double mode_radius,
                                   double delta) {
  if (!(mode_radius > 0.0))
    throw ValidationError("kerr: mode radius must be > 0");
  if (!(delta > 0.0)) throw ValidationError("kerr: delta must be > 0");
  KerrParams k;
  k.delta = delta;
  k.gamma = d.gamma;
  k.mode_area = pi * mode_radius * mode_radius;
  k.g_tilde2 = d.g2n / (d.density * k.mode_area * d.length);
  k.beta = k.g_tilde2 / delta * cdouble(1.0, d.gamma / delta);
  return k;
}

} // namespace slp
