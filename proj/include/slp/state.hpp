#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "slp/error.hpp"
#include "slp/grid.hpp"
#include "slp/numerics.hpp"

namespace slp {

/// Complex polariton and spin envelopes on the z-grid at one instant.
struct PolaritonState {
  std::vector<cdouble> psi_plus;
  std::vector<cdouble> psi_minus;
  std::vector<cdouble> spin_s;
  std::vector<cdouble> spin_sprime;

  static PolaritonState zeros(int nz) {
    PolaritonState s;
    s.psi_plus.assign(nz, {0.0, 0.0});
    s.psi_minus.assign(nz, {0.0, 0.0});
    s.spin_s.assign(nz, {0.0, 0.0});
    s.spin_sprime.assign(nz, {0.0, 0.0});
    return s;
  }

  int nz() const { return static_cast<int>(psi_plus.size()); }
};

/// Gaussian envelope exp(-(z-center)^2/(2 width^2)); `width` is the standard
/// deviation of the field amplitude.
inline std::vector<cdouble> gaussian_envelope(const Grid& g, double center,
                                              double width,
                                              double amplitude = 1.0) {
  std::vector<cdouble> f(g.nz);
  for (int i = 0; i < g.nz; ++i) {
    const double u = (g.z(i) - center) / width;
    f[i] = amplitude * std::exp(-0.5 * u * u);
  }
  return f;
}

/// Flat-top envelope with smooth (erf-like) edges of scale `edge`.
inline std::vector<cdouble> plateau_envelope(const Grid& g, double z_lo,
                                             double z_hi, double edge,
                                             double amplitude = 1.0) {
  std::vector<cdouble> f(g.nz);
  for (int i = 0; i < g.nz; ++i) {
    const double z = g.z(i);
    const double rise = 0.5 * (1.0 + std::erf((z - z_lo) / edge));
    const double fall = 0.5 * (1.0 + std::erf((z_hi - z) / edge));
    f[i] = amplitude * rise * fall;
  }
  return f;
}

/// Per-step diagnostics of the field pair.
struct StepReport {
  double t = 0.0;                 // s
  double centroid = 0.0;          // m, first moment of |psi_+|^2 + |psi_-|^2
  double rms_width = 0.0;         // m, sqrt of central second moment
  double norm = 0.0;              // sum (|psi_+|^2 + |psi_-|^2) dz
  double matching_residual = 0.0; // ||psi_+ - psi_-|| / max(||psi_+||,||psi_-||)
  double centroid_phase = 0.0;    // rad, arg(psi_+ + psi_-) at the centroid cell
};

inline double l2_norm(const std::vector<cdouble>& f, double dz) {
  double s = 0.0;
  for (const auto& x : f) s += std::norm(x);
  return std::sqrt(s * dz);
}

/// Moments of the combined field intensity. Throws on zero norm, where the
/// moments are undefined.
inline StepReport measure(const PolaritonState& st, const Grid& g,
                          double t = 0.0) {
  StepReport r;
  r.t = t;
  double w = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < g.nz; ++i) {
    const double inten = std::norm(st.psi_plus[i]) + std::norm(st.psi_minus[i]);
    const double z = g.z(i);
    w += inten;
    m1 += inten * z;
    m2 += inten * z * z;
  }
  r.norm = w * g.dz;
  if (!(r.norm > 0.0))
    throw SolverError("measure: zero field norm, moments undefined");
  r.centroid = m1 / w;
  r.rms_width = std::sqrt(std::max(0.0, m2 / w - r.centroid * r.centroid));

  const double np = l2_norm(st.psi_plus, g.dz);
  const double nm = l2_norm(st.psi_minus, g.dz);
  double diff = 0.0;
  for (int i = 0; i < g.nz; ++i)
    diff += std::norm(st.psi_plus[i] - st.psi_minus[i]);
  r.matching_residual = std::sqrt(diff * g.dz) / std::max(np, nm);

  int ic = static_cast<int>(r.centroid / g.dz - 0.5 + 0.5);
  if (ic < 0) ic = 0;
  if (ic >= g.nz) ic = g.nz - 1;
  r.centroid_phase = std::arg(st.psi_plus[ic] + st.psi_minus[ic]);
  return r;
}

} // namespace slp
