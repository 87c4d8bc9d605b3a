#pragma once

#include "slp/constants.hpp"
#include "slp/error.hpp"

namespace slp {

/// Uniform z-grid for the field integrator. dt is the two-field step and is
/// capped at dz/c, which bounds every characteristic of the dressed system.
struct Grid {
  int nz = 0;
  double dz = 0.0;    // m
  double dt = 0.0;    // s
  double l_sim = 0.0; // simulated extent, m

  static Grid make(int nz, double l_sim, double dt) {
    Grid g;
    g.nz = nz;
    g.l_sim = l_sim;
    g.dz = l_sim / nz;
    g.dt = dt;
    g.validate();
    return g;
  }

  void validate() const {
    if (nz < 8) throw ValidationError("grid: nz must be >= 8");
    if (!(l_sim > 0.0)) throw ValidationError("grid: l_sim must be > 0");
    if (!(dt > 0.0)) throw ValidationError("grid: dt must be > 0");
    if (dt > dz / speed_of_light * (1.0 + 1e-12))
      throw ValidationError("grid: dt must satisfy dt <= dz/c");
  }

  double z(int i) const { return (i + 0.5) * dz; }

  bool operator==(const Grid&) const = default;
};

} // namespace slp
