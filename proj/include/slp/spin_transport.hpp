#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "slp/grid.hpp"
#include "slp/kerr.hpp"
#include "slp/medium.hpp"
#include "slp/numerics.hpp"
#include "slp/state.hpp"

namespace slp {

// Adiabatic spin dynamics: in the stiff-coupling regime the matched pulse is
// bound to the spin wave (psi+ = psi- = -S) and obeys
//
//   dt S + v_g dz S = i (beta/eta) |S'|^2 S + D dzz S,   D = 4 a+ a- c^2/(eta xi)
//   dt S'           = i (beta/eta) |S|^2  S'
//
// This integrator advances that reduced pair; the drag stage of the phase
// protocol runs on it, with the spreading term optional (Crank-Nicolson).
// Its advection CFL is set by v_g, not c, so slow drags remain affordable.
class SpinTransport {
public:
  struct Options {
    Options(bool spreading_on = true) : spreading(spreading_on) {}
    bool spreading;
  };

  SpinTransport(Grid grid, DerivedParams derived,
                std::optional<KerrParams> kerr = std::nullopt,
                Options opt = Options())
      : grid_(grid), derived_(derived), kerr_(kerr), opt_(opt) {}

  const Grid& grid() const { return grid_; }

  /// One Strang step at the given slow-light operating point. Requires
  /// |v_g| dt <= dz; a step of exactly one cell transports without
  /// interpolation error.
  void step(PolaritonState& st, const SlowLightCoefficients& co, double dt) {
    const double cells = co.v_g * dt / grid_.dz;
    if (std::abs(cells) > 1.0 + 1e-9)
      throw SolverError("spin transport: |v_g| dt exceeds one cell");
    const double diffusion = 4.0 * co.alpha_plus * co.alpha_minus *
                             speed_of_light * speed_of_light /
                             (co.eta * derived_.xi);
    if (kerr_) rotate(st, co.eta, 0.5 * dt);
    if (opt_.spreading) diffuse(st.spin_s, diffusion, 0.5 * dt);
    shift_field(st.spin_s, cells, scratch_);
    if (opt_.spreading) diffuse(st.spin_s, diffusion, 0.5 * dt);
    if (kerr_) rotate(st, co.eta, 0.5 * dt);
    mirror(st);
  }

  /// Keep the matched field pair consistent with the spin wave.
  static void mirror(PolaritonState& st) {
    for (std::size_t i = 0; i < st.spin_s.size(); ++i) {
      st.psi_plus[i] = -st.spin_s[i];
      st.psi_minus[i] = -st.spin_s[i];
    }
  }

private:
  void rotate(PolaritonState& st, double eta, double dt) {
    const cdouble ibeta = cdouble(0.0, 1.0) * kerr_->beta / eta * dt;
    for (int i = 0; i < grid_.nz; ++i) {
      const double n1 = std::norm(st.spin_sprime[i]);
      const double n2 = std::norm(st.spin_s[i]);
      if (n1 > 0.0) st.spin_s[i] *= std::exp(ibeta * n1);
      if (n2 > 0.0) st.spin_sprime[i] *= std::exp(ibeta * n2);
    }
  }

  void diffuse(std::vector<cdouble>& f, double diffusion, double tau) {
    if (!(diffusion > 0.0)) return;
    const double mu = diffusion * tau / (2.0 * grid_.dz * grid_.dz);
    const int nz = grid_.nz;
    lo_.assign(nz, cdouble(-mu, 0.0));
    di_.assign(nz, cdouble(1.0 + 2.0 * mu, 0.0));
    up_.assign(nz, cdouble(-mu, 0.0));
    rhs_.resize(nz);
    for (int i = 0; i < nz; ++i) {
      const cdouble left = i > 0 ? f[i - 1] : cdouble{};
      const cdouble right = i + 1 < nz ? f[i + 1] : cdouble{};
      rhs_[i] = mu * left + (1.0 - 2.0 * mu) * f[i] + mu * right;
    }
    solve_tridiagonal(lo_, di_, up_, rhs_);
    f = rhs_;
  }

  Grid grid_;
  DerivedParams derived_;
  std::optional<KerrParams> kerr_;
  Options opt_;
  std::vector<cdouble> scratch_, lo_, di_, up_, rhs_;
};

} // namespace slp
