#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "slp/error.hpp"

namespace slp {

using cdouble = std::complex<double>;

/// Adaptive Simpson quadrature. Used by the closed-form spin solutions and
/// as an independent integration route in tests.
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-12,
                               int max_depth = 48) {
  auto simpson = [](double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
  };
  std::function<double(double, double, double, double, double, double, int)>
      rec = [&](double x0, double x2, double f0, double f1, double f2,
                double whole, int depth) -> double {
    double x1l = 0.5 * (x0 + 0.5 * (x0 + x2));
    double x1r = 0.5 * (0.5 * (x0 + x2) + x2);
    double fl = f(x1l);
    double fr = f(x1r);
    double h = x2 - x0;
    double left = simpson(f0, fl, f1, 0.5 * h);
    double right = simpson(f1, fr, f2, 0.5 * h);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
      return left + right + delta / 15.0;
    return rec(x0, 0.5 * (x0 + x2), f0, fl, f1, left, depth - 1) +
           rec(0.5 * (x0 + x2), x2, f1, fr, f2, right, depth - 1);
  };
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), max_depth);
}

/// Thomas algorithm for a tridiagonal system. Diagonals are overwritten.
/// lower[0] and upper[n-1] are unused.
template <typename T>
inline void solve_tridiagonal(std::vector<T>& lower, std::vector<T>& diag,
                              std::vector<T>& upper, std::vector<T>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    T m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

/// Semi-Lagrangian shift of a field on a uniform grid by `cells` grid cells
/// (positive = field moves toward larger index). Cubic Lagrange interpolation
/// on the 4-point stencil around the departure point; lookups outside the
/// domain read zero, which realizes open (outflow) boundaries.
inline void shift_field(std::vector<cdouble>& f, double cells,
                        std::vector<cdouble>& scratch) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  scratch.resize(f.size());
  auto at = [&](std::ptrdiff_t i) -> cdouble {
    return (i < 0 || i >= n) ? cdouble(0.0, 0.0) : f[static_cast<std::size_t>(i)];
  };
  const double floor_cells = std::floor(cells);
  const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(floor_cells);
  const double t = cells - floor_cells; // in [0,1)
  if (t == 0.0) {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      scratch[static_cast<std::size_t>(i)] = at(i - k);
    f.swap(scratch);
    return;
  }
  // Departure point sits at local coordinate -t from node j0 = i-k; Lagrange
  // weights for the nodes at offsets {+1, 0, -1, -2} around it.
  const double wp1 = -t * (1.0 - t) * (2.0 - t) / 6.0;
  const double w0 = (2.0 - t) * (1.0 - t * t) / 2.0;
  const double wm1 = t * (2.0 - t) * (1.0 + t) / 2.0;
  const double wm2 = t * (t * t - 1.0) / 6.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t j = i - k;
    scratch[static_cast<std::size_t>(i)] =
        wp1 * at(j + 1) + w0 * at(j) + wm1 * at(j - 1) + wm2 * at(j - 2);
  }
  f.swap(scratch);
}

inline bool all_finite(const std::vector<cdouble>& v) {
  for (const auto& x : v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

} // namespace slp
