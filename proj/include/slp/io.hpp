#pragma once

#include <bit>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slp/config.hpp"
#include "slp/error.hpp"
#include "slp/medium.hpp"
#include "slp/modes.hpp"
#include "slp/protocol.hpp"
#include "slp/state.hpp"

namespace slp {

static_assert(std::endian::native == std::endian::little,
              "snapshot layout is little-endian float64");

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// One row of the guided-mode table.
struct ModeTableRow {
  double a = 0.0;
  double radius = 0.0;
  double confinement = 0.0;
  double z0_control = 0.0;
  double z0_guided = 0.0;
  double extension = 0.0;
};

inline ModeTableRow mode_table_row(double a, const DerivedParams& d) {
  ModeTableRow r;
  const GuidedMode m = guided_radius_exact(a, d);
  const double lambda = 2.0 * pi / d.k0;
  r.a = a;
  r.radius = m.radius;
  r.confinement = m.confinement;
  r.z0_control = rayleigh_range(a, lambda);
  r.z0_guided = rayleigh_range(m.radius, lambda);
  r.extension = r.z0_control / r.z0_guided;
  return r;
}

inline std::string mode_table_csv(const std::vector<ModeTableRow>& rows) {
  std::ostringstream os;
  os << "a_m,R_m,confinement_parameter,z0_control_m,z0_guided_m,"
        "extension_factor\n";
  for (const auto& r : rows)
    os << format_double(r.a) << ',' << format_double(r.radius) << ','
       << format_double(r.confinement) << ',' << format_double(r.z0_control)
       << ',' << format_double(r.z0_guided) << ',' << format_double(r.extension)
       << '\n';
  return os.str();
}

inline std::string trajectory_csv(const std::vector<StepReport>& rows) {
  std::ostringstream os;
  os << "t_s,centroid_m,rms_width_m,norm,matching_residual,phase_rad\n";
  for (const auto& r : rows)
    os << format_double(r.t) << ',' << format_double(r.centroid) << ','
       << format_double(r.rms_width) << ',' << format_double(r.norm) << ','
       << format_double(r.matching_residual) << ','
       << format_double(r.centroid_phase) << '\n';
  return os.str();
}

/// Full-field snapshot: one ASCII header line "nz dz t" followed by the four
/// envelopes (psi_plus, psi_minus, spin_s, spin_sprime), each written as nz
/// little-endian float64 pairs (re, im).
inline void write_snapshot(const std::string& path, const PolaritonState& st,
                           const Grid& g, double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot open snapshot file '" + path + "'");
  out << g.nz << ' ' << format_double(g.dz) << ' ' << format_double(t) << '\n';
  auto dump = [&out](const std::vector<cdouble>& f) {
    for (const auto& x : f) {
      const double re = x.real(), im = x.imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(double));
      out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
  };
  dump(st.psi_plus);
  dump(st.psi_minus);
  dump(st.spin_s);
  dump(st.spin_sprime);
}

inline nlohmann::ordered_json report_to_json(const PhaseShiftReport& r,
                                             const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["phi_numeric_rad"] = r.phi_numeric;
  j["phi_analytic_rad"] = r.phi_analytic;
  j["phi_bound_rad"] = r.phi_bound;
  j["loss_probability"] = r.loss_probability;
  j["notes"] = r.notes;
  j["config_echo"] = cfg.to_text();
  return j;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot open output file '" + path + "'");
  out << body;
}

} // namespace slp
